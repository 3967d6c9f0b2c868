#include "gcflite/graph.hpp"

#include <cmath>

namespace gcflite {

template <class T>
CsrMatrix<T> build_adjacency(const InteractionDataset& data) {
    const std::size_t n_users = data.n_users;
    const std::size_t n = data.n_entities();

    std::vector<std::vector<index_t>> item_users(data.n_items);
    for (std::size_t u = 0; u < n_users; ++u)
        for (index_t i : data.train[u]) item_users[i].push_back(static_cast<index_t>(u));

    CsrMatrix<T> a(n, n);
    a.col_idx.reserve(2 * data.train_count());
    for (std::size_t u = 0; u < n_users; ++u) {
        for (index_t i : data.train[u]) a.col_idx.push_back(static_cast<index_t>(n_users + i));
        a.row_ptr[u + 1] = a.col_idx.size();
    }
    for (std::size_t i = 0; i < data.n_items; ++i) {
        for (index_t u : item_users[i]) a.col_idx.push_back(u);
        a.row_ptr[n_users + i + 1] = a.col_idx.size();
    }
    a.values.assign(a.col_idx.size(), T{1});
    return a;
}

template <class T>
std::pair<CsrMatrix<T>, std::vector<T>> normalize(const CsrMatrix<T>& a) {
    std::vector<T> deg(a.rows, T{0});
    for (std::size_t p = 0; p < a.rows; ++p)
        for (std::uint64_t e = a.row_ptr[p]; e < a.row_ptr[p + 1]; ++e) deg[p] += a.values[e];

    std::vector<T> inv_sqrt(a.rows, T{0});
    for (std::size_t p = 0; p < a.rows; ++p)
        if (deg[p] > T{0}) inv_sqrt[p] = T{1} / std::sqrt(deg[p]);

    CsrMatrix<T> out = a;
    for (std::size_t p = 0; p < a.rows; ++p)
        for (std::uint64_t e = a.row_ptr[p]; e < a.row_ptr[p + 1]; ++e)
            out.values[e] = a.values[e] * inv_sqrt[p] * inv_sqrt[a.col_idx[e]];
    return {std::move(out), std::move(deg)};
}

template <class T>
ExpandedGraph<T> expand_adjacency(const CsrMatrix<T>& a, const SparseAssignment<T>& s) {
    require(a.rows == a.cols, "expand: adjacency must be square");
    require(s.n_entities == a.rows, "expand: assignment rows must match adjacency");
    for (T w : s.weights)
        require(w >= T{0}, "expand: negative assignment weight");

    const std::size_t n = a.rows;
    const std::size_t c = s.n_codes;

    // transposed assignment rows for the bottom-left St block
    std::vector<std::vector<std::pair<index_t, T>>> code_edges(c);
    for (std::size_t p = 0; p < n; ++p)
        for (std::uint64_t e = s.row_ptr[p]; e < s.row_ptr[p + 1]; ++e)
            code_edges[s.col_idx[e]].emplace_back(static_cast<index_t>(p), s.weights[e]);

    ExpandedGraph<T> g;
    g.n_entities = n;
    g.n_codes = c;
    CsrMatrix<T> ex(n + c, n + c);
    ex.col_idx.reserve(a.nnz() + 2 * s.nnz());
    ex.values.reserve(a.nnz() + 2 * s.nnz());
    for (std::size_t p = 0; p < n; ++p) {
        for (std::uint64_t e = a.row_ptr[p]; e < a.row_ptr[p + 1]; ++e) {
            ex.col_idx.push_back(a.col_idx[e]);
            ex.values.push_back(a.values[e]);
        }
        for (std::uint64_t e = s.row_ptr[p]; e < s.row_ptr[p + 1]; ++e) {
            ex.col_idx.push_back(static_cast<index_t>(n + s.col_idx[e]));
            ex.values.push_back(s.weights[e]);
        }
        ex.row_ptr[p + 1] = ex.col_idx.size();
    }
    for (std::size_t q = 0; q < c; ++q) {
        for (const auto& [p, w] : code_edges[q]) {
            ex.col_idx.push_back(p);
            ex.values.push_back(w);
        }
        ex.row_ptr[n + q + 1] = ex.col_idx.size();
    }

    auto [norm, deg] = normalize(ex);
    g.adjacency = std::move(ex);
    g.normalized = std::move(norm);
    g.degrees = std::move(deg);
    return g;
}

template CsrMatrix<float> build_adjacency(const InteractionDataset&);
template CsrMatrix<double> build_adjacency(const InteractionDataset&);
template std::pair<CsrMatrix<float>, std::vector<float>> normalize(const CsrMatrix<float>&);
template std::pair<CsrMatrix<double>, std::vector<double>> normalize(const CsrMatrix<double>&);
template ExpandedGraph<float> expand_adjacency(const CsrMatrix<float>&,
                                               const SparseAssignment<float>&);
template ExpandedGraph<double> expand_adjacency(const CsrMatrix<double>&,
                                                const SparseAssignment<double>&);

} // namespace gcflite
