#include "gcflite/assign_update.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "gcflite/linalg.hpp"

namespace gcflite {

template <class T>
SolveResult<T> solve_assignment(const DenseMatrix<T>& h_full, const DenseMatrix<T>& h_meta,
                                T rcond) {
    require(h_full.cols == h_meta.cols, "solve_assignment: dimension mismatch");
    SolveResult<T> out;
    const bool all_zero =
        std::all_of(h_meta.data.begin(), h_meta.data.end(), [](T v) { return v == T{0}; });
    if (all_zero) {
        out.s = DenseMatrix<T>(h_full.rows, h_meta.rows);
        out.degenerate = true;
        return out;
    }
    out.s = solve_assignment_batched(h_full, pinv(h_meta, rcond));
    return out;
}

template <class T>
DenseMatrix<T> solve_assignment_batched(const DenseMatrix<T>& h_full_rows,
                                        const DenseMatrix<T>& h_meta_pinv) {
    return matmul_nn(h_full_rows, h_meta_pinv);
}

template <class T>
SparseAssignment<T> sparsify(const DenseMatrix<T>& dense_rows, std::size_t t) {
    require(t >= 1, "sparsify: t must be >= 1");
    require(t <= dense_rows.cols, "sparsify: t exceeds column count");

    SparseAssignment<T> s;
    s.n_entities = dense_rows.rows;
    s.n_codes = dense_rows.cols;
    s.t = t;
    s.row_ptr.assign(dense_rows.rows + 1, 0);
    s.col_idx.reserve(dense_rows.rows * t);
    s.weights.reserve(dense_rows.rows * t);
    s.anchor.resize(dense_rows.rows);

    const T uniform = T{1} / static_cast<T>(t);
    for (std::size_t p = 0; p < dense_rows.rows; ++p) {
        const auto keep = row_topk(dense_rows.row_span(p), t);
        double mass = 0.0;
        for (index_t q : keep) mass += std::max(0.0, double(dense_rows.at(p, q)));
        for (index_t q : keep) {
            s.col_idx.push_back(q);
            s.weights.push_back(mass > 1e-12 ? std::max(T{0}, dense_rows.at(p, q)) : uniform);
        }
        s.row_ptr[p + 1] = s.col_idx.size();
        std::uint64_t best = s.row_ptr[p];
        for (std::uint64_t k = s.row_ptr[p] + 1; k < s.row_ptr[p + 1]; ++k)
            if (s.weights[k] > s.weights[best]) best = k;
        s.anchor[p] = s.col_idx[best];
    }
    s.validate();
    return s;
}

template <class T>
UpdateResult<T> update_round(const CsrMatrix<T>& base_adjacency, const ExpandedGraph<T>& graph,
                             const SparseAssignment<T>& s, const MetaCodebook<T>& codebook,
                             std::size_t L, T rcond, std::size_t batch_rows) {
    require(batch_rows >= 1, "update_round: batch_rows must be >= 1");
    const std::size_t n = s.n_entities;
    const std::size_t c = s.n_codes;

    // representations must be current, so run a fresh forward pass
    const DenseMatrix<T> composed = compose(s, codebook);
    const PropagationState<T> st = propagate(graph, composed, codebook, L, false);
    auto [h_full, h_meta] = split(st.pooled, n);

    UpdateResult<T> out;
    const bool degenerate =
        std::all_of(h_meta.data.begin(), h_meta.data.end(), [](T v) { return v == T{0}; });
    out.degenerate = degenerate;

    SparseAssignment<T> fresh;
    fresh.n_entities = n;
    fresh.n_codes = c;
    fresh.t = s.t;
    fresh.row_ptr.assign(n + 1, 0);
    fresh.col_idx.reserve(n * s.t);
    fresh.weights.reserve(n * s.t);
    fresh.anchor.resize(n);

    DenseMatrix<T> h_meta_pinv;
    if (!degenerate) h_meta_pinv = pinv(h_meta, rcond);

    for (std::size_t lo = 0; lo < n; lo += batch_rows) {
        const std::size_t hi = std::min(lo + batch_rows, n);
        DenseMatrix<T> rows(hi - lo, h_full.cols);
        std::copy(h_full.data.begin() + static_cast<std::ptrdiff_t>(lo * h_full.cols),
                  h_full.data.begin() + static_cast<std::ptrdiff_t>(hi * h_full.cols),
                  rows.data.begin());
        const DenseMatrix<T> dense =
            degenerate ? DenseMatrix<T>(hi - lo, c) : solve_assignment_batched(rows, h_meta_pinv);
        const SparseAssignment<T> part = sparsify(dense, s.t);
        const std::uint64_t base = fresh.col_idx.size();
        for (std::size_t r = 0; r < part.n_entities; ++r) {
            fresh.row_ptr[lo + r + 1] = base + part.row_ptr[r + 1];
            fresh.anchor[lo + r] = part.anchor[r];
        }
        fresh.col_idx.insert(fresh.col_idx.end(), part.col_idx.begin(), part.col_idx.end());
        fresh.weights.insert(fresh.weights.end(), part.weights.begin(), part.weights.end());
    }
    fresh.validate();

    out.graph = expand_adjacency(base_adjacency, fresh);
    out.assignment = std::move(fresh);
    return out;
}

template struct SolveResult<float>;
template struct SolveResult<double>;
template SolveResult<float> solve_assignment(const DenseMatrix<float>&, const DenseMatrix<float>&,
                                             float);
template SolveResult<double> solve_assignment(const DenseMatrix<double>&,
                                              const DenseMatrix<double>&, double);
template DenseMatrix<float> solve_assignment_batched(const DenseMatrix<float>&,
                                                     const DenseMatrix<float>&);
template DenseMatrix<double> solve_assignment_batched(const DenseMatrix<double>&,
                                                      const DenseMatrix<double>&);
template SparseAssignment<float> sparsify(const DenseMatrix<float>&, std::size_t);
template SparseAssignment<double> sparsify(const DenseMatrix<double>&, std::size_t);
template UpdateResult<float> update_round(const CsrMatrix<float>&, const ExpandedGraph<float>&,
                                          const SparseAssignment<float>&,
                                          const MetaCodebook<float>&, std::size_t, float,
                                          std::size_t);
template UpdateResult<double> update_round(const CsrMatrix<double>&, const ExpandedGraph<double>&,
                                           const SparseAssignment<double>&,
                                           const MetaCodebook<double>&, std::size_t, double,
                                           std::size_t);

} // namespace gcflite
