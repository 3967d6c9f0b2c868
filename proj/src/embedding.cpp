#include "gcflite/embedding.hpp"

#include <span>
#include <stdexcept>

#include "gcflite/kernels.hpp"
#include "gcflite/linalg.hpp"
#include "gcflite/parallel.hpp"

namespace gcflite {

template <class T>
DenseMatrix<T> compose_batch(const SparseAssignment<T>& s, const MetaCodebook<T>& codebook,
                             std::size_t row_begin, std::size_t row_end) {
    require(s.n_codes == codebook.size(), "compose: assignment/codebook bucket mismatch");
    require(row_begin <= row_end && row_end <= s.n_entities, "compose: bad row range");
    const auto& k = kern::ops<T>();
    const std::size_t d = codebook.dim();
    DenseMatrix<T> out(row_end - row_begin, d);
    parallel_blocks(out.rows, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r) {
            const std::size_t p = row_begin + r;
            for (std::uint64_t e = s.row_ptr[p]; e < s.row_ptr[p + 1]; ++e)
                k.axpy(d, s.weights[e], codebook.rows.row(s.col_idx[e]), out.row(r));
        }
    });
    return out;
}

template <class T>
DenseMatrix<T> compose(const SparseAssignment<T>& s, const MetaCodebook<T>& codebook) {
    return compose_batch(s, codebook, 0, s.n_entities);
}

template <class T>
PropagationState<T> propagate(const ExpandedGraph<T>& graph, const DenseMatrix<T>& compose_out,
                              const MetaCodebook<T>& codebook, std::size_t L,
                              bool keep_layers) {
    const std::size_t n = graph.n_entities;
    const std::size_t c = graph.n_codes;
    const std::size_t d = codebook.dim();
    require(compose_out.rows == n && compose_out.cols == d, "propagate: bad composed shape");
    require(codebook.size() == c, "propagate: graph/codebook bucket mismatch");

    PropagationState<T> st;
    st.L = L;

    DenseMatrix<T> layer(n + c, d);
    std::copy(compose_out.data.begin(), compose_out.data.end(), layer.data.begin());
    std::copy(codebook.rows.data.begin(), codebook.rows.data.end(),
              layer.data.begin() + static_cast<std::ptrdiff_t>(n * d));

    st.pooled = layer;
    if (keep_layers) st.layers.push_back(layer);
    for (std::size_t l = 0; l < L; ++l) {
        layer = spmm(graph.normalized, layer);
        const auto& k = kern::ops<T>();
        k.axpy(st.pooled.data.size(), T{1}, layer.data.data(), st.pooled.data.data());
        if (keep_layers) st.layers.push_back(layer);
    }
    kern::ops<T>().scal(st.pooled.data.size(), T{1} / static_cast<T>(L + 1),
                        st.pooled.data.data());
    if (!all_finite(std::span<const T>(st.pooled.data)))
        throw std::runtime_error("propagate: non-finite result");
    return st;
}

template <class T>
std::pair<DenseMatrix<T>, DenseMatrix<T>> split(const DenseMatrix<T>& pooled, std::size_t n) {
    require(n <= pooled.rows, "split: entity count exceeds rows");
    const std::size_t c = pooled.rows - n;
    const std::size_t d = pooled.cols;
    DenseMatrix<T> full(n, d), meta(c, d);
    std::copy(pooled.data.begin(), pooled.data.begin() + static_cast<std::ptrdiff_t>(n * d),
              full.data.begin());
    std::copy(pooled.data.begin() + static_cast<std::ptrdiff_t>(n * d), pooled.data.end(),
              meta.data.begin());
    return {std::move(full), std::move(meta)};
}

template <class T>
DenseMatrix<T> backward(const ExpandedGraph<T>& graph, const PropagationState<T>& state,
                        const DenseMatrix<T>& grad_pooled, const SparseAssignment<T>& s) {
    const std::size_t n = graph.n_entities;
    const std::size_t c = graph.n_codes;
    const std::size_t d = grad_pooled.cols;
    require(grad_pooled.rows == n + c, "backward: gradient shape mismatch");
    const auto& k = kern::ops<T>();

    // g = (1/(L+1)) * sum_{l=0..L} A^l * grad_pooled, using A's symmetry;
    // this is the adjoint of mean pooling over the propagation layers.
    DenseMatrix<T> base = grad_pooled;
    k.scal(base.data.size(), T{1} / static_cast<T>(state.L + 1), base.data.data());
    DenseMatrix<T> acc = base;
    for (std::size_t l = 0; l < state.L; ++l) {
        acc = spmm(graph.normalized, acc);
        k.axpy(acc.data.size(), T{1}, base.data.data(), acc.data.data());
    }

    // route entity rows through St, add the codebook rows' own block
    DenseMatrix<T> grad(c, d);
    for (std::size_t p = 0; p < n; ++p)
        for (std::uint64_t e = s.row_ptr[p]; e < s.row_ptr[p + 1]; ++e)
            k.axpy(d, s.weights[e], acc.row(p), grad.row(s.col_idx[e]));
    for (std::size_t q = 0; q < c; ++q) k.axpy(d, T{1}, acc.row(n + q), grad.row(q));
    return grad;
}

template DenseMatrix<float> compose(const SparseAssignment<float>&, const MetaCodebook<float>&);
template DenseMatrix<double> compose(const SparseAssignment<double>&, const MetaCodebook<double>&);
template DenseMatrix<float> compose_batch(const SparseAssignment<float>&,
                                          const MetaCodebook<float>&, std::size_t, std::size_t);
template DenseMatrix<double> compose_batch(const SparseAssignment<double>&,
                                           const MetaCodebook<double>&, std::size_t, std::size_t);
template PropagationState<float> propagate(const ExpandedGraph<float>&, const DenseMatrix<float>&,
                                           const MetaCodebook<float>&, std::size_t, bool);
template PropagationState<double> propagate(const ExpandedGraph<double>&,
                                            const DenseMatrix<double>&,
                                            const MetaCodebook<double>&, std::size_t, bool);
template std::pair<DenseMatrix<float>, DenseMatrix<float>> split(const DenseMatrix<float>&,
                                                                 std::size_t);
template std::pair<DenseMatrix<double>, DenseMatrix<double>> split(const DenseMatrix<double>&,
                                                                   std::size_t);
template DenseMatrix<float> backward(const ExpandedGraph<float>&, const PropagationState<float>&,
                                     const DenseMatrix<float>&, const SparseAssignment<float>&);
template DenseMatrix<double> backward(const ExpandedGraph<double>&,
                                      const PropagationState<double>&, const DenseMatrix<double>&,
                                      const SparseAssignment<double>&);

} // namespace gcflite
