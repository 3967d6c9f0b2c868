#pragma once

#include <utility>
#include <vector>

#include "gcflite/graph.hpp"
#include "gcflite/types.hpp"

namespace gcflite {

/// Forward-pass record: per-layer node embeddings (optional) and their
/// mean pool. layers[0] stacks the composed entity rows over the codebook.
template <class T>
struct PropagationState {
    std::vector<DenseMatrix<T>> layers;   // L+1 entries when retained
    DenseMatrix<T> pooled;                // (N+c) x d
    std::size_t L = 0;
};

/// Entity embeddings from the codebook: row p = sum_q s[p,q] * codebook[q].
template <class T>
DenseMatrix<T> compose(const SparseAssignment<T>& s, const MetaCodebook<T>& codebook);

/// Rows [row_begin, row_end) of compose, computed without materializing the
/// rest. Equals the corresponding slice of the full result.
template <class T>
DenseMatrix<T> compose_batch(const SparseAssignment<T>& s, const MetaCodebook<T>& codebook,
                             std::size_t row_begin, std::size_t row_end);

/// L rounds of normalized-adjacency message passing over [entities; codes],
/// mean-pooled across all L+1 layers. keep_layers=false skips retaining the
/// per-layer matrices (the pooled output is all later stages need, since
/// the map is linear).
template <class T>
PropagationState<T> propagate(const ExpandedGraph<T>& graph, const DenseMatrix<T>& compose_out,
                              const MetaCodebook<T>& codebook, std::size_t L,
                              bool keep_layers = true);

/// (entity rows, code rows) of a pooled matrix.
template <class T>
std::pair<DenseMatrix<T>, DenseMatrix<T>> split(const DenseMatrix<T>& pooled, std::size_t n);

/// Exact adjoint of the forward map: gradient of <grad_pooled, pooled>
/// with respect to the codebook. The forward pass is linear in the
/// codebook, so no retained activations are consulted beyond state.L.
template <class T>
DenseMatrix<T> backward(const ExpandedGraph<T>& graph, const PropagationState<T>& state,
                        const DenseMatrix<T>& grad_pooled, const SparseAssignment<T>& s);

} // namespace gcflite
