#pragma once

#include "gcflite/embedding.hpp"
#include "gcflite/graph.hpp"
#include "gcflite/types.hpp"

namespace gcflite {

/// Dense closed-form assignment: S = h_full * pinv(h_meta). degenerate is
/// set (and S left all-zero) when h_meta has no signal at all.
template <class T>
struct SolveResult {
    DenseMatrix<T> s;   // N x c
    bool degenerate = false;
};

template <class T>
SolveResult<T> solve_assignment(const DenseMatrix<T>& h_full, const DenseMatrix<T>& h_meta,
                                T rcond);

/// One batch of rows against a precomputed pinv(h_meta); equals the same
/// rows of the unbatched solve.
template <class T>
DenseMatrix<T> solve_assignment_batched(const DenseMatrix<T>& h_full_rows,
                                        const DenseMatrix<T>& h_meta_pinv);

/// Keep the top-t entries of each row by signed value, clamp retained
/// negatives to zero, and fall back to uniform 1/t weights when a row
/// retains no mass. Every output row has exactly t slots.
template <class T>
SparseAssignment<T> sparsify(const DenseMatrix<T>& dense_rows, std::size_t t);

template <class T>
struct UpdateResult {
    SparseAssignment<T> assignment;
    ExpandedGraph<T> graph;
    bool degenerate = false;
};

/// The alternating-step assignment refresh: fresh forward pass, split,
/// batched closed-form solve, sparsify, regenerate the expanded graph.
/// The codebook is never touched.
template <class T>
UpdateResult<T> update_round(const CsrMatrix<T>& base_adjacency, const ExpandedGraph<T>& graph,
                             const SparseAssignment<T>& s, const MetaCodebook<T>& codebook,
                             std::size_t L, T rcond, std::size_t batch_rows);

} // namespace gcflite
