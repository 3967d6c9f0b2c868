#pragma once

#include <utility>
#include <vector>

#include "gcflite/dataset.hpp"
#include "gcflite/types.hpp"

namespace gcflite {

/// Interaction adjacency augmented with c virtual meta-embedding nodes:
/// block layout [[A, S], [St, 0]], kept alongside its symmetric
/// degree-normalized form. Rebuilt from scratch whenever S changes.
template <class T>
struct ExpandedGraph {
    std::size_t n_entities = 0;   // N
    std::size_t n_codes = 0;      // c
    CsrMatrix<T> adjacency;       // (N+c) x (N+c)
    CsrMatrix<T> normalized;
    std::vector<T> degrees;
};

/// N x N symmetric [[0, R], [Rt, 0]] over train interactions, unit weights.
/// Users occupy rows [0, n_users), items [n_users, N).
template <class T>
CsrMatrix<T> build_adjacency(const InteractionDataset& data);

/// Symmetric degree normalization: entry (p, q) becomes
/// a[p,q] / sqrt(deg(p) * deg(q)). Zero-degree rows and columns stay zero;
/// the sparsity pattern is preserved entry for entry.
template <class T>
std::pair<CsrMatrix<T>, std::vector<T>> normalize(const CsrMatrix<T>& a);

/// Attach assignment edges to the entity adjacency and normalize. Negative
/// assignment weights are an error (degrees must stay non-negative).
template <class T>
ExpandedGraph<T> expand_adjacency(const CsrMatrix<T>& a, const SparseAssignment<T>& s);

} // namespace gcflite
