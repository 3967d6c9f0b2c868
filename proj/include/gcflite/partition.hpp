#pragma once

#include <cstdint>
#include <vector>

#include "gcflite/types.hpp"

namespace gcflite {

struct Partitioning {
    std::size_t num_parts = 0;
    std::vector<index_t> labels;          // entity -> part
    std::vector<std::size_t> part_sizes;  // length num_parts
};

/// Balanced k-way partitioning of a symmetric graph by the multilevel
/// scheme: heavy-edge-matching coarsening, greedy region growing on the
/// coarsest graph, then boundary refinement while uncoarsening. Guarantees:
/// deterministic for fixed (a, c, seed); every part non-empty when n >= c;
/// max part size <= balance_factor * ceil(n/c).
template <class T>
Partitioning partition_graph(const CsrMatrix<T>& a, std::size_t c, std::uint64_t seed,
                             double balance_factor = 1.05);

/// Seeded uniform shuffle into c equal buckets; the structure-blind
/// baseline the partitioner is compared against.
Partitioning random_partition(std::size_t n, std::size_t c, std::uint64_t seed);

/// Community-based assignment rows: entity p gets its part label as anchor
/// with weight w_star plus t-1 distinct uniformly drawn companions sharing
/// the remaining mass. t = 1 forces the anchor weight to 1.
template <class T>
SparseAssignment<T> init_assignment(const Partitioning& part, std::size_t t, double w_star,
                                    std::uint64_t seed);

/// Total weight of edges whose endpoints live in different parts (each
/// undirected edge counted once).
template <class T>
double edge_cut(const CsrMatrix<T>& a, const std::vector<index_t>& labels);

} // namespace gcflite
