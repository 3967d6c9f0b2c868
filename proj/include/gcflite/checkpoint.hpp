#pragma once

#include <cstdint>
#include <string>

#include "gcflite/common.hpp"
#include "gcflite/types.hpp"

namespace gcflite {

/// Everything needed to resume or evaluate a run. Serialized little-endian
/// as four blobs plus a trailer:
///   codebook   header {magic "GCFL", version u32, c u32, d u32, width u8}
///              then c*d row-major scalars
///   assignment header {N u32, c u32, t u32, nnz u64}
///              then nnz triplets {row u32, col u32, weight f64}
///   adam_m, adam_v  codebook-format blobs
///   trailer    {step u64, epoch u32, phase u8, L u32}
template <class T>
struct Checkpoint {
    MetaCodebook<T> codebook;
    SparseAssignment<T> assignment;
    DenseMatrix<T> adam_m;
    DenseMatrix<T> adam_v;
    std::uint64_t step = 0;
    std::uint32_t epoch = 0;
    Phase phase = Phase::pretrain;
    std::uint32_t layers = 0;
};

template <class T>
void save_checkpoint(const std::string& path, const Checkpoint<T>& ck);

/// Throws on bad magic, unsupported version, scalar-width mismatch with T,
/// inconsistent dimensions, or truncation.
template <class T>
Checkpoint<T> load_checkpoint(const std::string& path);

/// Scalar width (32 or 64) recorded in a checkpoint or embedding file,
/// without loading it. Lets the caller pick the right instantiation.
int peek_scalar_width(const std::string& path);

/// Standalone codebook-format blob holding an arbitrary matrix; used for
/// exported entity embeddings.
template <class T>
void save_embedding_blob(const std::string& path, const DenseMatrix<T>& m);

template <class T>
DenseMatrix<T> load_embedding_blob(const std::string& path);

} // namespace gcflite
