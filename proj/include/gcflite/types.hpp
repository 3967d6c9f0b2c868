#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gcflite/common.hpp"

namespace gcflite {

/// Row-major dense matrix.
template <class T>
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, T{0}) {}

    T* row(std::size_t i) { return data.data() + i * cols; }
    const T* row(std::size_t i) const { return data.data() + i * cols; }

    T& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    const T& at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<T> row_span(std::size_t i) { return {row(i), cols}; }
    std::span<const T> row_span(std::size_t i) const { return {row(i), cols}; }

    void fill(T v) { std::fill(data.begin(), data.end(), v); }
};

/// Compressed sparse row matrix. Entries within a row are kept sorted by
/// column; values may be zero (structural entries survive normalization).
template <class T>
struct CsrMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint64_t> row_ptr;   // size rows + 1
    std::vector<index_t> col_idx;
    std::vector<T> values;

    CsrMatrix() = default;
    CsrMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), row_ptr(r + 1, 0) {}

    std::size_t nnz() const { return col_idx.size(); }

    /// Throws if the structure is inconsistent (monotone row_ptr, columns in
    /// range and strictly increasing within each row, matching array sizes).
    void validate() const {
        require(row_ptr.size() == rows + 1, "csr: row_ptr size mismatch");
        require(row_ptr.front() == 0, "csr: row_ptr must start at 0");
        require(row_ptr.back() == col_idx.size(), "csr: row_ptr end mismatch");
        require(col_idx.size() == values.size(), "csr: col/value size mismatch");
        for (std::size_t i = 0; i < rows; ++i) {
            require(row_ptr[i] <= row_ptr[i + 1], "csr: row_ptr not monotone");
            for (std::uint64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
                require(col_idx[k] < cols, "csr: column out of range");
                if (k > row_ptr[i])
                    require(col_idx[k - 1] < col_idx[k], "csr: columns not sorted");
            }
        }
    }
};

/// The shared table of c meta-embedding rows, each of width d.
template <class T>
struct MetaCodebook {
    DenseMatrix<T> rows;   // c x d

    std::size_t size() const { return rows.rows; }
    std::size_t dim() const { return rows.cols; }
};

/// Sparse assignment of entities to codebook rows: every entity keeps at
/// most t weighted slots. Rows are stored CSR-style with columns sorted.
/// anchor[i] is the dominant slot of row i (ties resolve to the lowest
/// column); it is derived from the weights, so serialization skips it.
template <class T>
struct SparseAssignment {
    std::size_t n_entities = 0;
    std::size_t n_codes = 0;    // c
    std::size_t t = 0;          // per-row slot budget
    std::vector<std::uint64_t> row_ptr;
    std::vector<index_t> col_idx;
    std::vector<T> weights;
    std::vector<index_t> anchor;

    std::size_t nnz() const { return col_idx.size(); }

    /// Index/weight slots held, the footprint that replaces one full
    /// embedding row per entity.
    std::size_t storage_slots() const { return col_idx.size() + weights.size(); }

    CsrMatrix<T> to_csr() const {
        CsrMatrix<T> m(n_entities, n_codes);
        m.row_ptr = row_ptr;
        m.col_idx = col_idx;
        m.values = weights;
        return m;
    }

    /// Recompute anchors from the stored weights (max weight, ties to the
    /// lowest column). Rows with no entries keep anchor 0.
    void refresh_anchors() {
        anchor.assign(n_entities, 0);
        for (std::size_t i = 0; i < n_entities; ++i) {
            const std::uint64_t lo = row_ptr[i], hi = row_ptr[i + 1];
            if (lo == hi) continue;
            std::uint64_t best = lo;
            for (std::uint64_t k = lo + 1; k < hi; ++k)
                if (weights[k] > weights[best]) best = k;
            anchor[i] = col_idx[best];
        }
    }

    void validate() const {
        require(row_ptr.size() == n_entities + 1, "assignment: row_ptr size mismatch");
        require(row_ptr.front() == 0, "assignment: row_ptr must start at 0");
        require(row_ptr.back() == col_idx.size(), "assignment: row_ptr end mismatch");
        require(col_idx.size() == weights.size(), "assignment: col/weight size mismatch");
        require(anchor.size() == n_entities, "assignment: anchor size mismatch");
        for (std::size_t i = 0; i < n_entities; ++i) {
            const std::uint64_t lo = row_ptr[i], hi = row_ptr[i + 1];
            require(hi - lo <= t, "assignment: row exceeds slot budget");
            for (std::uint64_t k = lo; k < hi; ++k) {
                require(col_idx[k] < n_codes, "assignment: column out of range");
                if (k > lo)
                    require(col_idx[k - 1] < col_idx[k], "assignment: columns not sorted");
            }
        }
    }
};

} // namespace gcflite
