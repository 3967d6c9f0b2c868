#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gcflite/types.hpp"

namespace gcflite {

/// Thin SVD of an m x n matrix: A = U * diag(sigma) * Vt with r = min(m, n),
/// U m x r, sigma descending, Vt r x n.
template <class T>
struct SvdResult {
    DenseMatrix<T> u;
    std::vector<T> sigma;
    DenseMatrix<T> vt;
};

template <class T>
DenseMatrix<T> transpose(const DenseMatrix<T>& a);

/// C = A * B, both dense row-major.
template <class T>
DenseMatrix<T> matmul_nn(const DenseMatrix<T>& a, const DenseMatrix<T>& b);

/// Out = A * B with A sparse (CSR) and B dense.
template <class T>
DenseMatrix<T> spmm(const CsrMatrix<T>& a, const DenseMatrix<T>& b);

/// One-sided Jacobi. Throws if the iteration fails to converge or the
/// result is non-finite.
template <class T>
SvdResult<T> thin_svd(const DenseMatrix<T>& a);

/// Moore-Penrose pseudoinverse. Singular values at or below
/// rcond * sigma_max are treated as zero; rcond must lie in (0, 1).
/// An all-zero input yields the (transposed-shape) zero matrix.
template <class T>
DenseMatrix<T> pinv(const DenseMatrix<T>& a, T rcond);

/// Indices of the k largest values by signed comparison, ties resolved to
/// the lower index. Returned in ascending index order; k >= size returns
/// every index.
template <class T>
std::vector<index_t> row_topk(std::span<const T> values, std::size_t k);

} // namespace gcflite
