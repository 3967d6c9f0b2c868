#include "gcflite/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gcflite/kernels.hpp"
#include "gcflite/parallel.hpp"

namespace gcflite {

template <class T>
DenseMatrix<T> transpose(const DenseMatrix<T>& a) {
    DenseMatrix<T> out(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j)
            out.at(j, i) = a.at(i, j);
    return out;
}

template <class T>
DenseMatrix<T> matmul_nn(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
    require(a.cols == b.rows, "matmul: inner dimensions differ");
    const auto& k = kern::ops<T>();
    DenseMatrix<T> c(a.rows, b.cols);
    parallel_blocks(a.rows, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            T* ci = c.row(i);
            const T* ai = a.row(i);
            for (std::size_t p = 0; p < a.cols; ++p)
                if (ai[p] != T{0}) k.axpy(b.cols, ai[p], b.row(p), ci);
        }
    });
    return c;
}

template <class T>
DenseMatrix<T> spmm(const CsrMatrix<T>& a, const DenseMatrix<T>& b) {
    require(a.cols == b.rows, "spmm: inner dimensions differ");
    const auto& k = kern::ops<T>();
    DenseMatrix<T> c(a.rows, b.cols);
    parallel_blocks(a.rows, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            T* ci = c.row(i);
            for (std::uint64_t e = a.row_ptr[i]; e < a.row_ptr[i + 1]; ++e)
                k.axpy(b.cols, a.values[e], b.row(a.col_idx[e]), ci);
        }
    });
    return c;
}

namespace {

// Columns of an m x n working copy stored contiguously so the Jacobi
// rotations run on unit-stride data.
template <class T>
struct ColMajor {
    std::size_t m = 0, n = 0;
    std::vector<T> data;

    ColMajor(std::size_t m_, std::size_t n_) : m(m_), n(n_), data(m_ * n_, T{0}) {}

    T* col(std::size_t j) { return data.data() + j * m; }
    const T* col(std::size_t j) const { return data.data() + j * m; }
};

// One-sided Jacobi on a tall matrix (m >= n): rotate column pairs until all
// are mutually orthogonal, then read singular values off the column norms.
template <class T>
SvdResult<T> svd_tall(const DenseMatrix<T>& a) {
    const std::size_t m = a.rows, n = a.cols;
    const auto& k = kern::ops<T>();

    ColMajor<T> w(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            w.col(j)[i] = a.at(i, j);

    ColMajor<T> v(n, n);
    for (std::size_t j = 0; j < n; ++j) v.col(j)[j] = T{1};

    const T tol = std::numeric_limits<T>::epsilon() * T{64};
    constexpr int max_sweeps = 60;
    bool converged = (n <= 1);
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        converged = true;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const T app = k.dot(w.col(p), w.col(p), m);
                const T aqq = k.dot(w.col(q), w.col(q), m);
                const T apq = k.dot(w.col(p), w.col(q), m);
                if (app == T{0} || aqq == T{0}) continue;
                if (std::abs(apq) <= tol * std::sqrt(app) * std::sqrt(aqq)) continue;
                converged = false;
                const T tau = (aqq - app) / (T{2} * apq);
                const T t = (tau >= T{0} ? T{1} : T{-1}) /
                            (std::abs(tau) + std::sqrt(T{1} + tau * tau));
                const T c = T{1} / std::sqrt(T{1} + t * t);
                const T s = c * t;
                k.rot(m, w.col(p), w.col(q), c, s);
                k.rot(n, v.col(p), v.col(q), c, s);
            }
        }
    }
    if (!converged)
        throw std::runtime_error("svd: no convergence for " + std::to_string(m) + "x" +
                                 std::to_string(n) + " matrix");

    std::vector<T> sigma(n);
    for (std::size_t j = 0; j < n; ++j)
        sigma[j] = std::sqrt(k.dot(w.col(j), w.col(j), m));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

    SvdResult<T> out;
    out.u = DenseMatrix<T>(m, n);
    out.vt = DenseMatrix<T>(n, n);
    out.sigma.resize(n);
    std::size_t rank = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.sigma[j] = sigma[src];
        for (std::size_t i = 0; i < n; ++i) out.vt.at(j, i) = v.col(src)[i];
        if (sigma[src] > T{0}) {
            const T inv = T{1} / sigma[src];
            for (std::size_t i = 0; i < m; ++i) out.u.at(i, j) = w.col(src)[i] * inv;
            rank = j + 1;
        }
    }

    // Null columns get an orthonormal completion so U keeps full column
    // rank: grow from unit vectors, projecting out what U already spans.
    std::vector<T> cand(m);
    std::size_t next_axis = 0;
    for (std::size_t j = rank; j < n; ++j) {
        while (true) {
            require(next_axis < m, "svd: basis completion exhausted");
            std::fill(cand.begin(), cand.end(), T{0});
            cand[next_axis++] = T{1};
            for (std::size_t p = 0; p < j; ++p) {
                T proj{0};
                for (std::size_t i = 0; i < m; ++i) proj += out.u.at(i, p) * cand[i];
                for (std::size_t i = 0; i < m; ++i) cand[i] -= proj * out.u.at(i, p);
            }
            const T norm = std::sqrt(k.dot(cand.data(), cand.data(), m));
            if (norm > T{0.5}) {
                for (std::size_t i = 0; i < m; ++i) out.u.at(i, j) = cand[i] / norm;
                break;
            }
        }
    }

    if (!all_finite(std::span<const T>(out.u.data)) ||
        !all_finite(std::span<const T>(out.sigma)) ||
        !all_finite(std::span<const T>(out.vt.data)))
        throw std::runtime_error("svd: non-finite result");
    return out;
}

} // namespace

template <class T>
SvdResult<T> thin_svd(const DenseMatrix<T>& a) {
    require(a.rows > 0 && a.cols > 0, "svd: empty matrix");
    require(all_finite(std::span<const T>(a.data)), "svd: non-finite input");
    if (a.rows >= a.cols) return svd_tall(a);
    // Wide input: factor the transpose and swap the roles of U and V.
    SvdResult<T> s = svd_tall(transpose(a));
    SvdResult<T> out;
    out.sigma = std::move(s.sigma);
    out.u = transpose(s.vt);
    out.vt = transpose(s.u);
    return out;
}

template <class T>
DenseMatrix<T> pinv(const DenseMatrix<T>& a, T rcond) {
    require(rcond > T{0} && rcond < T{1}, "pinv: rcond must lie in (0, 1)");
    const SvdResult<T> s = thin_svd(a);
    const std::size_t r = s.sigma.size();
    const T cutoff = s.sigma.empty() ? T{0} : rcond * s.sigma[0];

    // A+ = V * diag(1/sigma_i) * Ut over the singular values above cutoff.
    DenseMatrix<T> v_scaled(a.cols, r);
    for (std::size_t i = 0; i < r; ++i) {
        if (s.sigma[i] <= cutoff) continue;
        const T inv = T{1} / s.sigma[i];
        for (std::size_t j = 0; j < a.cols; ++j) v_scaled.at(j, i) = s.vt.at(i, j) * inv;
    }
    DenseMatrix<T> out = matmul_nn(v_scaled, transpose(s.u));
    if (!all_finite(std::span<const T>(out.data)))
        throw std::runtime_error("pinv: non-finite result");
    return out;
}

template <class T>
std::vector<index_t> row_topk(std::span<const T> values, std::size_t k) {
    const std::size_t n = values.size();
    std::vector<index_t> idx(n);
    std::iota(idx.begin(), idx.end(), index_t{0});
    if (k < n) {
        std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                          [&](index_t a, index_t b) {
                              if (values[a] != values[b]) return values[a] > values[b];
                              return a < b;
                          });
        idx.resize(k);
    }
    std::sort(idx.begin(), idx.end());
    return idx;
}

template DenseMatrix<float> transpose(const DenseMatrix<float>&);
template DenseMatrix<double> transpose(const DenseMatrix<double>&);
template DenseMatrix<float> matmul_nn(const DenseMatrix<float>&, const DenseMatrix<float>&);
template DenseMatrix<double> matmul_nn(const DenseMatrix<double>&, const DenseMatrix<double>&);
template DenseMatrix<float> spmm(const CsrMatrix<float>&, const DenseMatrix<float>&);
template DenseMatrix<double> spmm(const CsrMatrix<double>&, const DenseMatrix<double>&);
template SvdResult<float> thin_svd(const DenseMatrix<float>&);
template SvdResult<double> thin_svd(const DenseMatrix<double>&);
template DenseMatrix<float> pinv(const DenseMatrix<float>&, float);
template DenseMatrix<double> pinv(const DenseMatrix<double>&, double);
template std::vector<index_t> row_topk(std::span<const float>, std::size_t);
template std::vector<index_t> row_topk(std::span<const double>, std::size_t);

} // namespace gcflite
