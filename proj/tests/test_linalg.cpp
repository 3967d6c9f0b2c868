#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "gcflite/linalg.hpp"
#include "gcflite/rng.hpp"
#include "support/oracles.hpp"

using namespace gcflite;

namespace {

template <class T>
CsrMatrix<T> random_csr(Rng& rng, std::size_t rows, std::size_t cols, double density) {
    CsrMatrix<T> m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j)
            if (rng.uniform() < density) {
                m.col_idx.push_back(static_cast<index_t>(j));
                m.values.push_back(static_cast<T>(rng.uniform(-2.0, 2.0)));
            }
        m.row_ptr[i + 1] = m.col_idx.size();
    }
    m.validate();
    return m;
}

template <class T>
void check_orthonormal_cols(const DenseMatrix<T>& m, double tol) {
    const auto md = oracle::widen(m);
    gcflite::DenseMatrix<double> mt(md.cols, md.rows);
    for (std::size_t i = 0; i < md.rows; ++i)
        for (std::size_t j = 0; j < md.cols; ++j) mt.at(j, i) = md.at(i, j);
    const auto gram = oracle::matmul(mt, md);
    for (std::size_t i = 0; i < gram.rows; ++i)
        for (std::size_t j = 0; j < gram.cols; ++j)
            CHECK(std::abs(gram.at(i, j) - (i == j ? 1.0 : 0.0)) <= tol);
}

template <class T>
void check_svd(const DenseMatrix<T>& a, double tol) {
    const auto s = thin_svd(a);
    const std::size_t r = std::min(a.rows, a.cols);
    REQUIRE(s.sigma.size() == r);
    REQUIRE(s.u.rows == a.rows);
    REQUIRE(s.u.cols == r);
    REQUIRE(s.vt.rows == r);
    REQUIRE(s.vt.cols == a.cols);

    for (std::size_t i = 0; i < r; ++i) {
        CHECK(s.sigma[i] >= T{0});
        if (i > 0) CHECK(s.sigma[i - 1] >= s.sigma[i]);
    }

    // reconstruction against the dense oracle
    auto us = oracle::widen(s.u);
    for (std::size_t i = 0; i < us.rows; ++i)
        for (std::size_t j = 0; j < r; ++j) us.at(i, j) *= static_cast<double>(s.sigma[j]);
    const auto rec = oracle::matmul(us, oracle::widen(s.vt));
    const double scale = std::max(1.0, static_cast<double>(s.sigma.empty() ? 0 : s.sigma[0]));
    CHECK(oracle::max_abs_diff(rec, oracle::widen(a)) <= tol * scale);

    check_orthonormal_cols(s.u, tol);
    check_orthonormal_cols(transpose(s.vt), tol);
}

template <class T>
void check_penrose(const DenseMatrix<T>& a, const DenseMatrix<T>& p, double tol) {
    const auto ad = oracle::widen(a);
    const auto pd = oracle::widen(p);
    const auto apa = oracle::matmul(oracle::matmul(ad, pd), ad);
    const auto pap = oracle::matmul(oracle::matmul(pd, ad), pd);
    CHECK(oracle::max_abs_diff(apa, ad) <= tol);
    CHECK(oracle::max_abs_diff(pap, pd) <= tol);
    const auto ap = oracle::matmul(ad, pd);
    const auto pa = oracle::matmul(pd, ad);
    for (std::size_t i = 0; i < ap.rows; ++i)
        for (std::size_t j = 0; j < ap.cols; ++j)
            CHECK(std::abs(ap.at(i, j) - ap.at(j, i)) <= tol);
    for (std::size_t i = 0; i < pa.rows; ++i)
        for (std::size_t j = 0; j < pa.cols; ++j)
            CHECK(std::abs(pa.at(i, j) - pa.at(j, i)) <= tol);
}

} // namespace

TEST_CASE("transpose") {
    DenseMatrix<double> a(2, 3);
    a.data = {1, 2, 3, 4, 5, 6};
    const auto at = transpose(a);
    REQUIRE(at.rows == 3);
    REQUIRE(at.cols == 2);
    CHECK(at.at(0, 1) == 4);
    CHECK(at.at(2, 0) == 3);
    CHECK(oracle::max_abs_diff(oracle::widen(transpose(at)), oracle::widen(a)) == 0.0);
}

TEST_CASE("matmul matches the triple-loop oracle") {
    Rng rng(11);
    const std::pair<std::size_t, std::size_t> dims[] = {{1, 1}, {2, 3}, {5, 5}, {17, 9}, {64, 32}};
    for (auto [m, k] : dims) {
        const std::size_t n = (k % 2) ? k + 4 : 8;
        const auto a = oracle::random_matrix<double>(rng, m, k);
        const auto b = oracle::random_matrix<double>(rng, k, n);
        const auto got = matmul_nn(a, b);
        CHECK(oracle::max_abs_diff(oracle::widen(got), oracle::matmul(a, b)) <= 1e-12);

        const auto af = oracle::random_matrix<float>(rng, m, k);
        const auto bf = oracle::random_matrix<float>(rng, k, n);
        const auto gotf = matmul_nn(af, bf);
        CHECK(oracle::max_abs_diff(oracle::widen(gotf),
                                   oracle::matmul(oracle::widen(af), oracle::widen(bf))) <= 1e-4);
    }
    CHECK_THROWS(matmul_nn(DenseMatrix<double>(2, 3), DenseMatrix<double>(4, 2)));
}

TEST_CASE("spmm matches densify + oracle matmul") {
    Rng rng(13);
    for (double density : {0.0, 0.05, 0.3, 1.0}) {
        const auto a = random_csr<double>(rng, 23, 17, density);
        const auto b = oracle::random_matrix<double>(rng, 17, 9);
        const auto got = spmm(a, b);
        CHECK(oracle::max_abs_diff(oracle::widen(got),
                                   oracle::matmul(oracle::densify(a), b)) <= 1e-12);
    }
    CHECK_THROWS(spmm(CsrMatrix<double>(3, 5), DenseMatrix<double>(4, 2)));
}

TEST_CASE("row_topk agrees with the stable-sort oracle") {
    Rng rng(17);
    for (int round = 0; round < 50; ++round) {
        const std::size_t n = 1 + rng.below(40);
        std::vector<double> vals(n);
        // coarse values force ties
        for (auto& v : vals) v = static_cast<double>(rng.below(6)) - 2.0;
        const std::size_t k = rng.below(n + 3);
        CHECK(row_topk(std::span<const double>(vals), k) == oracle::topk(vals, k));
    }
}

TEST_CASE("row_topk picks by signed value with ties to the lower index") {
    const std::vector<double> v{5, 3, 5, 1};
    CHECK(row_topk(std::span<const double>(v), 2) == std::vector<index_t>{0, 2});
    CHECK(row_topk(std::span<const double>(v), 0).empty());
    CHECK(row_topk(std::span<const double>(v), 9) == std::vector<index_t>{0, 1, 2, 3});
    const std::vector<double> neg{-1, -5, -2};
    CHECK(row_topk(std::span<const double>(neg), 1) == std::vector<index_t>{0});
}

TEST_CASE("thin_svd reconstructs random matrices") {
    Rng rng(23);
    const std::pair<std::size_t, std::size_t> shapes[] = {
        {1, 1}, {5, 3}, {3, 5}, {50, 16}, {16, 50}, {64, 64}, {500, 128}};
    for (auto [m, n] : shapes) {
        check_svd(oracle::random_matrix<double>(rng, m, n), 1e-10);
        check_svd(oracle::random_matrix<float>(rng, m, n), 5e-4);
    }
}

TEST_CASE("singular values match the symmetric eigen-oracle") {
    Rng rng(29);
    const auto a = oracle::random_matrix<double>(rng, 6, 4);
    const auto ad = oracle::widen(a);
    gcflite::DenseMatrix<double> at(4, 6);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 4; ++j) at.at(j, i) = ad.at(i, j);
    const auto eig = oracle::sym_eigenvalues(oracle::matmul(at, ad));
    const auto s = thin_svd(a);
    REQUIRE(s.sigma.size() == 4);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(s.sigma[i] == doctest::Approx(std::sqrt(std::max(0.0, eig[i]))).epsilon(1e-8));
}

TEST_CASE("thin_svd handles rank deficiency and zero matrices") {
    Rng rng(31);
    auto a = oracle::random_matrix<double>(rng, 8, 4);
    for (std::size_t i = 0; i < 8; ++i) a.at(i, 3) = a.at(i, 1);
    check_svd(a, 1e-10);
    CHECK(thin_svd(a).sigma.back() <= 1e-10);

    const DenseMatrix<double> z(6, 3);
    const auto s = thin_svd(z);
    for (double sv : s.sigma) CHECK(sv == 0.0);
    check_orthonormal_cols(s.u, 1e-12);

    DenseMatrix<double> bad(2, 2);
    bad.data = {1.0, std::nan(""), 0.0, 1.0};
    CHECK_THROWS(thin_svd(bad));
    CHECK_THROWS(thin_svd(DenseMatrix<double>{}));
}

TEST_CASE("pinv satisfies the four Penrose conditions") {
    Rng rng(37);
    const std::pair<std::size_t, std::size_t> shapes[] = {{5, 3}, {3, 5}, {50, 16}};
    for (auto [m, n] : shapes) {
        const auto a = oracle::random_matrix<double>(rng, m, n);
        const auto p = pinv(a, 1e-10);
        REQUIRE(p.rows == n);
        REQUIRE(p.cols == m);
        check_penrose(a, p, 1e-9);
    }

    // rank-deficient square case: random rank-8 inside 20x20
    const auto f1 = oracle::random_matrix<double>(rng, 20, 8);
    const auto f2 = oracle::random_matrix<double>(rng, 8, 20);
    DenseMatrix<double> a(20, 20);
    const auto prod = oracle::matmul(f1, f2);
    a.data = prod.data;
    check_penrose(a, pinv(a, 1e-10), 1e-8);
}

TEST_CASE("pinv of an invertible matrix is its inverse") {
    DenseMatrix<double> a(2, 2);
    a.data = {4, 7, 2, 6};
    const auto p = pinv(a, 1e-12);
    CHECK(p.at(0, 0) == doctest::Approx(0.6).epsilon(1e-10));
    CHECK(p.at(0, 1) == doctest::Approx(-0.7).epsilon(1e-10));
    CHECK(p.at(1, 0) == doctest::Approx(-0.2).epsilon(1e-10));
    CHECK(p.at(1, 1) == doctest::Approx(0.4).epsilon(1e-10));
}

TEST_CASE("pinv truncates singular values at rcond * sigma_max") {
    DenseMatrix<double> a(2, 2);
    a.data = {1.0, 0.0, 0.0, 1e-12};
    const auto p = pinv(a, 1e-6);
    CHECK(p.at(0, 0) == doctest::Approx(1.0));
    CHECK(p.at(1, 1) == 0.0);

    const DenseMatrix<double> z(3, 2);
    const auto pz = pinv(z, 1e-10);
    REQUIRE(pz.rows == 2);
    REQUIRE(pz.cols == 3);
    CHECK(oracle::max_abs(pz) == 0.0);

    CHECK_THROWS(pinv(a, 0.0));
    CHECK_THROWS(pinv(a, 1.0));
    CHECK_THROWS(pinv(a, -0.5));
}

TEST_CASE("svd and matmul are bitwise deterministic across calls") {
    Rng rng(41);
    const auto a = oracle::random_matrix<double>(rng, 30, 12);
    const auto s1 = thin_svd(a);
    const auto s2 = thin_svd(a);
    CHECK(s1.u.data == s2.u.data);
    CHECK(s1.sigma == s2.sigma);
    CHECK(s1.vt.data == s2.vt.data);

    const auto b = oracle::random_matrix<double>(rng, 12, 7);
    CHECK(matmul_nn(a, b).data == matmul_nn(a, b).data);
}
