#include <cmath>

#include <doctest.h>
#include <gcflite/graph.hpp>

#include "support/synth.hpp"

using namespace gcflite;

namespace {

// 2 users, 2 items: u0-i0, u0-i1, u1-i1. Items are entities 2 and 3.
InteractionDataset tiny_data() {
    InteractionDataset d;
    d.n_users = 2;
    d.n_items = 2;
    d.train = {{0, 1}, {1}};
    d.test = {{}, {}};
    return d;
}

template <class T>
T entry(const CsrMatrix<T>& a, std::size_t p, std::size_t q) {
    for (std::uint64_t e = a.row_ptr[p]; e < a.row_ptr[p + 1]; ++e)
        if (a.col_idx[e] == q) return a.values[e];
    return T{0};
}

template <class T>
SparseAssignment<T> make_assignment(std::size_t n, std::size_t c, std::size_t t,
                                    const std::vector<std::vector<std::pair<index_t, T>>>& rows) {
    SparseAssignment<T> s;
    s.n_entities = n;
    s.n_codes = c;
    s.t = t;
    s.row_ptr.assign(n + 1, 0);
    for (std::size_t p = 0; p < n; ++p) {
        for (auto [q, w] : rows[p]) {
            s.col_idx.push_back(q);
            s.weights.push_back(w);
        }
        s.row_ptr[p + 1] = s.col_idx.size();
    }
    s.refresh_anchors();
    s.validate();
    return s;
}

} // namespace

TEST_CASE("build_adjacency lays out the bipartite blocks") {
    auto a = build_adjacency<double>(tiny_data());
    a.validate();
    CHECK(a.rows == 4);
    CHECK(a.cols == 4);
    CHECK(a.nnz() == 6);

    CHECK(entry(a, 0, 2) == 1.0);
    CHECK(entry(a, 0, 3) == 1.0);
    CHECK(entry(a, 1, 3) == 1.0);
    CHECK(entry(a, 2, 0) == 1.0);
    CHECK(entry(a, 3, 0) == 1.0);
    CHECK(entry(a, 3, 1) == 1.0);

    // nothing inside the user-user or item-item blocks
    CHECK(entry(a, 0, 1) == 0.0);
    CHECK(entry(a, 2, 3) == 0.0);
    for (std::size_t p = 0; p < 4; ++p) CHECK(entry(a, p, p) == 0.0);
}

TEST_CASE("normalize matches the hand-worked degrees") {
    auto a = build_adjacency<double>(tiny_data());
    auto [norm, deg] = normalize(a);
    norm.validate();

    CHECK(deg == std::vector<double>{2, 1, 1, 2});
    CHECK(entry(norm, 0, 2) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(entry(norm, 0, 3) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(entry(norm, 1, 3) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));

    for (std::size_t p = 0; p < 4; ++p)
        for (std::size_t q = 0; q < 4; ++q) CHECK(entry(norm, p, q) == entry(norm, q, p));
}

TEST_CASE("normalize keeps the pattern and zero rows") {
    // node 2 is isolated; edge 0-1 carries an explicit zero weight
    CsrMatrix<double> a(3, 3);
    a.col_idx = {1, 0};
    a.values = {0.0, 0.0};
    a.row_ptr = {0, 1, 2, 2};
    a.validate();

    auto [norm, deg] = normalize(a);
    CHECK(deg == std::vector<double>{0, 0, 0});
    CHECK(norm.nnz() == a.nnz());
    CHECK(norm.col_idx == a.col_idx);
    CHECK(norm.values == std::vector<double>{0.0, 0.0});
}

TEST_CASE("normalized rows satisfy the degree identity") {
    // sum_q norm[p,q] * sqrt(deg q) == sqrt(deg p) for unit-weight graphs
    auto data = synth::planted_blocks(3, 10, 12, 0.4, 0.0, 7);
    auto a = build_adjacency<double>(data);
    auto [norm, deg] = normalize(a);
    for (std::size_t p = 0; p < norm.rows; ++p) {
        double acc = 0.0;
        for (std::uint64_t e = norm.row_ptr[p]; e < norm.row_ptr[p + 1]; ++e)
            acc += norm.values[e] * std::sqrt(deg[norm.col_idx[e]]);
        CHECK(acc == doctest::Approx(std::sqrt(deg[p])).epsilon(1e-12));
    }
}

TEST_CASE("expand_adjacency places the assignment blocks") {
    auto a = build_adjacency<double>(tiny_data());
    auto s = make_assignment<double>(4, 2, 1,
                                     {{{0, 1.0}}, {{0, 0.5}}, {{1, 1.0}}, {{1, 0.25}}});
    auto g = expand_adjacency(a, s);
    g.adjacency.validate();
    g.normalized.validate();

    CHECK(g.n_entities == 4);
    CHECK(g.n_codes == 2);
    CHECK(g.adjacency.rows == 6);
    CHECK(g.adjacency.nnz() == a.nnz() + 2 * s.nnz());

    // top-left block is the original adjacency
    for (std::size_t p = 0; p < 4; ++p)
        for (std::size_t q = 0; q < 4; ++q)
            CHECK(entry(g.adjacency, p, q) == entry(a, p, q));

    // top-right block recovers S, bottom-left its transpose
    const double expected[4][2] = {{1.0, 0}, {0.5, 0}, {0, 1.0}, {0, 0.25}};
    for (std::size_t p = 0; p < 4; ++p)
        for (std::size_t q = 0; q < 2; ++q) {
            CHECK(entry(g.adjacency, p, 4 + q) == expected[p][q]);
            CHECK(entry(g.adjacency, 4 + q, p) == expected[p][q]);
        }

    // meta-meta block stays empty
    for (std::size_t p = 4; p < 6; ++p)
        for (std::uint64_t e = g.adjacency.row_ptr[p]; e < g.adjacency.row_ptr[p + 1]; ++e)
            CHECK(g.adjacency.col_idx[e] < 4);

    // degrees include the assignment weights
    CHECK(g.degrees[0] == doctest::Approx(3.0));     // 2 interactions + 1.0
    CHECK(g.degrees[1] == doctest::Approx(1.5));
    CHECK(g.degrees[4] == doctest::Approx(1.5));     // code 0: 1.0 + 0.5
    CHECK(g.degrees[5] == doctest::Approx(1.25));

    // normalization is consistent with those degrees
    CHECK(entry(g.normalized, 0, 4) ==
          doctest::Approx(1.0 / std::sqrt(3.0 * 1.5)).epsilon(1e-14));
    for (std::size_t p = 0; p < 6; ++p)
        for (std::size_t q = 0; q < 6; ++q)
            CHECK(entry(g.normalized, p, q) == doctest::Approx(entry(g.normalized, q, p)));
}

TEST_CASE("expand_adjacency keeps structural zero assignments") {
    auto a = build_adjacency<double>(tiny_data());
    auto s = make_assignment<double>(4, 2, 1,
                                     {{{0, 1.0}}, {{0, 0.0}}, {{1, 1.0}}, {{1, 1.0}}});
    auto g = expand_adjacency(a, s);
    CHECK(g.adjacency.nnz() == a.nnz() + 2 * s.nnz());
    CHECK(entry(g.adjacency, 1, 4) == 0.0);
    bool found = false;
    for (std::uint64_t e = g.adjacency.row_ptr[1]; e < g.adjacency.row_ptr[2]; ++e)
        if (g.adjacency.col_idx[e] == 4) found = true;
    CHECK(found);   // the zero edge is still structurally present
}

TEST_CASE("expand_adjacency rejects bad inputs") {
    auto a = build_adjacency<double>(tiny_data());
    auto s = make_assignment<double>(4, 2, 1,
                                     {{{0, 1.0}}, {{0, 1.0}}, {{1, 1.0}}, {{1, 1.0}}});

    SUBCASE("negative weight") {
        s.weights[2] = -0.5;
        CHECK_THROWS_WITH_AS(expand_adjacency(a, s), doctest::Contains("negative"),
                             std::invalid_argument);
    }
    SUBCASE("entity count mismatch") {
        s.n_entities = 3;
        s.row_ptr.pop_back();
        CHECK_THROWS_AS(expand_adjacency(a, s), std::invalid_argument);
    }
    SUBCASE("non-square adjacency") {
        a.cols = 5;
        CHECK_THROWS_AS(expand_adjacency(a, s), std::invalid_argument);
    }
}
