#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include <gcflite/dataset.hpp>
#include <gcflite/rng.hpp>
#include <gcflite/types.hpp>

// Planted-structure inputs shared across the test binaries.
namespace synth {

using gcflite::index_t;

inline void shuffle(std::vector<index_t>& v, gcflite::Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

// Symmetric unit-weight graph from an undirected edge list.
template <class T = double>
gcflite::CsrMatrix<T> graph_from_edges(std::size_t n,
                                       const std::vector<std::pair<index_t, index_t>>& edges) {
    std::vector<std::vector<index_t>> adj(n);
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    gcflite::CsrMatrix<T> a(n, n);
    for (std::size_t p = 0; p < n; ++p) {
        std::sort(adj[p].begin(), adj[p].end());
        for (index_t q : adj[p]) a.col_idx.push_back(q);
        a.row_ptr[p + 1] = a.col_idx.size();
    }
    a.values.assign(a.col_idx.size(), T{1});
    return a;
}

// k disjoint cliques of `size` nodes each; block b owns [b*size, (b+1)*size).
template <class T = double>
gcflite::CsrMatrix<T> disjoint_cliques(std::size_t k, std::size_t size) {
    std::vector<std::pair<index_t, index_t>> edges;
    for (std::size_t b = 0; b < k; ++b)
        for (std::size_t i = 0; i < size; ++i)
            for (std::size_t j = i + 1; j < size; ++j)
                edges.emplace_back(index_t(b * size + i), index_t(b * size + j));
    return graph_from_edges<T>(k * size, edges);
}

// Block-diagonal interaction data: users and items fall into k aligned
// blocks and a user only ever touches items of its own block, each with
// probability intra_prob (at least two per user so the test split works).
// test_fraction of each user's items moves to the held-out set.
inline gcflite::InteractionDataset planted_blocks(std::size_t k, std::size_t users_per_block,
                                                  std::size_t items_per_block, double intra_prob,
                                                  double test_fraction, std::uint64_t seed) {
    gcflite::InteractionDataset d;
    d.n_users = k * users_per_block;
    d.n_items = k * items_per_block;
    d.train.resize(d.n_users);
    d.test.resize(d.n_users);
    gcflite::Rng rng(gcflite::mix64(seed, 0x504c414e));
    for (std::size_t u = 0; u < d.n_users; ++u) {
        const std::size_t b = u / users_per_block;
        const index_t base = index_t(b * items_per_block);
        std::vector<char> chosen(items_per_block, 0);
        std::size_t count = 0;
        for (std::size_t j = 0; j < items_per_block; ++j)
            if (rng.uniform() < intra_prob) {
                chosen[j] = 1;
                ++count;
            }
        while (count < 2) {
            const std::size_t j = rng.below(items_per_block);
            if (!chosen[j]) {
                chosen[j] = 1;
                ++count;
            }
        }
        std::vector<index_t> items;
        for (std::size_t j = 0; j < items_per_block; ++j)
            if (chosen[j]) items.push_back(base + index_t(j));
        shuffle(items, rng);
        std::size_t n_test = 0;
        if (test_fraction > 0.0) {
            n_test = std::max<std::size_t>(1, std::size_t(test_fraction * double(items.size())));
            n_test = std::min(n_test, items.size() - 1);
        }
        d.test[u].assign(items.begin(), items.begin() + n_test);
        d.train[u].assign(items.begin() + n_test, items.end());
        std::sort(d.test[u].begin(), d.test[u].end());
        std::sort(d.train[u].begin(), d.train[u].end());
    }
    return d;
}

// Planted communities with a per-user leaning: every user draws most items
// from its own block and the rest from one secondary block, with a mixture
// ratio of its own. Ranking the held-out items well therefore needs
// per-user assignment weights, not just community membership.
inline gcflite::InteractionDataset mixed_blocks(std::size_t k, std::size_t users_per_block,
                                                std::size_t items_per_block,
                                                std::size_t items_per_user, double test_fraction,
                                                std::uint64_t seed) {
    gcflite::InteractionDataset d;
    d.n_users = k * users_per_block;
    d.n_items = k * items_per_block;
    d.train.resize(d.n_users);
    d.test.resize(d.n_users);
    gcflite::Rng rng(gcflite::mix64(seed, 0x4d495845));
    for (std::size_t u = 0; u < d.n_users; ++u) {
        const std::size_t primary = u / users_per_block;
        std::size_t secondary = rng.below(k - 1);
        if (secondary >= primary) ++secondary;
        const double lean = rng.uniform(0.55, 0.9);
        std::vector<char> taken(d.n_items, 0);
        std::vector<index_t> items;
        while (items.size() < items_per_user) {
            const std::size_t b = rng.uniform() < lean ? primary : secondary;
            const auto item = index_t(b * items_per_block + rng.below(items_per_block));
            if (!taken[item]) {
                taken[item] = 1;
                items.push_back(item);
            }
        }
        shuffle(items, rng);
        std::size_t n_test = std::max<std::size_t>(1, std::size_t(test_fraction * double(items.size())));
        n_test = std::min(n_test, items.size() - 1);
        d.test[u].assign(items.begin(), items.begin() + n_test);
        d.train[u].assign(items.begin() + n_test, items.end());
        std::sort(d.test[u].begin(), d.test[u].end());
        std::sort(d.train[u].begin(), d.train[u].end());
    }
    return d;
}

} // namespace synth
