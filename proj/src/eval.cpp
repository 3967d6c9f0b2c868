#include "gcflite/eval.hpp"

#include <algorithm>
#include <cmath>

#include "gcflite/kernels.hpp"
#include "gcflite/parallel.hpp"

namespace gcflite {
namespace {

bool contains(const std::vector<index_t>& sorted, index_t x) {
    return std::binary_search(sorted.begin(), sorted.end(), x);
}

double dcg_weight(std::size_t position) { return 1.0 / std::log2(double(position) + 2.0); }

double ideal_dcg(std::size_t n, std::size_t relevant_count) {
    double idcg = 0.0;
    for (std::size_t i = 0; i < std::min(n, relevant_count); ++i) idcg += dcg_weight(i);
    return idcg;
}

} // namespace

template <class T>
std::vector<index_t> score_all(const DenseMatrix<T>& h, std::size_t n_users, std::size_t n_items,
                               index_t user, const std::vector<index_t>& exclude) {
    require(user < n_users, "score_all: bad user index");
    require(h.rows >= n_users + n_items, "score_all: embedding matrix too small");
    const auto& k = kern::ops<T>();
    const T* hu = h.row(user);

    std::vector<std::pair<T, index_t>> scored;
    scored.reserve(n_items);
    for (std::size_t i = 0; i < n_items; ++i) {
        const auto item = static_cast<index_t>(i);
        if (contains(exclude, item)) continue;
        scored.emplace_back(k.dot(hu, h.row(n_users + i), h.cols), item);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<index_t> ranked(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i) ranked[i] = scored[i].second;
    return ranked;
}

double ndcg_at(const std::vector<index_t>& ranked, const std::vector<index_t>& relevant,
               std::size_t n) {
    if (relevant.empty()) return 0.0;
    double dcg = 0.0;
    for (std::size_t i = 0; i < std::min(n, ranked.size()); ++i)
        if (contains(relevant, ranked[i])) dcg += dcg_weight(i);
    return dcg / ideal_dcg(n, relevant.size());
}

double recall_at(const std::vector<index_t>& ranked, const std::vector<index_t>& relevant,
                 std::size_t n) {
    if (relevant.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < std::min(n, ranked.size()); ++i)
        hits += contains(relevant, ranked[i]) ? 1 : 0;
    return double(hits) / double(relevant.size());
}

template <class T>
RankingResult evaluate_ranking(const DenseMatrix<T>& h, std::size_t n_users, std::size_t n_items,
                               const std::vector<std::vector<index_t>>& exclude,
                               const std::vector<std::vector<index_t>>& relevant) {
    require(exclude.size() == n_users && relevant.size() == n_users,
            "evaluate: per-user list sizes must match n_users");
    constexpr std::size_t kTop = 20;
    const auto& k = kern::ops<T>();

    std::vector<UserMetrics> slots(n_users);
    std::vector<char> active(n_users, 0);
    parallel_blocks(n_users, [&](std::size_t lo, std::size_t hi) {
        std::vector<std::pair<T, index_t>> scored;
        scored.reserve(n_items);
        for (std::size_t u = lo; u < hi; ++u) {
            if (relevant[u].empty()) continue;
            scored.clear();
            const T* hu = h.row(u);
            for (std::size_t i = 0; i < n_items; ++i) {
                const auto item = static_cast<index_t>(i);
                if (contains(exclude[u], item)) continue;
                scored.emplace_back(k.dot(hu, h.row(n_users + i), h.cols), item);
            }
            const std::size_t top = std::min(kTop, scored.size());
            std::partial_sort(scored.begin(), scored.begin() + top, scored.end(),
                              [](const auto& a, const auto& b) {
                                  if (a.first != b.first) return a.first > b.first;
                                  return a.second < b.second;
                              });
            std::vector<index_t> ranked(top);
            for (std::size_t i = 0; i < top; ++i) ranked[i] = scored[i].second;

            UserMetrics& m = slots[u];
            m.user = static_cast<index_t>(u);
            m.ndcg10 = ndcg_at(ranked, relevant[u], 10);
            m.recall10 = recall_at(ranked, relevant[u], 10);
            m.ndcg20 = ndcg_at(ranked, relevant[u], 20);
            m.recall20 = recall_at(ranked, relevant[u], 20);
            active[u] = 1;
        }
    });

    RankingResult out;
    for (std::size_t u = 0; u < n_users; ++u) {
        if (!active[u]) continue;
        out.per_user.push_back(slots[u]);
        out.ndcg10 += slots[u].ndcg10;
        out.recall10 += slots[u].recall10;
        out.ndcg20 += slots[u].ndcg20;
        out.recall20 += slots[u].recall20;
    }
    if (!out.per_user.empty()) {
        const double inv = 1.0 / double(out.per_user.size());
        out.ndcg10 *= inv;
        out.recall10 *= inv;
        out.ndcg20 *= inv;
        out.recall20 *= inv;
    }
    return out;
}

template std::vector<index_t> score_all(const DenseMatrix<float>&, std::size_t, std::size_t,
                                        index_t, const std::vector<index_t>&);
template std::vector<index_t> score_all(const DenseMatrix<double>&, std::size_t, std::size_t,
                                        index_t, const std::vector<index_t>&);
template RankingResult evaluate_ranking(const DenseMatrix<float>&, std::size_t, std::size_t,
                                        const std::vector<std::vector<index_t>>&,
                                        const std::vector<std::vector<index_t>>&);
template RankingResult evaluate_ranking(const DenseMatrix<double>&, std::size_t, std::size_t,
                                        const std::vector<std::vector<index_t>>&,
                                        const std::vector<std::vector<index_t>>&);

} // namespace gcflite
