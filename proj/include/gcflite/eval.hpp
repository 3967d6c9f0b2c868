#pragma once

#include <vector>

#include "gcflite/types.hpp"

namespace gcflite {

struct UserMetrics {
    index_t user = 0;
    double ndcg10 = 0.0;
    double recall10 = 0.0;
    double ndcg20 = 0.0;
    double recall20 = 0.0;
};

/// Full-ranking top-N metrics. per_user holds one entry per user with a
/// non-empty relevant set, in user order; the averages are macro means over
/// exactly those users.
struct RankingResult {
    std::vector<UserMetrics> per_user;
    double ndcg10 = 0.0;
    double recall10 = 0.0;
    double ndcg20 = 0.0;
    double recall20 = 0.0;
};

/// Every item ranked for one user by dot-product score, descending, ties to
/// the lower item index, after removing the excluded (training) items.
/// h is the pooled entity matrix: rows [0, n_users) are users, the item
/// block starts at n_users. exclude must be sorted.
template <class T>
std::vector<index_t> score_all(const DenseMatrix<T>& h, std::size_t n_users, std::size_t n_items,
                               index_t user, const std::vector<index_t>& exclude);

/// Binary-gain NDCG with log2 position discount, 0-based cutoff N; 0 when
/// relevant is empty. relevant must be sorted.
double ndcg_at(const std::vector<index_t>& ranked, const std::vector<index_t>& relevant,
               std::size_t n);

double recall_at(const std::vector<index_t>& ranked, const std::vector<index_t>& relevant,
                 std::size_t n);

/// Rank the whole catalog for every user (excluding exclude[u], scoring
/// relevance against relevant[u]) and macro-average the metrics. Users with
/// empty relevant sets are skipped.
template <class T>
RankingResult evaluate_ranking(const DenseMatrix<T>& h, std::size_t n_users, std::size_t n_items,
                               const std::vector<std::vector<index_t>>& exclude,
                               const std::vector<std::vector<index_t>>& relevant);

} // namespace gcflite
