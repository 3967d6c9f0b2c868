#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gcflite/assign_update.hpp"
#include "gcflite/config.hpp"
#include "gcflite/dataset.hpp"
#include "gcflite/embedding.hpp"
#include "gcflite/eval.hpp"

namespace gcflite {

/// One BPR training example; all three fields are entity indexes (items
/// are offset by n_users).
struct Triplet {
    index_t user;
    index_t pos_item;
    index_t neg_item;
};

/// k_neg negatives per observed positive, drawn uniformly from each user's
/// non-interacted items. Deterministic for a fixed seed. Users interacting
/// with the whole catalog cannot be sampled; they are counted into
/// *skipped_users and the caller decides how loudly to warn.
std::vector<Triplet> sample_triplets(std::size_t n_users, std::size_t n_items,
                                     const std::vector<std::vector<index_t>>& positives,
                                     std::size_t k_neg, std::uint64_t seed,
                                     std::size_t* skipped_users = nullptr);

/// Row-sparse gradient accumulator: a dense buffer that remembers which
/// rows were touched so clearing costs O(touched) instead of O(rows).
template <class T>
struct SparseRows {
    DenseMatrix<T> buf;
    std::vector<index_t> touched;
    std::vector<char> mark;

    SparseRows(std::size_t rows, std::size_t cols) : buf(rows, cols), mark(rows, 0) {}

    T* row(index_t r) {
        if (!mark[r]) {
            mark[r] = 1;
            touched.push_back(r);
        }
        return buf.row(r);
    }

    void clear() {
        for (index_t r : touched) {
            std::fill(buf.row(r), buf.row(r) + buf.cols, T{0});
            mark[r] = 0;
        }
        touched.clear();
    }
};

/// Mean BPR loss over the batch plus lambda times the mean summed squared
/// norm of the participants' layer-0 embeddings. Ranking gradients land in
/// grad_pooled (rows of the propagated matrix), regularization gradients in
/// grad_layer0 (composed entity rows); both are accumulated, not reset.
template <class T>
double bpr_loss_and_grad(std::span<const Triplet> batch, const DenseMatrix<T>& pooled,
                         const DenseMatrix<T>& layer0, double lambda,
                         SparseRows<T>& grad_pooled, SparseRows<T>& grad_layer0);

template <class T>
struct TrainState {
    MetaCodebook<T> codebook;
    SparseAssignment<T> assignment;
    CsrMatrix<T> base_adjacency;   // entity block, no meta nodes
    ExpandedGraph<T> graph;
    DenseMatrix<T> adam_m;
    DenseMatrix<T> adam_v;
    std::uint64_t step = 0;
    std::size_t epoch = 0;         // global, counts both phases
    Phase phase = Phase::pretrain;
};

/// One Adam update of the codebook from a dense c x d gradient.
template <class T>
void adam_step(TrainState<T>& state, const DenseMatrix<T>& grad, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

struct EpochRecord {
    std::size_t epoch = 0;
    Phase phase = Phase::pretrain;
    double loss = 0.0;
    double ndcg10 = 0.0;     // validation metrics
    double recall10 = 0.0;
    double ndcg20 = 0.0;
    double recall20 = 0.0;
    std::size_t s_nnz = 0;
    double wall_seconds = 0.0;
};

std::string metric_log_header();
std::string format_metric_row(const EpochRecord& r);

/// 10% of each user's training positives (at least one, only for users
/// with two or more) becomes the validation set used for early stopping.
struct TrainValSplit {
    std::vector<std::vector<index_t>> train;
    std::vector<std::vector<index_t>> val;
};
TrainValSplit split_validation(const std::vector<std::vector<index_t>>& train,
                               std::uint64_t seed, double fraction = 0.1);

/// Freshly initialized state over the given training lists: Xavier
/// codebook, community (or random) assignment, expanded graph.
template <class T>
TrainState<T> init_state(const InteractionDataset& data, const TrainConfig& cfg,
                         const std::vector<std::vector<index_t>>& train_lists);

template <class T>
struct TrainOutcome {
    TrainState<T> best;              // highest validation NDCG@20 snapshot
    std::vector<EpochRecord> log;
    double best_val_ndcg20 = -1.0;
    std::size_t best_epoch = 0;
    RankingResult test_metrics;      // best state scored on the test split
};

/// Called after every epoch with the log record, the end-of-epoch state,
/// and whether this epoch set a new validation best.
template <class T>
using EpochCallback =
    std::function<void(const EpochRecord&, const TrainState<T>&, bool improved)>;

/// Two-stage optimization: pretrain with the assignment frozen, then
/// alternate BPR epochs with closed-form assignment updates every m epochs.
/// Early-stops each phase after `patience` epochs without validation
/// improvement.
template <class T>
TrainOutcome<T> train(const InteractionDataset& data, const TrainConfig& cfg,
                      const EpochCallback<T>& on_epoch = {});

} // namespace gcflite
