#include "gcflite/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "gcflite/graph.hpp"
#include "gcflite/kernels.hpp"
#include "gcflite/partition.hpp"
#include "gcflite/rng.hpp"

namespace gcflite {

namespace {

// Salts keeping the independent random streams (codebook init, assignment
// companions, validation split, negatives, batch order) uncorrelated.
constexpr std::uint64_t kSaltCodebook = 0x434f4445;
constexpr std::uint64_t kSaltAssign = 0x494e4954;
constexpr std::uint64_t kSaltValSplit = 0x56414c53;
constexpr std::uint64_t kSaltNegatives = 0x4e454753;
constexpr std::uint64_t kSaltShuffle = 0x53485546;

double sigmoid_neg(double delta) {   // sigma(-delta), stable in both tails
    if (delta >= 0.0) {
        const double e = std::exp(-delta);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(delta));
}

double softplus_neg(double delta) {  // log(1 + exp(-delta))
    return std::max(-delta, 0.0) + std::log1p(std::exp(-std::abs(delta)));
}

template <class Vec>
void fisher_yates(Vec& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.below(i)]);
}

} // namespace

std::vector<Triplet> sample_triplets(std::size_t n_users, std::size_t n_items,
                                     const std::vector<std::vector<index_t>>& positives,
                                     std::size_t k_neg, std::uint64_t seed,
                                     std::size_t* skipped_users) {
    require(positives.size() == n_users, "sample_triplets: positives size mismatch");
    require(k_neg >= 1, "sample_triplets: need at least one negative per positive");
    Rng rng(mix64(seed, kSaltNegatives));
    std::vector<Triplet> out;
    std::size_t skipped = 0;
    for (std::size_t u = 0; u < n_users; ++u) {
        const auto& pos = positives[u];
        if (pos.empty())
            continue;
        if (pos.size() >= n_items) {
            ++skipped;   // no negatives exist for this user
            continue;
        }
        for (index_t item : pos) {
            for (std::size_t j = 0; j < k_neg; ++j) {
                index_t neg;
                do {
                    neg = index_t(rng.below(n_items));
                } while (std::binary_search(pos.begin(), pos.end(), neg));
                out.push_back({index_t(u), index_t(n_users + item), index_t(n_users + neg)});
            }
        }
    }
    if (skipped_users)
        *skipped_users = skipped;
    return out;
}

template <class T>
double bpr_loss_and_grad(std::span<const Triplet> batch, const DenseMatrix<T>& pooled,
                         const DenseMatrix<T>& layer0, double lambda,
                         SparseRows<T>& grad_pooled, SparseRows<T>& grad_layer0) {
    if (batch.empty())
        return 0.0;
    require(pooled.cols == layer0.cols, "bpr: embedding widths differ");
    const auto& k = kern::ops<T>();
    const std::size_t d = pooled.cols;
    const double inv_b = 1.0 / double(batch.size());
    double rank_loss = 0.0;
    double reg = 0.0;
    for (const Triplet& tr : batch) {
        const T* hu = pooled.row(tr.user);
        const T* hp = pooled.row(tr.pos_item);
        const T* hn = pooled.row(tr.neg_item);
        const double delta = double(k.dot(hu, hp, d)) - double(k.dot(hu, hn, d));
        rank_loss += softplus_neg(delta);
        const T g = T(-sigmoid_neg(delta) * inv_b);
        T* gu = grad_pooled.row(tr.user);
        k.axpy(d, g, hp, gu);
        k.axpy(d, T(-g), hn, gu);
        k.axpy(d, g, hu, grad_pooled.row(tr.pos_item));
        k.axpy(d, T(-g), hu, grad_pooled.row(tr.neg_item));
        const index_t ents[3] = {tr.user, tr.pos_item, tr.neg_item};
        for (index_t e : ents) {
            const T* x = layer0.row(e);
            reg += double(k.dot(x, x, d));
            k.axpy(d, T(2.0 * lambda * inv_b), x, grad_layer0.row(e));
        }
    }
    return rank_loss * inv_b + lambda * reg * inv_b;
}

template <class T>
void adam_step(TrainState<T>& state, const DenseMatrix<T>& grad, double lr,
               double beta1, double beta2, double eps) {
    auto& w = state.codebook.rows;
    require(grad.rows == w.rows && grad.cols == w.cols, "adam: gradient shape mismatch");
    state.step += 1;
    const double c1 = 1.0 / (1.0 - std::pow(beta1, double(state.step)));
    const double c2 = 1.0 / (1.0 - std::pow(beta2, double(state.step)));
    const auto& k = kern::ops<T>();
    k.adam(w.data.size(), w.data.data(), state.adam_m.data.data(), state.adam_v.data.data(),
           grad.data.data(), T(lr), T(beta1), T(beta2), T(eps), T(c1), T(c2));
}

std::string metric_log_header() {
    return "epoch\tphase\tloss\tndcg@10\trecall@10\tndcg@20\trecall@20\ts_nnz\twall_seconds";
}

std::string format_metric_row(const EpochRecord& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%zu\t%s\t%.10g\t%.10g\t%.10g\t%.10g\t%.10g\t%zu\t%.3f",
                  r.epoch, phase_name(r.phase), r.loss, r.ndcg10, r.recall10, r.ndcg20,
                  r.recall20, r.s_nnz, r.wall_seconds);
    return buf;
}

TrainValSplit split_validation(const std::vector<std::vector<index_t>>& train,
                               std::uint64_t seed, double fraction) {
    require(fraction > 0.0 && fraction < 1.0, "split_validation: fraction out of range");
    TrainValSplit out;
    out.train.resize(train.size());
    out.val.resize(train.size());
    Rng rng(mix64(seed, kSaltValSplit));
    for (std::size_t u = 0; u < train.size(); ++u) {
        const auto& pos = train[u];
        if (pos.size() < 2) {
            out.train[u] = pos;
            continue;
        }
        std::vector<index_t> items = pos;
        fisher_yates(items, rng);
        std::size_t k = std::max<std::size_t>(1, std::size_t(fraction * double(pos.size())));
        k = std::min(k, pos.size() - 1);   // never starve the training side
        out.val[u].assign(items.begin(), items.begin() + k);
        out.train[u].assign(items.begin() + k, items.end());
        std::sort(out.val[u].begin(), out.val[u].end());
        std::sort(out.train[u].begin(), out.train[u].end());
    }
    return out;
}

template <class T>
TrainState<T> init_state(const InteractionDataset& data, const TrainConfig& cfg,
                         const std::vector<std::vector<index_t>>& train_lists) {
    const std::size_t n = data.n_entities();
    require(cfg.c <= n, "init: c exceeds entity count");
    require(train_lists.size() == data.n_users, "init: train list size mismatch");

    TrainState<T> st;
    st.codebook.rows = DenseMatrix<T>(cfg.c, cfg.d);
    Rng rng(mix64(cfg.seed, kSaltCodebook));
    const double bound = std::sqrt(6.0 / double(cfg.c + cfg.d));
    for (auto& x : st.codebook.rows.data)
        x = T(rng.uniform(-bound, bound));

    InteractionDataset eff;
    eff.n_users = data.n_users;
    eff.n_items = data.n_items;
    eff.train = train_lists;
    st.base_adjacency = build_adjacency<T>(eff);

    const Partitioning part =
        cfg.init_method == InitMethod::metis
            ? partition_graph(st.base_adjacency, cfg.c, cfg.seed, cfg.balance_factor)
            : random_partition(n, cfg.c, cfg.seed);
    st.assignment = init_assignment<T>(part, cfg.t, cfg.w_star, mix64(cfg.seed, kSaltAssign));
    st.graph = expand_adjacency(st.base_adjacency, st.assignment);
    st.adam_m = DenseMatrix<T>(cfg.c, cfg.d);
    st.adam_v = DenseMatrix<T>(cfg.c, cfg.d);
    return st;
}

namespace {

template <class T>
RankingResult validate_state(const TrainState<T>& st, const TrainConfig& cfg,
                             std::size_t n_users, std::size_t n_items,
                             const std::vector<std::vector<index_t>>& exclude,
                             const std::vector<std::vector<index_t>>& relevant) {
    const auto composed = compose(st.assignment, st.codebook);
    const auto prop = propagate(st.graph, composed, st.codebook, cfg.L, false);
    return evaluate_ranking(prop.pooled, n_users, n_items, exclude, relevant);
}

} // namespace

template <class T>
TrainOutcome<T> train(const InteractionDataset& data, const TrainConfig& cfg,
                      const EpochCallback<T>& on_epoch) {
    cfg.validate();
    require(data.n_users > 0 && data.n_items > 0, "train: empty dataset");
    require(data.train_count() > 0, "train: no training interactions");
    require(cfg.c <= data.n_entities(), "train: c exceeds entity count");

    const auto split = split_validation(data.train, cfg.seed);
    TrainOutcome<T> out;

    TrainState<T> state = init_state<T>(data, cfg, split.train);
    out.best = state;   // zero-epoch runs hand back the initialized model

    const std::size_t n = data.n_entities();
    const std::size_t total = n + cfg.c;
    SparseRows<T> grad_pooled(total, cfg.d);
    SparseRows<T> grad_layer0(n, cfg.d);
    bool warned_skipped = false;
    bool warned_degenerate = false;

    auto run_phase = [&](Phase phase, std::size_t max_epochs) {
        state.phase = phase;
        double phase_best = -1.0;
        std::size_t since_best = 0;
        for (std::size_t pe = 0; pe < max_epochs; ++pe) {
            const auto t0 = std::chrono::steady_clock::now();
            const std::uint64_t epoch_seed =
                mix64(mix64(cfg.seed, std::uint64_t(phase) + 1), std::uint64_t(pe));

            std::size_t skipped = 0;
            auto triplets = sample_triplets(data.n_users, data.n_items, split.train,
                                            cfg.negatives_per_positive, epoch_seed, &skipped);
            if (skipped > 0 && !warned_skipped) {
                std::fprintf(stderr,
                             "warning: %zu user(s) interact with every item; "
                             "no negatives sampled for them\n",
                             skipped);
                warned_skipped = true;
            }
            Rng order(mix64(epoch_seed, kSaltShuffle));
            fisher_yates(triplets, order);

            double loss_sum = 0.0;
            std::size_t loss_n = 0;
            for (std::size_t lo = 0; lo < triplets.size(); lo += cfg.batch_size_triplets) {
                const std::size_t len =
                    std::min(cfg.batch_size_triplets, triplets.size() - lo);
                const std::span<const Triplet> batch(triplets.data() + lo, len);
                const auto composed = compose(state.assignment, state.codebook);
                const auto prop = propagate(state.graph, composed, state.codebook, cfg.L, false);
                const double batch_loss = bpr_loss_and_grad<T>(batch, prop.pooled, composed,
                                                               cfg.lambda, grad_pooled,
                                                               grad_layer0);
                auto grad = backward(state.graph, prop, grad_pooled.buf, state.assignment);
                // Regularization acts on the composed layer directly, one
                // assignment hop away from the codebook.
                const auto& k = kern::ops<T>();
                for (index_t p : grad_layer0.touched)
                    for (std::uint64_t e = state.assignment.row_ptr[p];
                         e < state.assignment.row_ptr[p + 1]; ++e)
                        k.axpy(cfg.d, state.assignment.weights[e], grad_layer0.row(p),
                               grad.row(state.assignment.col_idx[e]));
                adam_step(state, grad, cfg.lr);
                grad_pooled.clear();
                grad_layer0.clear();
                loss_sum += batch_loss * double(len);
                loss_n += len;
            }

            if (phase == Phase::main && pe % cfg.m == 0) {
                auto up = update_round(state.base_adjacency, state.graph, state.assignment,
                                       state.codebook, cfg.L, T(cfg.rcond),
                                       cfg.assignment_batch_rows);
                if (up.degenerate && !warned_degenerate) {
                    std::fprintf(stderr,
                                 "warning: assignment update degenerate (zero meta "
                                 "embeddings); assignment zeroed\n");
                    warned_degenerate = true;
                }
                state.assignment = std::move(up.assignment);
                state.graph = std::move(up.graph);
            }

            const RankingResult val = validate_state(state, cfg, data.n_users, data.n_items,
                                                     split.train, split.val);
            EpochRecord rec;
            rec.epoch = out.log.size();
            rec.phase = phase;
            rec.loss = loss_n > 0 ? loss_sum / double(loss_n) : 0.0;
            rec.ndcg10 = val.ndcg10;
            rec.recall10 = val.recall10;
            rec.ndcg20 = val.ndcg20;
            rec.recall20 = val.recall20;
            rec.s_nnz = state.assignment.nnz();
            rec.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            state.epoch = rec.epoch + 1;

            const bool improved = val.ndcg20 > out.best_val_ndcg20;
            if (improved) {
                out.best_val_ndcg20 = val.ndcg20;
                out.best_epoch = rec.epoch;
                out.best = state;
            }
            if (val.ndcg20 > phase_best) {
                phase_best = val.ndcg20;
                since_best = 0;
            } else {
                ++since_best;
            }
            out.log.push_back(rec);
            if (on_epoch)
                on_epoch(rec, state, improved);
            if (since_best >= cfg.patience)
                break;
        }
    };

    run_phase(Phase::pretrain, cfg.epochs_pretrain_max);
    run_phase(Phase::main, cfg.epochs_main_max);

    // Score the winning snapshot against the held-out interactions with the
    // complete training graph (validation edges restored).
    const auto base_full = build_adjacency<T>(data);
    const auto graph_full = expand_adjacency(base_full, out.best.assignment);
    const auto composed = compose(out.best.assignment, out.best.codebook);
    const auto prop = propagate(graph_full, composed, out.best.codebook, cfg.L, false);
    out.test_metrics =
        evaluate_ranking(prop.pooled, data.n_users, data.n_items, data.train, data.test);
    return out;
}

template double bpr_loss_and_grad<float>(std::span<const Triplet>, const DenseMatrix<float>&,
                                         const DenseMatrix<float>&, double, SparseRows<float>&,
                                         SparseRows<float>&);
template double bpr_loss_and_grad<double>(std::span<const Triplet>, const DenseMatrix<double>&,
                                          const DenseMatrix<double>&, double,
                                          SparseRows<double>&, SparseRows<double>&);
template void adam_step<float>(TrainState<float>&, const DenseMatrix<float>&, double, double,
                               double, double);
template void adam_step<double>(TrainState<double>&, const DenseMatrix<double>&, double, double,
                                double, double);
template TrainState<float> init_state<float>(const InteractionDataset&, const TrainConfig&,
                                             const std::vector<std::vector<index_t>>&);
template TrainState<double> init_state<double>(const InteractionDataset&, const TrainConfig&,
                                               const std::vector<std::vector<index_t>>&);
template TrainOutcome<float> train<float>(const InteractionDataset&, const TrainConfig&,
                                          const EpochCallback<float>&);
template TrainOutcome<double> train<double>(const InteractionDataset&, const TrainConfig&,
                                            const EpochCallback<double>&);

} // namespace gcflite
