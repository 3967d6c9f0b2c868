#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <gcflite/checkpoint.hpp>
#include <gcflite/config.hpp>
#include <gcflite/dataset.hpp>
#include <gcflite/embedding.hpp>
#include <gcflite/eval.hpp>
#include <gcflite/graph.hpp>
#include <gcflite/manifest.hpp>
#include <gcflite/partition.hpp>
#include <gcflite/trainer.hpp>

namespace fs = std::filesystem;
using namespace gcflite;

namespace {

InteractionDataset load_dir(const std::string& dir) {
    return load_dataset(dir + "/train.txt", dir + "/test.txt");
}

std::uint64_t dataset_hash(const std::string& dir) {
    const std::uint64_t h[2] = {hash_file(dir + "/train.txt"), hash_file(dir + "/test.txt")};
    return fnv1a64(h, sizeof h);
}

int cmd_partition(const std::string& data_dir, std::size_t c, std::uint64_t seed,
                  const std::string& out_path, double balance_factor) {
    const auto data = load_dir(data_dir);
    const auto a = build_adjacency<double>(data);
    const auto part = partition_graph(a, c, seed, balance_factor);

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    for (index_t lab : part.labels) out << lab << "\n";
    out.flush();
    if (!out) throw std::runtime_error("failed writing labels to: " + out_path);

    std::printf("%zu entities into %zu parts, edge cut %.0f, labels in %s\n", part.labels.size(),
                part.num_parts, edge_cut(a, part.labels), out_path.c_str());
    return 0;
}

template <class T>
Checkpoint<T> to_checkpoint(const TrainState<T>& st, std::uint32_t layers) {
    Checkpoint<T> ck;
    ck.codebook = st.codebook;
    ck.assignment = st.assignment;
    ck.adam_m = st.adam_m;
    ck.adam_v = st.adam_v;
    ck.step = st.step;
    ck.epoch = static_cast<std::uint32_t>(st.epoch);
    ck.phase = st.phase;
    ck.layers = layers;
    return ck;
}

void print_metrics(const RankingResult& res, std::size_t params) {
    std::printf("ndcg@10    %.6f\n", res.ndcg10);
    std::printf("recall@10  %.6f\n", res.recall10);
    std::printf("ndcg@20    %.6f\n", res.ndcg20);
    std::printf("recall@20  %.6f\n", res.recall20);
    std::printf("params     %zu\n", params);
}

template <class T>
int run_train(const InteractionDataset& data, const TrainConfig& cfg,
              const std::string& data_dir, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const RunManifest manifest = make_manifest(cfg, data, data_dir, dataset_hash(data_dir));
    write_manifest(out_dir + "/" + manifest.manifest_file, manifest);

    const std::string metrics_path = out_dir + "/" + manifest.metrics_file;
    const std::string checkpoint_path = out_dir + "/" + manifest.checkpoint_file;
    std::ofstream metrics(metrics_path);
    if (!metrics) throw std::runtime_error("cannot open metric log: " + metrics_path);
    metrics << metric_log_header() << "\n";
    metrics.flush();

    std::printf("run %s: %zu users, %zu items, %zu train interactions\n",
                manifest.run_id.c_str(), data.n_users, data.n_items, data.train_count());

    const auto outcome = train<T>(
        data, cfg, [&](const EpochRecord& rec, const TrainState<T>& st, bool improved) {
            const std::string row = format_metric_row(rec);
            metrics << row << "\n";
            metrics.flush();
            std::printf("%s%s\n", row.c_str(), improved ? "\t*" : "");
            if (improved)
                save_checkpoint(checkpoint_path, to_checkpoint(st, std::uint32_t(cfg.L)));
        });

    // always leave the best state on disk, including zero-epoch runs
    save_checkpoint(checkpoint_path, to_checkpoint(outcome.best, std::uint32_t(cfg.L)));

    if (!outcome.log.empty())
        std::printf("best epoch %zu, validation ndcg@20 %.6f\n", outcome.best_epoch,
                    outcome.best_val_ndcg20);
    std::printf("test metrics:\n");
    print_metrics(outcome.test_metrics,
                  outcome.best.assignment.nnz() + cfg.c * cfg.d);
    return 0;
}

template <class T>
int run_evaluate(const std::string& checkpoint_path, const std::string& data_dir, bool per_user) {
    const auto ck = load_checkpoint<T>(checkpoint_path);
    const auto data = load_dir(data_dir);
    require(ck.assignment.n_entities == data.n_entities(),
            "checkpoint entity count does not match the dataset");

    const auto base = build_adjacency<T>(data);
    const auto graph = expand_adjacency(base, ck.assignment);
    const auto composed = compose(ck.assignment, ck.codebook);
    const auto prop = propagate(graph, composed, ck.codebook, ck.layers, false);
    const auto res = evaluate_ranking(prop.pooled, data.n_users, data.n_items, data.train,
                                      data.test);

    if (per_user) {
        std::printf("user\tndcg@10\trecall@10\tndcg@20\trecall@20\n");
        for (const auto& m : res.per_user)
            std::printf("%u\t%.6f\t%.6f\t%.6f\t%.6f\n", m.user, m.ndcg10, m.recall10, m.ndcg20,
                        m.recall20);
    }
    print_metrics(res, ck.assignment.nnz() + ck.codebook.size() * ck.codebook.dim());
    return 0;
}

template <class T>
int run_export(const std::string& checkpoint_path, const std::string& out_path) {
    const auto ck = load_checkpoint<T>(checkpoint_path);
    const auto composed = compose(ck.assignment, ck.codebook);
    save_embedding_blob(out_path, composed);
    std::printf("wrote %zu x %zu embeddings to %s\n", composed.rows, composed.cols,
                out_path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"compositional-codebook graph collaborative filtering"};
    app.require_subcommand(1);

    std::string data_dir, config_path, out_path, checkpoint_path;
    std::size_t c = 500;
    std::uint64_t seed = 42;
    double balance_factor = 1.05;
    bool per_user = false;

    auto* sp = app.add_subcommand("partition", "community labels for a dataset's entities");
    sp->add_option("--data", data_dir, "dataset directory (train.txt, test.txt)")->required();
    sp->add_option("--c", c, "number of parts")->required();
    sp->add_option("--seed", seed, "random seed");
    sp->add_option("--out", out_path, "label file, one integer per line")->required();
    sp->add_option("--balance-factor", balance_factor, "part size slack over ceil(n/c)");

    auto* st = app.add_subcommand("train", "train a model and log metrics");
    st->add_option("--data", data_dir, "dataset directory (train.txt, test.txt)")->required();
    st->add_option("--config", config_path, "key=value config file")->required();
    st->add_option("--out", out_path, "run directory for checkpoint, metrics and manifest")
        ->required();

    auto* se = app.add_subcommand("evaluate", "score a checkpoint on the held-out split");
    se->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
    se->add_option("--data", data_dir, "dataset directory (train.txt, test.txt)")->required();
    se->add_flag("--per-user", per_user, "also print one metrics row per user");

    auto* sx = app.add_subcommand("export", "write composed entity embeddings as a blob");
    sx->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
    sx->add_option("--out", out_path, "output embedding file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(sp)) return cmd_partition(data_dir, c, seed, out_path,
                                                         balance_factor);
        if (app.got_subcommand(st)) {
            const TrainConfig cfg = parse_config(config_path);
            cfg.validate();
            const auto data = load_dir(data_dir);
            return cfg.scalar_width == 64 ? run_train<double>(data, cfg, data_dir, out_path)
                                          : run_train<float>(data, cfg, data_dir, out_path);
        }
        if (app.got_subcommand(se))
            return peek_scalar_width(checkpoint_path) == 64
                       ? run_evaluate<double>(checkpoint_path, data_dir, per_user)
                       : run_evaluate<float>(checkpoint_path, data_dir, per_user);
        if (app.got_subcommand(sx))
            return peek_scalar_width(checkpoint_path) == 64
                       ? run_export<double>(checkpoint_path, out_path)
                       : run_export<float>(checkpoint_path, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
