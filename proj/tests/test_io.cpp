#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "gcflite/checkpoint.hpp"
#include "gcflite/config.hpp"
#include "gcflite/dataset.hpp"
#include "gcflite/manifest.hpp"
#include "gcflite/rng.hpp"

using namespace gcflite;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("gcflite_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <class T>
Checkpoint<T> sample_checkpoint(std::uint64_t seed) {
    Rng rng(seed);
    Checkpoint<T> ck;
    ck.codebook.rows = DenseMatrix<T>(5, 3);
    for (auto& v : ck.codebook.rows.data) v = static_cast<T>(rng.uniform(-1, 1));
    ck.adam_m = DenseMatrix<T>(5, 3);
    ck.adam_v = DenseMatrix<T>(5, 3);
    for (auto& v : ck.adam_m.data) v = static_cast<T>(rng.uniform(-1, 1));
    for (auto& v : ck.adam_v.data) v = static_cast<T>(rng.uniform(0, 1));

    auto& s = ck.assignment;
    s.n_entities = 4;
    s.n_codes = 5;
    s.t = 2;
    s.row_ptr = {0, 2, 4, 4, 6};   // row 2 deliberately empty
    s.col_idx = {0, 3, 1, 2, 0, 4};
    s.weights.resize(6);
    for (auto& w : s.weights) w = static_cast<T>(rng.uniform(0, 1));
    s.refresh_anchors();
    s.validate();

    ck.step = 1234;
    ck.epoch = 7;
    ck.phase = Phase::main;
    ck.layers = 3;
    return ck;
}

} // namespace

TEST_CASE("interaction lines parse to pairs") {
    TempDir dir;
    write_text(dir.file("a.txt"), "0 5 7\n\n3\n1 2 2 9\n");
    const auto pairs = load_interactions(dir.file("a.txt"));
    // dedup happens at dataset assembly, not line parsing
    REQUIRE(pairs.size() == 5);
    CHECK(pairs[0] == std::make_pair(index_t{0}, index_t{5}));
    CHECK(pairs[1] == std::make_pair(index_t{0}, index_t{7}));
    CHECK(pairs[2] == std::make_pair(index_t{1}, index_t{2}));
    CHECK(pairs[3] == std::make_pair(index_t{1}, index_t{2}));
    CHECK(pairs[4] == std::make_pair(index_t{1}, index_t{9}));
}

TEST_CASE("malformed interaction tokens raise errors naming the line") {
    TempDir dir;
    write_text(dir.file("bad.txt"), "0 1\n2 x 3\n");
    try {
        load_interactions(dir.file("bad.txt"));
        FAIL("expected a parse error");
    } catch (const std::exception& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":2:") != std::string::npos);
        CHECK(msg.find('x') != std::string::npos);
    }
    write_text(dir.file("neg.txt"), "-1 4\n");
    CHECK_THROWS(load_interactions(dir.file("neg.txt")));
    CHECK_THROWS(load_interactions(dir.file("missing.txt")));
}

TEST_CASE("dataset assembly dedupes and infers counts from max ids") {
    TempDir dir;
    write_text(dir.file("train.txt"), "0 5 7 5\n1 2\n");
    write_text(dir.file("test.txt"), "4 0\n");
    const auto ds = load_dataset(dir.file("train.txt"), dir.file("test.txt"));
    CHECK(ds.n_users == 5);   // user 4 appears only in test
    CHECK(ds.n_items == 8);
    CHECK(ds.train_count() == 3);
    CHECK(ds.test_count() == 1);
    CHECK(ds.train[0] == std::vector<index_t>{5, 7});
    CHECK(ds.test[4] == std::vector<index_t>{0});
    CHECK(ds.train[4].empty());
}

TEST_CASE("dataset round-trips through serialization") {
    TempDir dir;
    write_text(dir.file("train.txt"), "0 5 7\n1 2\n3\n");
    write_text(dir.file("test.txt"), "0 1\n2 6\n");
    const auto ds = load_dataset(dir.file("train.txt"), dir.file("test.txt"));
    save_interactions(dir.file("train2.txt"), ds.train);
    save_interactions(dir.file("test2.txt"), ds.test);
    const auto ds2 = load_dataset(dir.file("train2.txt"), dir.file("test2.txt"));
    CHECK(ds2.n_users == ds.n_users);
    CHECK(ds2.n_items == ds.n_items);
    CHECK(ds2.train == ds.train);
    CHECK(ds2.test == ds.test);
}

TEST_CASE("config defaults and overrides") {
    const TrainConfig def = parse_config_text("");
    CHECK(def.d == 128);
    CHECK(def.c == 500);
    CHECK(def.t == 2);
    CHECK(def.L == 3);
    CHECK(def.lr == 1e-3);
    CHECK(def.lambda == 1e-3);
    CHECK(def.w_star == 0.5);
    CHECK(def.m == 1);
    CHECK(def.negatives_per_positive == 5);
    CHECK(def.rcond == 1e-10);
    CHECK(def.balance_factor == 1.05);
    CHECK(def.seed == 42);
    CHECK(def.scalar_width == 32);
    CHECK(def.init_method == InitMethod::metis);

    const TrainConfig cfg = parse_config_text(
        "# reference setup\nc=500\nt=2\nd=128\nlr = 1e-2  # inline note\nseed=7\n");
    CHECK(cfg.c == 500);
    CHECK(cfg.t == 2);
    CHECK(cfg.d == 128);
    CHECK(cfg.lr == 1e-2);
    CHECK(cfg.seed == 7);
}

TEST_CASE("config constraint and key errors") {
    try {
        parse_config_text("t=9\nc=4\n");
        FAIL("expected constraint error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("t exceeds c") != std::string::npos);
    }
    CHECK_THROWS(parse_config_text("bogus_key=1\n"));
    CHECK_THROWS(parse_config_text("d=fast\n"));
    CHECK_THROWS(parse_config_text("scalar_width=16\n"));
    CHECK_THROWS(parse_config_text("w_star=0\n"));
    CHECK_THROWS(parse_config_text("rcond=1\n"));
    CHECK_THROWS(parse_config_text("init_method=hash\n"));
    CHECK_THROWS(parse_config_text("no equals sign"));
}

TEST_CASE("checkpoint round-trip is bit-exact") {
    TempDir dir;
    const auto ck32 = sample_checkpoint<float>(1);
    save_checkpoint(dir.file("ck32.bin"), ck32);
    const auto back32 = load_checkpoint<float>(dir.file("ck32.bin"));
    CHECK(back32.codebook.rows.data == ck32.codebook.rows.data);
    CHECK(back32.assignment.row_ptr == ck32.assignment.row_ptr);
    CHECK(back32.assignment.col_idx == ck32.assignment.col_idx);
    CHECK(back32.assignment.weights == ck32.assignment.weights);
    CHECK(back32.assignment.anchor == ck32.assignment.anchor);
    CHECK(back32.assignment.t == ck32.assignment.t);
    CHECK(back32.adam_m.data == ck32.adam_m.data);
    CHECK(back32.adam_v.data == ck32.adam_v.data);
    CHECK(back32.step == ck32.step);
    CHECK(back32.epoch == ck32.epoch);
    CHECK(back32.phase == ck32.phase);
    CHECK(back32.layers == ck32.layers);
    CHECK(peek_scalar_width(dir.file("ck32.bin")) == 32);

    const auto ck64 = sample_checkpoint<double>(2);
    save_checkpoint(dir.file("ck64.bin"), ck64);
    const auto back64 = load_checkpoint<double>(dir.file("ck64.bin"));
    CHECK(back64.codebook.rows.data == ck64.codebook.rows.data);
    CHECK(back64.assignment.weights == ck64.assignment.weights);
    CHECK(peek_scalar_width(dir.file("ck64.bin")) == 64);

    // loading with the wrong instantiation is refused
    CHECK_THROWS(load_checkpoint<double>(dir.file("ck32.bin")));
    CHECK_THROWS(load_checkpoint<float>(dir.file("ck64.bin")));
}

TEST_CASE("corrupt checkpoints are rejected with descriptive errors") {
    TempDir dir;
    save_checkpoint(dir.file("ck.bin"), sample_checkpoint<float>(3));
    std::string raw = read_text(dir.file("ck.bin"));

    std::string bad_magic = raw;
    bad_magic[0] = 'X';
    write_text(dir.file("bad_magic.bin"), bad_magic);
    CHECK_THROWS_WITH_AS(load_checkpoint<float>(dir.file("bad_magic.bin")),
                         doctest::Contains("magic"), std::runtime_error);

    std::string bad_version = raw;
    bad_version[4] = 9;
    write_text(dir.file("bad_version.bin"), bad_version);
    CHECK_THROWS_WITH_AS(load_checkpoint<float>(dir.file("bad_version.bin")),
                         doctest::Contains("version"), std::runtime_error);

    write_text(dir.file("short.bin"), raw.substr(0, raw.size() / 2));
    CHECK_THROWS(load_checkpoint<float>(dir.file("short.bin")));

    write_text(dir.file("long.bin"), raw + "zz");
    CHECK_THROWS_WITH_AS(load_checkpoint<float>(dir.file("long.bin")),
                         doctest::Contains("trailing"), std::runtime_error);
}

TEST_CASE("embedding blob round-trip") {
    TempDir dir;
    Rng rng(9);
    DenseMatrix<float> m(7, 4);
    for (auto& v : m.data) v = static_cast<float>(rng.uniform(-2, 2));
    save_embedding_blob(dir.file("emb.bin"), m);
    const auto back = load_embedding_blob<float>(dir.file("emb.bin"));
    CHECK(back.rows == m.rows);
    CHECK(back.cols == m.cols);
    CHECK(back.data == m.data);
}

TEST_CASE("manifest json carries run identity and parses back") {
    TempDir dir;
    write_text(dir.file("train.txt"), "0 1\n1 0\n");
    write_text(dir.file("test.txt"), "0 0\n");
    const auto ds = load_dataset(dir.file("train.txt"), dir.file("test.txt"));
    const TrainConfig cfg = parse_config_text("c=2\nt=1\nd=4\n");
    const std::uint64_t h =
        fnv1a64("x", 1, hash_file(dir.file("train.txt")) ^ hash_file(dir.file("test.txt")));

    const RunManifest m1 = make_manifest(cfg, ds, dir.path.string(), h);
    const RunManifest m2 = make_manifest(cfg, ds, dir.path.string(), h);
    CHECK(m1.run_id == m2.run_id);
    CHECK(m1.run_id.size() == 16);

    TrainConfig other = cfg;
    other.seed = 43;
    CHECK(make_manifest(other, ds, dir.path.string(), h).run_id != m1.run_id);

    write_manifest(dir.file("manifest.json"), m1);
    const auto j = nlohmann::json::parse(read_text(dir.file("manifest.json")));
    CHECK(j["run_id"] == m1.run_id);
    CHECK(j["dataset"]["users"] == 2);
    CHECK(j["dataset"]["items"] == 2);
    CHECK(j["config"]["c"] == "2");
    CHECK(j["outputs"]["metrics"] == "metrics.tsv");
}
