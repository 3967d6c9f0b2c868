#include "gcflite/manifest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "gcflite/kernels.hpp"

namespace gcflite {

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

RunManifest make_manifest(const TrainConfig& cfg, const InteractionDataset& data,
                          const std::string& dataset_dir, std::uint64_t dataset_hash) {
    RunManifest m;
    m.dataset_dir = dataset_dir;
    m.dataset_checksum = hex64(dataset_hash);
    m.seed = cfg.seed;
    m.n_users = data.n_users;
    m.n_items = data.n_items;
    m.n_train = data.train_count();
    m.n_test = data.test_count();
    m.backend = kern::backend_name(kern::active_backend());
    m.config = config_items(cfg);

    std::string material;
    for (const auto& [k, v] : m.config) material += k + "=" + v + "\n";
    material += m.dataset_checksum;
    const std::uint64_t id = fnv1a64(material.data(), material.size(),
                                     fnv1a64(&cfg.seed, sizeof cfg.seed));
    m.run_id = hex64(id);
    return m;
}

std::string manifest_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["run_id"] = m.run_id;
    j["seed"] = m.seed;
    j["dataset"] = {{"dir", m.dataset_dir},
                    {"checksum", m.dataset_checksum},
                    {"users", m.n_users},
                    {"items", m.n_items},
                    {"train_interactions", m.n_train},
                    {"test_interactions", m.n_test}};
    j["backend"] = m.backend;
    nlohmann::ordered_json cfg;
    for (const auto& [k, v] : m.config) cfg[k] = v;
    j["config"] = cfg;
    j["outputs"] = {{"checkpoint", m.checkpoint_file},
                    {"metrics", m.metrics_file},
                    {"manifest", m.manifest_file}};
    return j.dump(2) + "\n";
}

void write_manifest(const std::string& path, const RunManifest& m) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << manifest_json(m);
        if (!out) throw std::runtime_error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

} // namespace gcflite
