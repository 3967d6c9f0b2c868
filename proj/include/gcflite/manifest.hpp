#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gcflite/config.hpp"
#include "gcflite/dataset.hpp"

namespace gcflite {

std::uint64_t fnv1a64(const void* data, std::size_t n,
                      std::uint64_t h = 0xcbf29ce484222325ULL);
std::uint64_t hash_file(const std::string& path);
std::string hex64(std::uint64_t v);

/// Snapshot of one training run's inputs, written to the run directory
/// before training starts so interrupted runs stay attributable.
struct RunManifest {
    std::string run_id;               // 16 hex chars, derived from inputs
    std::string dataset_dir;
    std::string dataset_checksum;     // 16 hex chars over train+test bytes
    std::uint64_t seed = 0;
    std::size_t n_users = 0;
    std::size_t n_items = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::string backend;
    std::vector<std::pair<std::string, std::string>> config;
    std::string checkpoint_file = "checkpoint.bin";
    std::string metrics_file = "metrics.tsv";
    std::string manifest_file = "manifest.json";
};

RunManifest make_manifest(const TrainConfig& cfg, const InteractionDataset& data,
                          const std::string& dataset_dir, std::uint64_t dataset_hash);

std::string manifest_json(const RunManifest& m);
void write_manifest(const std::string& path, const RunManifest& m);

} // namespace gcflite
