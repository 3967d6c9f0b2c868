#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gcflite {

enum class InitMethod { metis, random };

/// Hyperparameters and run settings. Field names double as config-file keys.
struct TrainConfig {
    std::size_t d = 128;                    // embedding dimension
    std::size_t c = 500;                    // codebook buckets
    std::size_t t = 2;                      // meta-embeddings per entity
    std::size_t L = 3;                      // propagation layers
    double lr = 1e-3;
    double lambda = 1e-3;                   // L2 coefficient
    double w_star = 0.5;                    // anchor weight at init
    std::size_t m = 1;                      // epochs between assignment updates
    std::size_t negatives_per_positive = 5;
    std::size_t epochs_pretrain_max = 200;
    std::size_t epochs_main_max = 200;
    std::size_t patience = 10;              // early-stop window (epochs)
    std::size_t batch_size_triplets = 8192;
    std::size_t assignment_batch_rows = 4096;
    double rcond = 1e-10;                   // pinv cutoff
    std::uint64_t seed = 42;
    double balance_factor = 1.05;           // partition size slack
    int scalar_width = 32;                  // 32 or 64
    InitMethod init_method = InitMethod::metis;

    /// Throws naming the offending key. Constraints involving the dataset
    /// (c vs. entity count) are checked by the trainer.
    void validate() const;
};

/// key=value per line, '#' starts a comment, blank lines ignored. Unknown
/// keys and malformed values raise errors naming the key; missing keys keep
/// the defaults above.
TrainConfig parse_config_text(const std::string& text);
TrainConfig parse_config(const std::string& path);

/// Ordered key=value snapshot of every field (manifest, run-id hashing).
std::vector<std::pair<std::string, std::string>> config_items(const TrainConfig& cfg);

const char* init_method_name(InitMethod m);

} // namespace gcflite
