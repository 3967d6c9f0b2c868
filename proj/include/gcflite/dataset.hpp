#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "gcflite/common.hpp"

namespace gcflite {

/// User-item interactions with a train/test split. Item lists are per user,
/// sorted and deduplicated. Entity ids used elsewhere follow the block
/// layout: users are 0..n_users-1, item j is entity n_users + j.
struct InteractionDataset {
    std::size_t n_users = 0;
    std::size_t n_items = 0;
    std::vector<std::vector<index_t>> train;   // size n_users
    std::vector<std::vector<index_t>> test;    // size n_users

    std::size_t n_entities() const { return n_users + n_items; }
    std::size_t train_count() const;
    std::size_t test_count() const;
};

/// Parse one interaction file: every line is "user item item ...",
/// whitespace-separated non-negative integers. Empty lines are skipped; a
/// bare user id contributes no pairs. Malformed tokens raise an error
/// naming the line.
std::vector<std::pair<index_t, index_t>> load_interactions(const std::string& path);

/// Load a split from two files; user/item counts are max id + 1 across both.
InteractionDataset load_dataset(const std::string& train_path, const std::string& test_path);

/// Assemble a dataset from in-memory pairs (counts inferred the same way).
InteractionDataset dataset_from_pairs(const std::vector<std::pair<index_t, index_t>>& train,
                                      const std::vector<std::pair<index_t, index_t>>& test);

/// Write one split in the line format load_interactions reads. Every user
/// gets a line, so load(save(x)) reproduces x exactly.
void save_interactions(const std::string& path, const std::vector<std::vector<index_t>>& items);

} // namespace gcflite
