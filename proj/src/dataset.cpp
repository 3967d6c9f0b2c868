#include "gcflite/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace gcflite {

std::size_t InteractionDataset::train_count() const {
    return std::accumulate(train.begin(), train.end(), std::size_t{0},
                           [](std::size_t acc, const auto& v) { return acc + v.size(); });
}

std::size_t InteractionDataset::test_count() const {
    return std::accumulate(test.begin(), test.end(), std::size_t{0},
                           [](std::size_t acc, const auto& v) { return acc + v.size(); });
}

std::vector<std::pair<index_t, index_t>> load_interactions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::vector<std::pair<index_t, index_t>> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream tokens(line);
        std::string tok;
        bool have_user = false;
        index_t user = 0;
        while (tokens >> tok) {
            index_t value = 0;
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
            if (ec != std::errc{} || ptr != tok.data() + tok.size())
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": non-integer token '" + tok + "'");
            if (!have_user) {
                user = value;
                have_user = true;
            } else {
                pairs.emplace_back(user, value);
            }
        }
    }
    return pairs;
}

InteractionDataset dataset_from_pairs(const std::vector<std::pair<index_t, index_t>>& train,
                                      const std::vector<std::pair<index_t, index_t>>& test) {
    InteractionDataset ds;
    for (const auto* pairs : {&train, &test})
        for (const auto& [u, i] : *pairs) {
            ds.n_users = std::max(ds.n_users, static_cast<std::size_t>(u) + 1);
            ds.n_items = std::max(ds.n_items, static_cast<std::size_t>(i) + 1);
        }
    ds.train.resize(ds.n_users);
    ds.test.resize(ds.n_users);
    for (const auto& [u, i] : train) ds.train[u].push_back(i);
    for (const auto& [u, i] : test) ds.test[u].push_back(i);
    for (auto* lists : {&ds.train, &ds.test})
        for (auto& items : *lists) {
            std::sort(items.begin(), items.end());
            items.erase(std::unique(items.begin(), items.end()), items.end());
        }
    return ds;
}

InteractionDataset load_dataset(const std::string& train_path, const std::string& test_path) {
    return dataset_from_pairs(load_interactions(train_path), load_interactions(test_path));
}

void save_interactions(const std::string& path, const std::vector<std::vector<index_t>>& items) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t u = 0; u < items.size(); ++u) {
        out << u;
        for (index_t i : items[u]) out << ' ' << i;
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

} // namespace gcflite
