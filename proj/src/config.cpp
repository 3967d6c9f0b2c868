#include "gcflite/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "gcflite/common.hpp"

namespace gcflite {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw std::invalid_argument("config key '" + key + "': bad value '" + value + "'");
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

using Setter = std::function<void(TrainConfig&, const std::string&, const std::string&)>;

template <class T, class F>
Setter num_setter(F field) {
    return [field](TrainConfig& c, const std::string& k, const std::string& v) {
        c.*field = parse_number<T>(k, v);
    };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"d", num_setter<std::size_t>(&TrainConfig::d)},
        {"c", num_setter<std::size_t>(&TrainConfig::c)},
        {"t", num_setter<std::size_t>(&TrainConfig::t)},
        {"L", num_setter<std::size_t>(&TrainConfig::L)},
        {"lr", num_setter<double>(&TrainConfig::lr)},
        {"lambda", num_setter<double>(&TrainConfig::lambda)},
        {"w_star", num_setter<double>(&TrainConfig::w_star)},
        {"m", num_setter<std::size_t>(&TrainConfig::m)},
        {"negatives_per_positive", num_setter<std::size_t>(&TrainConfig::negatives_per_positive)},
        {"epochs_pretrain_max", num_setter<std::size_t>(&TrainConfig::epochs_pretrain_max)},
        {"epochs_main_max", num_setter<std::size_t>(&TrainConfig::epochs_main_max)},
        {"patience", num_setter<std::size_t>(&TrainConfig::patience)},
        {"batch_size_triplets", num_setter<std::size_t>(&TrainConfig::batch_size_triplets)},
        {"assignment_batch_rows", num_setter<std::size_t>(&TrainConfig::assignment_batch_rows)},
        {"rcond", num_setter<double>(&TrainConfig::rcond)},
        {"seed", num_setter<std::uint64_t>(&TrainConfig::seed)},
        {"balance_factor", num_setter<double>(&TrainConfig::balance_factor)},
        {"scalar_width", num_setter<int>(&TrainConfig::scalar_width)},
        {"init_method",
         [](TrainConfig& c, const std::string& k, const std::string& v) {
             if (v == "metis") c.init_method = InitMethod::metis;
             else if (v == "random") c.init_method = InitMethod::random;
             else throw std::invalid_argument("config key '" + k + "': bad value '" + v + "'");
         }},
    };
    return table;
}

} // namespace

void TrainConfig::validate() const {
    require(d >= 1, "d must be >= 1");
    require(c >= 1, "c must be >= 1");
    require(t >= 1, "t must be >= 1");
    require(t <= c, "t exceeds c");
    require(lr > 0.0, "lr must be positive");
    require(lambda >= 0.0, "lambda must be non-negative");
    require(w_star > 0.0 && w_star <= 1.0, "w_star must lie in (0, 1]");
    require(m >= 1, "m must be >= 1");
    require(negatives_per_positive >= 1, "negatives_per_positive must be >= 1");
    require(batch_size_triplets >= 1, "batch_size_triplets must be >= 1");
    require(assignment_batch_rows >= 1, "assignment_batch_rows must be >= 1");
    require(rcond > 0.0 && rcond < 1.0, "rcond must lie in (0, 1)");
    require(balance_factor >= 1.0, "balance_factor must be >= 1");
    require(scalar_width == 32 || scalar_width == 64, "scalar_width must be 32 or 64");
}

TrainConfig parse_config_text(const std::string& text) {
    TrainConfig cfg;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line is not key=value: '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end())
            throw std::invalid_argument("unknown config key '" + key + "'");
        it->second(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

TrainConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::vector<std::pair<std::string, std::string>> config_items(const TrainConfig& cfg) {
    return {
        {"d", std::to_string(cfg.d)},
        {"c", std::to_string(cfg.c)},
        {"t", std::to_string(cfg.t)},
        {"L", std::to_string(cfg.L)},
        {"lr", fmt(cfg.lr)},
        {"lambda", fmt(cfg.lambda)},
        {"w_star", fmt(cfg.w_star)},
        {"m", std::to_string(cfg.m)},
        {"negatives_per_positive", std::to_string(cfg.negatives_per_positive)},
        {"epochs_pretrain_max", std::to_string(cfg.epochs_pretrain_max)},
        {"epochs_main_max", std::to_string(cfg.epochs_main_max)},
        {"patience", std::to_string(cfg.patience)},
        {"batch_size_triplets", std::to_string(cfg.batch_size_triplets)},
        {"assignment_batch_rows", std::to_string(cfg.assignment_batch_rows)},
        {"rcond", fmt(cfg.rcond)},
        {"seed", std::to_string(cfg.seed)},
        {"balance_factor", fmt(cfg.balance_factor)},
        {"scalar_width", std::to_string(cfg.scalar_width)},
        {"init_method", init_method_name(cfg.init_method)},
    };
}

const char* init_method_name(InitMethod m) {
    return m == InitMethod::metis ? "metis" : "random";
}

} // namespace gcflite
