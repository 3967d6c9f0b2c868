#pragma once

#include <cstdint>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace gcflite {

using index_t = std::uint32_t;

enum class Phase : std::uint8_t { pretrain = 0, main = 1 };

inline const char* phase_name(Phase p) {
    return p == Phase::pretrain ? "pretrain" : "main";
}

template <class T>
bool all_finite(std::span<const T> xs) {
    for (const T& x : xs)
        if (!std::isfinite(static_cast<double>(x))) return false;
    return true;
}

inline void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

} // namespace gcflite
