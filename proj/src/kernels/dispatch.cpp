#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

#include "kernels_internal.hpp"

namespace gcflite::kern {
namespace {

const Ops<float>* table_for_f32(Backend b) {
    switch (b) {
        case Backend::scalar: return scalar_table_f32();
        case Backend::avx2: return avx2_table_f32();
        case Backend::neon: return neon_table_f32();
    }
    return nullptr;
}

const Ops<double>* table_for_f64(Backend b) {
    switch (b) {
        case Backend::scalar: return scalar_table_f64();
        case Backend::avx2: return avx2_table_f64();
        case Backend::neon: return neon_table_f64();
    }
    return nullptr;
}

Backend pick_default() {
    if (const char* env = std::getenv("GCFLITE_BACKEND")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_available()) return Backend::avx2;
        if (std::strcmp(env, "neon") == 0 && neon_available()) return Backend::neon;
        // unknown or unavailable name: fall through to auto pick
    }
    if (avx2_available()) return Backend::avx2;
    if (neon_available()) return Backend::neon;
    return Backend::scalar;
}

std::atomic<Backend> g_active{pick_default()};

} // namespace

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "?";
}

Backend active_backend() { return g_active.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (table_for_f32(b) == nullptr)
        throw std::runtime_error(std::string("backend not available on this CPU: ") +
                                 backend_name(b));
    g_active.store(b, std::memory_order_relaxed);
}

std::vector<Backend> supported_backends() {
    std::vector<Backend> out{Backend::scalar};
    if (avx2_available()) out.push_back(Backend::avx2);
    if (neon_available()) out.push_back(Backend::neon);
    return out;
}

template <>
const Ops<float>& ops<float>(Backend b) {
    const Ops<float>* t = table_for_f32(b);
    if (!t)
        throw std::runtime_error(std::string("backend not available on this CPU: ") +
                                 backend_name(b));
    return *t;
}

template <>
const Ops<double>& ops<double>(Backend b) {
    const Ops<double>* t = table_for_f64(b);
    if (!t)
        throw std::runtime_error(std::string("backend not available on this CPU: ") +
                                 backend_name(b));
    return *t;
}

template <>
const Ops<float>& ops<float>() {
    return ops<float>(active_backend());
}

template <>
const Ops<double>& ops<double>() {
    return ops<double>(active_backend());
}

} // namespace gcflite::kern
