#include <cmath>

#include "kernels_internal.hpp"

namespace gcflite::kern {
namespace {

template <class T>
T dot_scalar(const T* x, const T* y, std::size_t n) {
    T acc{0};
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

template <class T>
void axpy_scalar(std::size_t n, T a, const T* x, T* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

template <class T>
void scal_scalar(std::size_t n, T a, T* x) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

template <class T>
void rot_scalar(std::size_t n, T* x, T* y, T c, T s) {
    for (std::size_t i = 0; i < n; ++i) {
        const T xi = x[i], yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

template <class T>
void adam_scalar(std::size_t n, T* w, T* m, T* v, const T* g,
                 T lr, T b1, T b2, T eps, T c1, T c2) {
    for (std::size_t i = 0; i < n; ++i) {
        const T gi = g[i];
        m[i] = b1 * m[i] + (T{1} - b1) * gi;
        v[i] = b2 * v[i] + (T{1} - b2) * gi * gi;
        w[i] -= lr * (m[i] * c1) / (std::sqrt(v[i] * c2) + eps);
    }
}

template <class T>
constexpr Ops<T> table = {
    &dot_scalar<T>, &axpy_scalar<T>, &scal_scalar<T>, &rot_scalar<T>, &adam_scalar<T>,
};

} // namespace

const Ops<float>* scalar_table_f32() { return &table<float>; }
const Ops<double>* scalar_table_f64() { return &table<double>; }

} // namespace gcflite::kern
