// NEON backend for aarch64. Advanced SIMD is baseline there, so availability
// is a compile-time question; on other architectures this TU only provides
// the nullptr hooks.

#include <cmath>

#include "kernels_internal.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace gcflite::kern {
namespace {

float dot_f32(const float* x, const float* y, std::size_t n) {
    float32x4_t acc = vdupq_n_f32(0.0f);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = vfmaq_f32(acc, vld1q_f32(x + i), vld1q_f32(y + i));
    float sum = vaddvq_f32(acc);
    for (; i < n; ++i) sum += x[i] * y[i];
    return sum;
}

double dot_f64(const double* x, const double* y, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
    double sum = vaddvq_f64(acc);
    for (; i < n; ++i) sum += x[i] * y[i];
    return sum;
}

void axpy_f32(std::size_t n, float a, const float* x, float* y) {
    const float32x4_t va = vdupq_n_f32(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        vst1q_f32(y + i, vfmaq_f32(vld1q_f32(y + i), va, vld1q_f32(x + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void axpy_f64(std::size_t n, double a, const double* x, double* y) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void scal_f32(std::size_t n, float a, float* x) {
    const float32x4_t va = vdupq_n_f32(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        vst1q_f32(x + i, vmulq_f32(va, vld1q_f32(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void scal_f64(std::size_t n, double a, double* x) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void rot_f32(std::size_t n, float* x, float* y, float c, float s) {
    const float32x4_t vc = vdupq_n_f32(c);
    const float32x4_t vs = vdupq_n_f32(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t vx = vld1q_f32(x + i);
        const float32x4_t vy = vld1q_f32(y + i);
        vst1q_f32(x + i, vfmsq_f32(vmulq_f32(vc, vx), vs, vy));
        vst1q_f32(y + i, vfmaq_f32(vmulq_f32(vc, vy), vs, vx));
    }
    for (; i < n; ++i) {
        const float xi = x[i], yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

void rot_f64(std::size_t n, double* x, double* y, double c, double s) {
    const float64x2_t vc = vdupq_n_f64(c);
    const float64x2_t vs = vdupq_n_f64(s);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vx = vld1q_f64(x + i);
        const float64x2_t vy = vld1q_f64(y + i);
        vst1q_f64(x + i, vfmsq_f64(vmulq_f64(vc, vx), vs, vy));
        vst1q_f64(y + i, vfmaq_f64(vmulq_f64(vc, vy), vs, vx));
    }
    for (; i < n; ++i) {
        const double xi = x[i], yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

void adam_f32(std::size_t n, float* w, float* m, float* v, const float* g,
              float lr, float b1, float b2, float eps, float c1, float c2) {
    const float32x4_t vb1 = vdupq_n_f32(b1);
    const float32x4_t vb2 = vdupq_n_f32(b2);
    const float32x4_t vq1 = vdupq_n_f32(1.0f - b1);
    const float32x4_t vq2 = vdupq_n_f32(1.0f - b2);
    const float32x4_t vlr = vdupq_n_f32(lr);
    const float32x4_t veps = vdupq_n_f32(eps);
    const float32x4_t vc1 = vdupq_n_f32(c1);
    const float32x4_t vc2 = vdupq_n_f32(c2);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t vg = vld1q_f32(g + i);
        float32x4_t vm = vfmaq_f32(vmulq_f32(vb1, vld1q_f32(m + i)), vq1, vg);
        float32x4_t vv = vfmaq_f32(vmulq_f32(vb2, vld1q_f32(v + i)), vq2, vmulq_f32(vg, vg));
        vst1q_f32(m + i, vm);
        vst1q_f32(v + i, vv);
        const float32x4_t denom = vaddq_f32(vsqrtq_f32(vmulq_f32(vv, vc2)), veps);
        const float32x4_t step = vdivq_f32(vmulq_f32(vlr, vmulq_f32(vm, vc1)), denom);
        vst1q_f32(w + i, vsubq_f32(vld1q_f32(w + i), step));
    }
    for (; i < n; ++i) {
        const float gi = g[i];
        m[i] = b1 * m[i] + (1.0f - b1) * gi;
        v[i] = b2 * v[i] + (1.0f - b2) * gi * gi;
        w[i] -= lr * (m[i] * c1) / (std::sqrt(v[i] * c2) + eps);
    }
}

void adam_f64(std::size_t n, double* w, double* m, double* v, const double* g,
              double lr, double b1, double b2, double eps, double c1, double c2) {
    const float64x2_t vb1 = vdupq_n_f64(b1);
    const float64x2_t vb2 = vdupq_n_f64(b2);
    const float64x2_t vq1 = vdupq_n_f64(1.0 - b1);
    const float64x2_t vq2 = vdupq_n_f64(1.0 - b2);
    const float64x2_t vlr = vdupq_n_f64(lr);
    const float64x2_t veps = vdupq_n_f64(eps);
    const float64x2_t vc1 = vdupq_n_f64(c1);
    const float64x2_t vc2 = vdupq_n_f64(c2);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vg = vld1q_f64(g + i);
        float64x2_t vm = vfmaq_f64(vmulq_f64(vb1, vld1q_f64(m + i)), vq1, vg);
        float64x2_t vv = vfmaq_f64(vmulq_f64(vb2, vld1q_f64(v + i)), vq2, vmulq_f64(vg, vg));
        vst1q_f64(m + i, vm);
        vst1q_f64(v + i, vv);
        const float64x2_t denom = vaddq_f64(vsqrtq_f64(vmulq_f64(vv, vc2)), veps);
        const float64x2_t step = vdivq_f64(vmulq_f64(vlr, vmulq_f64(vm, vc1)), denom);
        vst1q_f64(w + i, vsubq_f64(vld1q_f64(w + i), step));
    }
    for (; i < n; ++i) {
        const double gi = g[i];
        m[i] = b1 * m[i] + (1.0 - b1) * gi;
        v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
        w[i] -= lr * (m[i] * c1) / (std::sqrt(v[i] * c2) + eps);
    }
}

constexpr Ops<float> table_f32 = {&dot_f32, &axpy_f32, &scal_f32, &rot_f32, &adam_f32};
constexpr Ops<double> table_f64 = {&dot_f64, &axpy_f64, &scal_f64, &rot_f64, &adam_f64};

} // namespace

bool neon_available() { return true; }
const Ops<float>* neon_table_f32() { return &table_f32; }
const Ops<double>* neon_table_f64() { return &table_f64; }

} // namespace gcflite::kern

#else // non-aarch64

namespace gcflite::kern {

bool neon_available() { return false; }
const Ops<float>* neon_table_f32() { return nullptr; }
const Ops<double>* neon_table_f64() { return nullptr; }

} // namespace gcflite::kern

#endif
