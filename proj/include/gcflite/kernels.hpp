#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gcflite::kern {

enum class Backend { scalar, avx2, neon };

const char* backend_name(Backend b);

/// Vector primitives underneath the numeric stack. Each backend fills one
/// table; all backends must agree with the scalar reference to rounding
/// error (see the equivalence tests).
template <class T>
struct Ops {
    /// sum_i x[i] * y[i]
    T (*dot)(const T* x, const T* y, std::size_t n);
    /// y += a * x
    void (*axpy)(std::size_t n, T a, const T* x, T* y);
    /// x *= a
    void (*scal)(std::size_t n, T a, T* x);
    /// Plane rotation: x' = c*x - s*y, y' = s*x + c*y.
    void (*rot)(std::size_t n, T* x, T* y, T c, T s);
    /// Adam update with precomputed bias corrections c1 = 1/(1-b1^t),
    /// c2 = 1/(1-b2^t):
    ///   m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g^2
    ///   w -= lr * (m*c1) / (sqrt(v*c2) + eps)
    void (*adam)(std::size_t n, T* w, T* m, T* v, const T* g,
                 T lr, T b1, T b2, T eps, T c1, T c2);
};

/// Table for the active backend.
template <class T>
const Ops<T>& ops();

/// Table for a specific backend; throws if it is not available on this CPU.
template <class T>
const Ops<T>& ops(Backend b);

Backend active_backend();
void set_backend(Backend b);
std::vector<Backend> supported_backends();

} // namespace gcflite::kern
