#pragma once

#include "gcflite/kernels.hpp"

namespace gcflite::kern {

// Each backend TU exposes its tables through these hooks; a backend that is
// not compiled in (or not usable on the running CPU) returns nullptr.
const Ops<float>* scalar_table_f32();
const Ops<double>* scalar_table_f64();
const Ops<float>* avx2_table_f32();
const Ops<double>* avx2_table_f64();
const Ops<float>* neon_table_f32();
const Ops<double>* neon_table_f64();

bool avx2_available();
bool neon_available();

} // namespace gcflite::kern
