// Copyright 2026 The impc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "impc/simd/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

namespace impc::simd {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void rotate_neon(double* a, double* b, std::size_t n, double c, double s, double xny) {
  const float64x2_t vc = vdupq_n_f64(c);
  const float64x2_t vs = vdupq_n_f64(s);
  const float64x2_t vx = vdupq_n_f64(xny);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t t1 = vld1q_f64(a + i);
    const float64x2_t t2 = vld1q_f64(b + i);
    const float64x2_t na = vfmaq_f64(vmulq_f64(t2, vs), t1, vc);
    const float64x2_t nb = vsubq_f64(vmulq_f64(vx, vaddq_f64(t1, na)), t2);
    vst1q_f64(a + i, na);
    vst1q_f64(b + i, nb);
  }
  for (; i < n; ++i) {
    const double t1 = a[i];
    const double t2 = b[i];
    a[i] = t1 * c + t2 * s;
    b[i] = xny * (t1 + a[i]) - t2;
  }
}

void gemv_t_neon(const double* a, std::size_t rows, std::size_t cols, std::size_t ld,
                 const double* x, const double* offset, double* y) {
  for (std::size_t j = 0; j < cols; ++j) {
    const double v = dot_neon(a + j * ld, x, rows);
    y[j] = offset ? v + offset[j] : v;
  }
}

void gemv_n_neon(const double* a, std::size_t rows, std::size_t cols, std::size_t ld,
                 const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    if (x[j] != 0.0) axpy_neon(x[j], a + j * ld, y, rows);
  }
}

}  // namespace

const KernelTable* neon_kernels() {
  static const KernelTable table{"neon", dot_neon, axpy_neon, rotate_neon, gemv_t_neon,
                                 gemv_n_neon};
  return &table;
}

}  // namespace impc::simd

#else

namespace impc::simd {
const KernelTable* neon_kernels() { return nullptr; }
}  // namespace impc::simd

#endif
