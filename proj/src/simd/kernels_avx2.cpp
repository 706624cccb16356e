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

// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include "impc/simd/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace impc::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void rotate_avx2(double* a, double* b, std::size_t n, double c, double s, double xny) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  const __m256d vx = _mm256_set1_pd(xny);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t1 = _mm256_loadu_pd(a + i);
    const __m256d t2 = _mm256_loadu_pd(b + i);
    const __m256d na = _mm256_fmadd_pd(t1, vc, _mm256_mul_pd(t2, vs));
    const __m256d nb = _mm256_fmsub_pd(vx, _mm256_add_pd(t1, na), t2);
    _mm256_storeu_pd(a + i, na);
    _mm256_storeu_pd(b + i, nb);
  }
  for (; i < n; ++i) {
    const double t1 = a[i];
    const double t2 = b[i];
    a[i] = t1 * c + t2 * s;
    b[i] = xny * (t1 + a[i]) - t2;
  }
}

void gemv_t_avx2(const double* a, std::size_t rows, std::size_t cols, std::size_t ld,
                 const double* x, const double* offset, double* y) {
  for (std::size_t j = 0; j < cols; ++j) {
    const double v = dot_avx2(a + j * ld, x, rows);
    y[j] = offset ? v + offset[j] : v;
  }
}

void gemv_n_avx2(const double* a, std::size_t rows, std::size_t cols, std::size_t ld,
                 const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    if (x[j] != 0.0) axpy_avx2(x[j], a + j * ld, y, rows);
  }
}

}  // namespace

const KernelTable* avx2_kernels_unchecked() {
  static const KernelTable table{"avx2", dot_avx2, axpy_avx2, rotate_avx2, gemv_t_avx2,
                                 gemv_n_avx2};
  return &table;
}

}  // namespace impc::simd

#else

namespace impc::simd {
const KernelTable* avx2_kernels_unchecked() { return nullptr; }
}  // namespace impc::simd

#endif
