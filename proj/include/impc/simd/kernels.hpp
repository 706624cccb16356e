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

#pragma once

// Dense double-precision kernels used by the QP solver's inner loops.
//
// Every kernel has a portable scalar reference implementation; vectorized
// variants (AVX2+FMA on x86-64, NEON on AArch64) are compiled separately and
// selected once at runtime. Setting IMPC_SIMD=scalar in the environment
// forces the reference path.

#include <cstddef>
#include <string_view>

namespace impc::simd {

struct KernelTable {
  std::string_view name;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);

  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  // Paired plane rotation used by the active-set updates:
  //   a' = c*a + s*b,   b' = xny*(a + a') - b
  void (*rotate)(double* a, double* b, std::size_t n, double c, double s, double xny);

  // y[j] = dot(col_j(A), x) + (offset ? offset[j] : 0) for a column-major
  // rows x cols matrix with leading dimension ld.
  void (*gemv_t)(const double* a, std::size_t rows, std::size_t cols, std::size_t ld,
                 const double* x, const double* offset, double* y);

  // y = A x for a column-major rows x cols matrix.
  void (*gemv_n)(const double* a, std::size_t rows, std::size_t cols, std::size_t ld,
                 const double* x, double* y);
};

/// Reference implementation; always available.
const KernelTable& scalar_kernels();

/// AVX2/FMA variant, or nullptr when the CPU (or the build) lacks it.
const KernelTable* avx2_kernels();

/// NEON variant, or nullptr on non-ARM builds.
const KernelTable* neon_kernels();

/// The table selected for this process: the widest supported variant unless
/// IMPC_SIMD=scalar is set. Resolved once; thread-safe.
const KernelTable& active_kernels();

}  // namespace impc::simd
