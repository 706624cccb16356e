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

namespace impc::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void rotate_scalar(double* a, double* b, std::size_t n, double c, double s, double xny) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t1 = a[i];
    const double t2 = b[i];
    a[i] = t1 * c + t2 * s;
    b[i] = xny * (t1 + a[i]) - t2;
  }
}

void gemv_t_scalar(const double* a, std::size_t rows, std::size_t cols, std::size_t ld,
                   const double* x, const double* offset, double* y) {
  for (std::size_t j = 0; j < cols; ++j) {
    const double v = dot_scalar(a + j * ld, x, rows);
    y[j] = offset ? v + offset[j] : v;
  }
}

void gemv_n_scalar(const double* a, std::size_t rows, std::size_t cols, std::size_t ld,
                   const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    if (x[j] != 0.0) axpy_scalar(x[j], a + j * ld, y, rows);
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", dot_scalar, axpy_scalar, rotate_scalar,
                                 gemv_t_scalar, gemv_n_scalar};
  return table;
}

}  // namespace impc::simd
