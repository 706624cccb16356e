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

// Dense convex quadratic programs
//
//   minimize    1/2 x' P x + q' x
//   subject to  l <= A x <= u
//
// solved with a dual active-set method (Goldfarb-Idnani). Rows with l == u are
// treated as equalities; infinite bounds drop the corresponding side.

#include <optional>
#include <string_view>

#include "impc/common.hpp"
#include "impc/simd/kernels.hpp"

namespace impc::qp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct QpProblem {
  Mat quadratic_cost;  // P, symmetric positive semidefinite
  Vec linear_cost;     // q
  Mat constraint_matrix;  // A, num_cons x num_vars
  Vec lower_bounds;
  Vec upper_bounds;

  QpProblem() = default;
  QpProblem(Mat p, Vec q, Mat a, Vec l, Vec u);

  [[nodiscard]] Eigen::Index num_vars() const { return linear_cost.size(); }
  [[nodiscard]] Eigen::Index num_cons() const { return constraint_matrix.rows(); }

  /// Symmetrizes P and checks every dimension and the l <= u invariant.
  /// Throws DimensionMismatch or std::invalid_argument.
  void validate_and_symmetrize();

  [[nodiscard]] double objective(const Vec& x) const;
  [[nodiscard]] double max_violation(const Vec& x) const;
};

enum class QpStatus { Optimal, PrimalInfeasible, MaxIterations, NumericalError };

std::string_view to_string(QpStatus status);

struct QpSettings {
  double eps_abs = 1e-6;
  double eps_rel = 1e-6;
  int max_iterations = 4000;
  /// Added to the diagonal of P (scaled by 1 + max|P_ii|) so the Cholesky
  /// factor exists for merely semidefinite costs.
  double regularization = 1e-10;
  /// Optional primal guess. Constraints active at the guess are tried first.
  std::optional<Vec> warm_start;
};

struct QpSolution {
  Vec primal;
  double objective = 0.0;
  QpStatus status = QpStatus::NumericalError;
  int iterations = 0;
  double solve_time = 0.0;  // seconds

  [[nodiscard]] bool optimal() const { return status == QpStatus::Optimal; }
};

/// Solves the problem. Never throws for infeasible or ill-conditioned data;
/// the outcome is reported in QpSolution::status. Deterministic for fixed
/// inputs and settings. Reentrant.
QpSolution solve(const QpProblem& problem, const QpSettings& settings = {});

/// Same as solve() but with an explicit kernel table (equivalence testing).
QpSolution solve_with_kernels(const QpProblem& problem, const QpSettings& settings,
                              const simd::KernelTable& kernels);

}  // namespace impc::qp
