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

#include <vector>

#include "impc/common.hpp"
#include "impc/dynamics/model.hpp"
#include "impc/geometry/queries.hpp"

namespace impc::cbf {

struct CbfParams {
  int relative_degree = 1;        // m
  int order = 1;                  // enforced order m_cbf; relaxed rows exist for 1 only
  std::vector<double> gammas{0.1};  // decay rates, one per order, each in (0, 1]
  double margin = 0.0;            // safety margin epsilon (m)
  double slack_min = 0.0;
  double slack_max = 1.0;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
  [[nodiscard]] double gamma1() const { return gammas.front(); }
};

/// value(x) = coeffs . x + constant
struct AffineFunction {
  Vec coeffs;
  double constant = 0.0;

  [[nodiscard]] double operator()(const Vec& x) const { return coeffs.dot(x) + constant; }
};

/// psi0 as an affine function of the full state: n . (c_robot(x | xbar) - anchor) - margin.
AffineFunction psi0_affine(const geometry::Hyperplane& plane, const geometry::AffinePointMap& map,
                           const dynamics::Model& model);

double psi0(const geometry::Hyperplane& plane, const geometry::AffinePointMap& map,
            const dynamics::Model& model, const Vec& state);

/// Evaluates psi_i = (psi_{i-1}[k+1] - psi_{i-1}[k]) + gamma_i psi_{i-1}[k] for
/// i = 1..relative_degree along a sampled psi0 sequence. Entry i-1 of the
/// result has psi0.size() - i values.
std::vector<std::vector<double>> psi_sequence(const std::vector<double>& psi0_values,
                                              const CbfParams& params);

/// Inputs for one DCBF row: the hyperplane and point map built at the nominal
/// state of horizon step `step`, and psi0 at the measured current state.
struct SafetyConstraint {
  int step = 1;
  int obstacle = -1;
  int piece = -1;
  geometry::Hyperplane hyperplane;
  geometry::AffinePointMap point_map;
  double psi0_current = 0.0;
};

/// One relaxed first-order row:
///   state_coeffs . x_step + constant - slack_coeff * omega >= 0,  omega in [slack_min, slack_max]
/// i.e. psi0(x_step) >= omega * (1 - gamma1)^step * psi0(x_0).
struct DcbfRow {
  int step = 1;
  int obstacle = -1;
  int piece = -1;
  Vec state_coeffs;
  double constant = 0.0;
  double slack_coeff = 0.0;
  double slack_min = 0.0;
  double slack_max = 1.0;

  [[nodiscard]] double evaluate(const Vec& state, double omega) const {
    return state_coeffs.dot(state) + constant - slack_coeff * omega;
  }
};

/// Throws DegenerateContact for a constraint without a usable normal and
/// std::invalid_argument for steps outside 1..horizon or order != 1.
std::vector<DcbfRow> build_dcbf_rows(const std::vector<SafetyConstraint>& constraints,
                                     const CbfParams& params, int horizon,
                                     const dynamics::Model& model);

}  // namespace impc::cbf
