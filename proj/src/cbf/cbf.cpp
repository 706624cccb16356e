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

#include "impc/cbf/cbf.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace impc::cbf {

void CbfParams::validate() const {
  if (relative_degree < 1) throw std::invalid_argument("CbfParams: relative degree must be >= 1");
  if (order < 1 || order > relative_degree) {
    throw std::invalid_argument("CbfParams: enforced order must lie in [1, relative degree]");
  }
  if (static_cast<int>(gammas.size()) < relative_degree) {
    throw std::invalid_argument("CbfParams: need one decay rate per order");
  }
  for (double g : gammas) {
    if (!(g > 0.0 && g <= 1.0)) throw std::invalid_argument("CbfParams: decay rates must lie in (0, 1]");
  }
  if (margin < 0.0) throw std::invalid_argument("CbfParams: margin must be nonnegative");
  if (!(slack_min <= slack_max)) throw std::invalid_argument("CbfParams: slack_min > slack_max");
}

AffineFunction psi0_affine(const geometry::Hyperplane& plane, const geometry::AffinePointMap& map,
                           const dynamics::Model& model) {
  const int l = model.workspace_dim();
  const auto orient = model.orientation_indices();
  if (plane.normal.size() != l || map.base.size() != l) {
    throw DimensionMismatch("psi0_affine: workspace dimension mismatch");
  }
  AffineFunction f;
  f.coeffs = Vec::Zero(model.state_dim());
  f.coeffs.head(l) = plane.normal;
  const Vec rot_coeffs = map.orientation_jacobian.transpose() * plane.normal;
  for (std::size_t r = 0; r < orient.size(); ++r) f.coeffs[orient[r]] = rot_coeffs[static_cast<Eigen::Index>(r)];
  f.constant = plane.normal.dot(map.base - plane.anchor) - rot_coeffs.dot(map.nominal_orientation) -
               plane.margin;
  return f;
}

double psi0(const geometry::Hyperplane& plane, const geometry::AffinePointMap& map,
            const dynamics::Model& model, const Vec& state) {
  return plane.normal.dot(map.evaluate(model.position(state), model.orientation(state)) - plane.anchor) -
         plane.margin;
}

std::vector<std::vector<double>> psi_sequence(const std::vector<double>& psi0_values,
                                              const CbfParams& params) {
  params.validate();
  if (static_cast<int>(psi0_values.size()) < params.relative_degree + 1) {
    throw std::invalid_argument("psi_sequence: need at least m + 1 samples");
  }
  std::vector<std::vector<double>> out;
  const std::vector<double>* prev = &psi0_values;
  for (int i = 1; i <= params.relative_degree; ++i) {
    const double g = params.gammas[static_cast<std::size_t>(i - 1)];
    std::vector<double> cur(prev->size() - 1);
    for (std::size_t k = 0; k + 1 < prev->size(); ++k) {
      cur[k] = (*prev)[k + 1] - (*prev)[k] + g * (*prev)[k];
    }
    out.push_back(std::move(cur));
    prev = &out.back();
  }
  return out;
}

std::vector<DcbfRow> build_dcbf_rows(const std::vector<SafetyConstraint>& constraints,
                                     const CbfParams& params, int horizon,
                                     const dynamics::Model& model) {
  params.validate();
  if (params.order != 1) {
    throw std::invalid_argument("build_dcbf_rows: relaxed rows are implemented for order 1 only");
  }
  const double decay = 1.0 - params.gamma1();
  std::vector<DcbfRow> rows;
  rows.reserve(constraints.size());
  for (const auto& c : constraints) {
    if (c.step < 1 || c.step > horizon) {
      throw std::invalid_argument("build_dcbf_rows: step " + std::to_string(c.step) + " outside 1..N");
    }
    if (c.hyperplane.normal.size() == 0 || std::abs(c.hyperplane.normal.norm() - 1.0) > 1e-9) {
      throw DegenerateContact("build_dcbf_rows: no usable hyperplane for obstacle " +
                              std::to_string(c.obstacle) + " at step " + std::to_string(c.step));
    }
    geometry::Hyperplane plane = c.hyperplane;
    plane.margin = params.margin;
    const AffineFunction f = psi0_affine(plane, c.point_map, model);
    DcbfRow row;
    row.step = c.step;
    row.obstacle = c.obstacle;
    row.piece = c.piece;
    row.state_coeffs = f.coeffs;
    row.constant = f.constant;
    // A negative current value would let omega relax below the separation floor.
    row.slack_coeff = std::pow(decay, c.step) * std::max(c.psi0_current, 0.0);
    row.slack_min = params.slack_min;
    row.slack_max = params.slack_max;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace impc::cbf
