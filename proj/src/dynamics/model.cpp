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

#include "impc/dynamics/model.hpp"

#include <cmath>

namespace impc::dynamics {

namespace {

void check_sizes(const Model& m, const Vec& x, const Vec& u) {
  if (x.size() != m.state_dim() || u.size() != m.input_dim()) {
    throw DimensionMismatch(m.name() + ": state/input size mismatch");
  }
}

}  // namespace

Vec Model::orientation(const Vec& x) const {
  const auto idx = orientation_indices();
  Vec out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = x[idx[i]];
  return out;
}

Vec Unicycle2D::step(const Vec& x, const Vec& u, double dt) const {
  check_sizes(*this, x, u);
  Vec next = x;
  next[0] += x[3] * std::cos(x[2]) * dt;
  next[1] += x[3] * std::sin(x[2]) * dt;
  next[2] += u[0] * dt;
  next[3] += u[1] * dt;
  return next;
}

void Unicycle2D::jacobians(const Vec& x, const Vec& u, double dt, Mat& a, Mat& b) const {
  check_sizes(*this, x, u);
  const double c = std::cos(x[2]);
  const double s = std::sin(x[2]);
  a = Mat::Identity(4, 4);
  a(0, 2) = -x[3] * s * dt;
  a(0, 3) = c * dt;
  a(1, 2) = x[3] * c * dt;
  a(1, 3) = s * dt;
  b = Mat::Zero(4, 2);
  b(2, 0) = dt;
  b(3, 1) = dt;
}

Vec Unicycle2D::compose_state(const Vec& position, const Vec& orientation, double speed) const {
  Vec x(4);
  x << position[0], position[1], orientation[0], speed;
  return x;
}

Vec Unicycle3D::step(const Vec& x, const Vec& u, double dt) const {
  check_sizes(*this, x, u);
  const double c1 = std::cos(x[3]), s1 = std::sin(x[3]);
  const double c2 = std::cos(x[4]), s2 = std::sin(x[4]);
  Vec next = x;
  next[0] += x[5] * c2 * c1 * dt;
  next[1] += x[5] * c2 * s1 * dt;
  next[2] += x[5] * s2 * dt;
  next[3] += u[0] * dt;
  next[4] += u[1] * dt;
  next[5] += u[2] * dt;
  return next;
}

void Unicycle3D::jacobians(const Vec& x, const Vec& u, double dt, Mat& a, Mat& b) const {
  check_sizes(*this, x, u);
  const double c1 = std::cos(x[3]), s1 = std::sin(x[3]);
  const double c2 = std::cos(x[4]), s2 = std::sin(x[4]);
  const double v = x[5];
  a = Mat::Identity(6, 6);
  a(0, 3) = -v * c2 * s1 * dt;
  a(0, 4) = -v * s2 * c1 * dt;
  a(0, 5) = c2 * c1 * dt;
  a(1, 3) = v * c2 * c1 * dt;
  a(1, 4) = -v * s2 * s1 * dt;
  a(1, 5) = c2 * s1 * dt;
  a(2, 4) = v * c2 * dt;
  a(2, 5) = s2 * dt;
  b = Mat::Zero(6, 3);
  b(3, 0) = dt;
  b(4, 1) = dt;
  b(5, 2) = dt;
}

Vec Unicycle3D::compose_state(const Vec& position, const Vec& orientation, double speed) const {
  Vec x(6);
  x << position[0], position[1], position[2], orientation[0], orientation[1], speed;
  return x;
}

std::shared_ptr<const Model> make_model(int workspace_dim) {
  if (workspace_dim == 2) return std::make_shared<Unicycle2D>();
  if (workspace_dim == 3) return std::make_shared<Unicycle3D>();
  throw DimensionMismatch("make_model: dimension must be 2 or 3");
}

LinearizedStep linearize(const Model& model, const Vec& x_nom, const Vec& u_nom,
                         const Vec& x_nom_next, double dt) {
  if (x_nom_next.size() != model.state_dim()) throw DimensionMismatch("linearize: next state size");
  LinearizedStep out;
  model.jacobians(x_nom, u_nom, dt, out.a, out.b);
  out.residual = model.step(x_nom, u_nom, dt) - x_nom_next;
  out.nominal_state = x_nom;
  out.nominal_input = u_nom;
  return out;
}

}  // namespace impc::dynamics
