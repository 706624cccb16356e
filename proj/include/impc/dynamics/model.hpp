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

#include <memory>
#include <string>
#include <vector>

#include "impc/common.hpp"
#include "impc/geometry/queries.hpp"

namespace impc::dynamics {

/// Discrete-time system contract used by the controller. States carry the
/// robot position in the first workspace_dim() entries.
class Model {
 public:
  virtual ~Model() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual int state_dim() const = 0;
  [[nodiscard]] virtual int input_dim() const = 0;
  [[nodiscard]] virtual int workspace_dim() const = 0;

  /// One forward-Euler step.
  [[nodiscard]] virtual Vec step(const Vec& x, const Vec& u, double dt) const = 0;

  /// Analytic Jacobians of step() with respect to x and u.
  virtual void jacobians(const Vec& x, const Vec& u, double dt, Mat& a, Mat& b) const = 0;

  /// State indices holding the orientation parameters (heading; yaw, pitch).
  [[nodiscard]] virtual std::vector<int> orientation_indices() const = 0;
  [[nodiscard]] virtual int speed_index() const = 0;

  /// Builds a state from a position, orientation and speed.
  [[nodiscard]] virtual Vec compose_state(const Vec& position, const Vec& orientation,
                                          double speed) const = 0;

  [[nodiscard]] Vec position(const Vec& x) const { return x.head(workspace_dim()); }
  [[nodiscard]] Vec orientation(const Vec& x) const;
  [[nodiscard]] geometry::Pose pose(const Vec& x) const { return {position(x), orientation(x)}; }
};

/// Planar unicycle: x = [x, y, theta, v], u = [angular rate, acceleration].
class Unicycle2D final : public Model {
 public:
  [[nodiscard]] std::string name() const override { return "unicycle2d"; }
  [[nodiscard]] int state_dim() const override { return 4; }
  [[nodiscard]] int input_dim() const override { return 2; }
  [[nodiscard]] int workspace_dim() const override { return 2; }
  [[nodiscard]] Vec step(const Vec& x, const Vec& u, double dt) const override;
  void jacobians(const Vec& x, const Vec& u, double dt, Mat& a, Mat& b) const override;
  [[nodiscard]] std::vector<int> orientation_indices() const override { return {2}; }
  [[nodiscard]] int speed_index() const override { return 3; }
  [[nodiscard]] Vec compose_state(const Vec& position, const Vec& orientation, double speed) const override;
};

/// Spatial unicycle: x = [x, y, z, yaw, pitch, v], u = [yaw rate, pitch rate, acceleration].
class Unicycle3D final : public Model {
 public:
  [[nodiscard]] std::string name() const override { return "unicycle3d"; }
  [[nodiscard]] int state_dim() const override { return 6; }
  [[nodiscard]] int input_dim() const override { return 3; }
  [[nodiscard]] int workspace_dim() const override { return 3; }
  [[nodiscard]] Vec step(const Vec& x, const Vec& u, double dt) const override;
  void jacobians(const Vec& x, const Vec& u, double dt, Mat& a, Mat& b) const override;
  [[nodiscard]] std::vector<int> orientation_indices() const override { return {3, 4}; }
  [[nodiscard]] int speed_index() const override { return 5; }
  [[nodiscard]] Vec compose_state(const Vec& position, const Vec& orientation, double speed) const override;
};

std::shared_ptr<const Model> make_model(int workspace_dim);

/// Dynamics linearized around a nominal pair:
///   x_{k+1} - xbar_{k+1} = A (x_k - xbar_k) + B (u_k - ubar_k) + d
struct LinearizedStep {
  Mat a;
  Mat b;
  Vec residual;  // d = f(xbar, ubar) - xbar_next
  Vec nominal_state;
  Vec nominal_input;
};

LinearizedStep linearize(const Model& model, const Vec& x_nom, const Vec& u_nom,
                         const Vec& x_nom_next, double dt);

}  // namespace impc::dynamics
