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

#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "impc/cbf/cbf.hpp"
#include "impc/common.hpp"
#include "impc/dynamics/model.hpp"
#include "impc/geometry/queries.hpp"
#include "impc/qp/qp.hpp"

namespace impc::mpc {

struct MpcConfig {
  int horizon = 12;
  double dt = 0.1;
  Mat q;  // stage state weight
  Mat r;  // input weight
  Mat p;  // terminal state weight
  double slack_weight = 100.0;  // S, penalizes (omega - 1)^2
  Vec state_lo, state_hi;
  Vec input_lo, input_hi;
  double eps_abs = 0.05;
  double eps_rel = 1e-2;
  int max_iterations = 50;
  double sensing_radius = 0.35;
  cbf::CbfParams cbf;
  qp::QpSettings qp;

  /// Defaults for the planar unicycle (N = 12) and the spatial one (N = 8).
  static MpcConfig defaults_2d();
  static MpcConfig defaults_3d();
  static MpcConfig defaults_for(const dynamics::Model& model);

  /// Throws std::invalid_argument on bad scalars or non-PSD weights,
  /// DimensionMismatch on sizes that disagree with the model.
  void validate(const dynamics::Model& model) const;
};

struct NominalTrajectory {
  std::vector<Vec> states;  // N + 1
  std::vector<Vec> inputs;  // N
};

/// Obstacles seen by one robot. dynamic[k][i] is moving obstacle i at horizon
/// step k (k = 0..N); every step must hold the same count.
struct World {
  std::vector<geometry::Polytope> statics;
  std::vector<std::vector<geometry::Polytope>> dynamic;

  [[nodiscard]] int num_obstacles() const;
  /// Obstacle `index` (statics first, then moving ones) at horizon step k.
  [[nodiscard]] const geometry::Polytope& at(int index, int k) const;
  /// All obstacles as placed at horizon step k.
  [[nodiscard]] std::vector<geometry::Polytope> snapshot(int k) const;
};

/// One DCBF row together with where it came from.
struct ConstraintRecord {
  cbf::DcbfRow row;
  geometry::Hyperplane hyperplane;
  bool from_cache = false;
};

struct IterationResult {
  std::vector<Vec> states;  // X*, N + 1 (x_0 is the measured state)
  std::vector<Vec> inputs;  // U*
  std::vector<double> slacks;  // one per DCBF row
  qp::QpStatus qp_status = qp::QpStatus::NumericalError;
  double e_abs = 0.0;
  double e_rel = 0.0;
  double solve_time = 0.0;
};

struct StepDiagnostics {
  int iterations = 0;
  double total_time = 0.0;  // wall time of the whole iteration loop (s)
  double qp_time = 0.0;     // summed CFTOC solve time (s)
  std::vector<double> qp_times;
  double min_distance = 0.0;  // exact, at the applied state
  int active_obstacles = 0;
  int dcbf_rows = 0;
  qp::QpStatus qp_status = qp::QpStatus::NumericalError;
  double e_abs = 0.0;
  double e_rel = 0.0;
  std::string fallback;  // empty when the optimized input was applied
};

/// e_abs = ||X* - Xbar||_F over the stacked states; e_rel = e_abs / ||Xbar||_F,
/// or +infinity when ||Xbar||_F < 1e-12.
std::pair<double, double> convergence(const Mat& x_star, const Mat& x_bar);
std::pair<double, double> convergence(const std::vector<Vec>& x_star, const std::vector<Vec>& x_bar);

/// Column layout of the CFTOC decision vector
///   z = [x_1 .. x_N, u_0 .. u_{N-1}, omega_1 .. omega_M].
struct CftocLayout {
  int nx = 0;
  int nu = 0;
  int horizon = 0;
  int num_slacks = 0;

  [[nodiscard]] int num_vars() const { return horizon * (nx + nu) + num_slacks; }
  [[nodiscard]] int state(int k) const { return (k - 1) * nx; }  // k = 1..N
  [[nodiscard]] int input(int k) const { return horizon * nx + k * nu; }  // k = 0..N-1
  [[nodiscard]] int slack(int i) const { return horizon * (nx + nu) + i; }
};

struct Cftoc {
  qp::QpProblem problem;
  CftocLayout layout;
};

/// Builds the CFTOC QP. `reference` holds N + 1 reference states (entry 0 is
/// unused by the cost because x_0 is fixed). Throws DimensionMismatch on
/// inconsistent sizes and Infeasible for empty state or input boxes.
Cftoc assemble_cftoc(const NominalTrajectory& nominal, const std::vector<dynamics::LinearizedStep>& linearized,
                     const std::vector<cbf::DcbfRow>& rows, const MpcConfig& config,
                     const std::vector<Vec>& reference);

/// Structural convexity check: symmetric cost with no eigenvalue below -tol.
bool is_convex(const qp::QpProblem& problem, double tol = 1e-9);

/// Hyperplanes from earlier iterations and time steps, reused when the
/// closest points of a pair coincide. Keyed by (obstacle, piece, step).
class HyperplaneCache {
 public:
  struct Entry {
    geometry::Hyperplane plane;
    Vec local_point;  // robot-side point in the body frame
  };

  void put(int obstacle, int piece, int step, Entry entry);
  [[nodiscard]] const Entry* find(int obstacle, int piece, int step) const;
  /// Advances one time step: entries at step k move to k - 1.
  void shift();
  void clear() { entries_.clear(); }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::tuple<int, int, int>, Entry> entries_;
};

struct IterateOutput {
  IterationResult result;
  StepDiagnostics diagnostics;
  bool success = false;  // at least one CFTOC solve was optimal
};

/// The iteration loop for one time step. The warm trajectory's first state is
/// replaced by current_state. Never throws for solver failures; those are
/// reported through success = false.
IterateOutput iterate(const dynamics::Model& model, const geometry::RobotShape& shape, const Vec& current_state,
                      const NominalTrajectory& warm, const std::vector<Vec>& reference, const World& world,
                      const MpcConfig& config, HyperplaneCache* cache = nullptr);

/// Builds the safety constraints for one nominal trajectory. Exposed for tests.
std::vector<cbf::SafetyConstraint> build_safety_constraints(const dynamics::Model& model,
                                                            const geometry::RobotShape& shape,
                                                            const Vec& current_state,
                                                            const NominalTrajectory& nominal, const World& world,
                                                            const MpcConfig& config, HyperplaneCache* cache,
                                                            int* active_count = nullptr);

/// Exact minimum signed distance between the robot at `state` and every
/// obstacle at horizon step k; +infinity without obstacles.
double min_distance(const dynamics::Model& model, const geometry::RobotShape& shape, const Vec& state,
                    const World& world, int k = 0);

struct StepOutcome {
  Vec input;
  Vec next_state;
  StepDiagnostics diagnostics;
  std::vector<double> slacks;
  bool failed = false;  // no safe input was found; the state is left unchanged
};

/// Receding-horizon controller for one robot.
class Controller {
 public:
  Controller(std::shared_ptr<const dynamics::Model> model, geometry::RobotShape shape, MpcConfig config,
             Vec initial_state);

  /// Initial nominal: zero-input rollout of the exact model, or x_0 held for
  /// every step if that rollout collides.
  void initialize(const World& world);

  /// One closed-loop step with N + 1 reference states.
  StepOutcome step(const World& world, const std::vector<Vec>& reference);

  [[nodiscard]] const Vec& state() const { return state_; }
  [[nodiscard]] const NominalTrajectory& plan() const { return plan_; }
  [[nodiscard]] const dynamics::Model& model() const { return *model_; }
  [[nodiscard]] const geometry::RobotShape& shape() const { return shape_; }
  [[nodiscard]] const MpcConfig& config() const { return config_; }
  [[nodiscard]] MpcConfig& mutable_config() { return config_; }

 private:
  void shift_plan(const IterationResult& result);
  void hold_plan();

  std::shared_ptr<const dynamics::Model> model_;
  geometry::RobotShape shape_;
  MpcConfig config_;
  Vec state_;
  NominalTrajectory plan_;
  HyperplaneCache cache_;
  Vec last_input_;
  bool initialized_ = false;
};

}  // namespace impc::mpc
