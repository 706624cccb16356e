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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "impc/geometry/queries.hpp"
#include "impc/mpc/mpc.hpp"
#include "impc/planner/planner.hpp"

namespace impc::scenario {

/// Built-in body-frame shapes: "rectangle", "triangle", "l_shape", "l_shape_3d".
geometry::RobotShape builtin_shape(const std::string& name);
std::vector<std::string> builtin_shape_names();

struct RobotSpec {
  std::string name;
  std::string shape_name;  // empty for explicit pieces
  geometry::RobotShape shape;  // already scaled
  double scale = 1.0;
  Vec initial_state;
  Vec goal;
  double goal_radius = 0.05;
};

struct PlannerSettings {
  double resolution = 0.015;
  double ref_speed = 0.2;      // initial value and floor of the reset rule
  double ref_speed_max = 0.2;  // ceiling of the reset rule
  double lookahead = 0.3;
  double inflation = -1.0;     // < 0: circumscribed radius of each robot
};

struct ScenarioConfig {
  std::string name;
  std::string description;
  int dimension = 2;
  Vec region_lo, region_hi;
  std::vector<geometry::Polytope> obstacles;
  std::vector<RobotSpec> robots;
  mpc::MpcConfig mpc;
  PlannerSettings planner;
  int max_steps = 400;
  std::uint64_t seed = 1;
};

/// Parses a YAML scenario. Throws ParseError (with line and field context) for
/// malformed input and ValidationError for inconsistent or colliding setups.
ScenarioConfig parse_scenario(const std::string& text, const std::string& source = "<string>");
ScenarioConfig load_scenario(const std::filesystem::path& file);

/// Checks sizes, bounds and that every robot starts collision-free.
void validate(const ScenarioConfig& config);

enum class Outcome { GoalReached, Timeout, Infeasible };
std::string_view to_string(Outcome outcome);

struct StepRecord {
  int step = 0;
  double time = 0.0;  // s, at the start of the step
  Vec state;          // before the step
  Vec input;
  Vec next_state;
  std::vector<double> slacks;
  mpc::StepDiagnostics diagnostics;
};

struct RobotTrack {
  std::string name;
  std::vector<StepRecord> steps;
  planner::ReferencePath path;
  Outcome outcome = Outcome::Timeout;
  int reached_step = -1;
};

struct TimingStats {
  double mean_ms = 0.0;
  double std_ms = 0.0;
  std::size_t samples = 0;
};

TimingStats timing_stats(const std::vector<double>& seconds);

struct RunRecord {
  std::string scenario;
  Outcome outcome = Outcome::Timeout;
  int steps = 0;
  std::vector<RobotTrack> robots;
  /// Exact minimum signed distances over all applied states.
  double min_obstacle_distance = 0.0;
  double min_robot_distance = 0.0;
  TimingStats step_time;
  int max_iterations = 0;
  double median_iterations = 0.0;
};

using ProgressFn = std::function<void(int step, const RunRecord&)>;

/// Closed-loop simulation until every robot reaches its goal, a robot fails,
/// or max_steps elapse (max_steps <= 0 uses the config value). Never throws
/// for controller trouble; that is reported in the outcome.
RunRecord run(const ScenarioConfig& config, int max_steps = 0, const ProgressFn& progress = {});

/// Global reference path of robot i.
planner::ReferencePath plan_path(const ScenarioConfig& config, std::size_t robot);

struct BenchmarkCell {
  std::string shape;
  int horizon = 0;
  double gamma = 0.0;
  TimingStats timing;
  int trials = 0;
  int skipped = 0;
};

struct BenchmarkSettings {
  int trials = 20;
  int steps = 20;
  std::vector<int> horizons{6, 12, 24};
  std::vector<double> gammas{0.1, 0.2};
  std::uint64_t seed = 1;
};

/// Timing over random collision-free starts of the first robot. Deterministic
/// for a fixed seed except for the measured times themselves.
std::vector<BenchmarkCell> benchmark(const ScenarioConfig& config, const BenchmarkSettings& settings,
                                     const std::function<void(const std::string&)>& log = {});

/// Offline re-verification: replays the recorded inputs through the exact
/// model and returns the largest per-step state deviation.
double replay_error(const ScenarioConfig& config, const RunRecord& record);

/// Trajectory table: one row per robot step.
void write_trajectory_csv(const RunRecord& record, const std::filesystem::path& file);
void write_summary_json(const ScenarioConfig& config, const RunRecord& record, const std::filesystem::path& file);
/// Top view of obstacles, reference paths, trajectories, starts and goals.
void write_plot_svg(const ScenarioConfig& config, const RunRecord& record, const std::filesystem::path& file);
void write_benchmark_json(const std::vector<BenchmarkCell>& cells, const std::filesystem::path& file);

}  // namespace impc::scenario
