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

#include "impc/mpc/mpc.hpp"
#include "impc/planner/planner.hpp"

namespace impc::multirobot {

/// One robot: its controller plus the bookkeeping for reference extraction.
struct Agent {
  mpc::Controller controller;
  planner::ReferencePath path;
  Vec goal;
  double goal_radius = 0.05;
  double ref_speed_floor = 0.2;
  double ref_speed_max = 0.2;
  double lookahead = 0.3;
  double progress = 0.0;
  bool reached = false;
  bool failed = false;

  [[nodiscard]] bool at_goal() const;
  /// Reference speed after the reset rule: current speed, kept in [floor, max].
  [[nodiscard]] double reference_speed() const;
  [[nodiscard]] std::vector<geometry::Polytope> pieces() const;
};

struct TeamPlan {
  /// predicted[i][k]: robot i at time t + k, k = 0..N, as planned this step.
  std::vector<std::vector<Vec>> predicted;
};

struct TeamStep {
  std::vector<Vec> inputs;                 // zero for robots that did not move
  std::vector<mpc::StepOutcome> outcomes;  // empty outcome for inactive robots
  std::vector<char> active;                // robot stepped this time
  TeamPlan plan;
};

/// The world robot i sees: static obstacles, robots at rest (goal reached or
/// failed) as static pieces, and the current plans of active robots
/// 0..i-1 as index-aligned moving obstacles.
mpc::World world_for(std::size_t i, const std::vector<Agent>& agents, const std::vector<geometry::Polytope>& statics,
                     const TeamPlan& plan);

/// Plans and applies one time step for every active robot in priority order.
TeamStep plan_team_step(std::vector<Agent>& agents, const std::vector<geometry::Polytope>& statics);

}  // namespace impc::multirobot
