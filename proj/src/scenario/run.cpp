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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "impc/multirobot/team.hpp"
#include "impc/scenario/scenario.hpp"

namespace impc::scenario {

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::GoalReached: return "GoalReached";
    case Outcome::Timeout: return "Timeout";
    case Outcome::Infeasible: return "Infeasible";
  }
  return "unknown";
}

TimingStats timing_stats(const std::vector<double>& seconds) {
  TimingStats s;
  s.samples = seconds.size();
  if (seconds.empty()) return s;
  const double mean = std::accumulate(seconds.begin(), seconds.end(), 0.0) / static_cast<double>(seconds.size());
  double var = 0.0;
  for (double x : seconds) var += (x - mean) * (x - mean);
  var = seconds.size() > 1 ? var / static_cast<double>(seconds.size() - 1) : 0.0;
  s.mean_ms = 1e3 * mean;
  s.std_ms = 1e3 * std::sqrt(var);
  return s;
}

double robot_inflation(const ScenarioConfig& config, std::size_t robot) {
  return config.planner.inflation >= 0.0 ? config.planner.inflation
                                         : config.robots[robot].shape.circumscribed_radius();
}

planner::ReferencePath plan_path(const ScenarioConfig& config, std::size_t robot) {
  const auto& spec = config.robots.at(robot);
  const auto grid = planner::GridMap::rasterize(config.obstacles, config.region_lo, config.region_hi,
                                                config.planner.resolution, robot_inflation(config, robot));
  const auto model = dynamics::make_model(config.dimension);
  return planner::astar(grid, model->position(spec.initial_state), spec.goal);
}

namespace {

std::vector<multirobot::Agent> make_agents(const ScenarioConfig& config) {
  std::vector<multirobot::Agent> agents;
  const auto model = dynamics::make_model(config.dimension);
  for (std::size_t i = 0; i < config.robots.size(); ++i) {
    const auto& spec = config.robots[i];
    multirobot::Agent a{mpc::Controller(model, spec.shape, config.mpc, spec.initial_state),
                        plan_path(config, i),
                        spec.goal,
                        spec.goal_radius,
                        config.planner.ref_speed,
                        config.planner.ref_speed_max,
                        config.planner.lookahead};
    agents.push_back(std::move(a));
  }
  return agents;
}

double median(std::vector<int> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

RunRecord run(const ScenarioConfig& config, int max_steps, const ProgressFn& progress) {
  RunRecord rec;
  rec.scenario = config.name;
  rec.min_obstacle_distance = std::numeric_limits<double>::infinity();
  rec.min_robot_distance = std::numeric_limits<double>::infinity();
  if (max_steps <= 0) max_steps = config.max_steps;
  for (const auto& spec : config.robots) {
    RobotTrack t;
    t.name = spec.name;
    rec.robots.push_back(std::move(t));
  }

  std::vector<multirobot::Agent> agents;
  try {
    agents = make_agents(config);
  } catch (const NoPath&) {
    // Name every robot without a path, not just the first one found.
    for (std::size_t i = 0; i < config.robots.size(); ++i) {
      try {
        plan_path(config, i);
      } catch (const NoPath&) {
        rec.robots[i].outcome = Outcome::Infeasible;
      }
    }
    rec.outcome = Outcome::Infeasible;
    return rec;
  }
  for (std::size_t i = 0; i < agents.size(); ++i) rec.robots[i].path = agents[i].path;
  const auto& model = agents.front().controller.model();
  const double dt = config.mpc.dt;

  std::vector<double> times;
  std::vector<int> iterations;
  rec.outcome = Outcome::Timeout;
  for (int step = 0; step < max_steps; ++step) {
    std::vector<Vec> before;
    for (const auto& a : agents) before.push_back(a.controller.state());
    multirobot::TeamStep ts;
    try {
      ts = multirobot::plan_team_step(agents, config.obstacles);
    } catch (const std::exception&) {
      rec.outcome = Outcome::Infeasible;
      break;
    }
    rec.steps = step + 1;
    bool failed = false;
    for (std::size_t i = 0; i < agents.size(); ++i) {
      if (ts.active[i] == 0) continue;
      auto& oc = ts.outcomes[i];
      if (oc.failed) {
        failed = true;
        continue;
      }
      StepRecord sr;
      sr.step = step;
      sr.time = step * dt;
      sr.state = before[i];
      sr.input = oc.input;
      sr.next_state = oc.next_state;
      sr.slacks = oc.slacks;
      sr.diagnostics = oc.diagnostics;
      const auto pieces = geometry::pose_to_world(agents[i].controller.shape(), model.pose(oc.next_state));
      double d = std::numeric_limits<double>::infinity();
      if (!config.obstacles.empty()) d = geometry::min_signed_distance(config.obstacles, pieces);
      sr.diagnostics.min_distance = d;
      rec.min_obstacle_distance = std::min(rec.min_obstacle_distance, d);
      times.push_back(oc.diagnostics.total_time);
      iterations.push_back(oc.diagnostics.iterations);
      rec.robots[i].steps.push_back(std::move(sr));
      if (agents[i].reached && rec.robots[i].reached_step < 0) {
        rec.robots[i].reached_step = step;
        rec.robots[i].outcome = Outcome::GoalReached;
      }
    }
    for (std::size_t i = 0; i < agents.size(); ++i) {
      for (std::size_t j = i + 1; j < agents.size(); ++j) {
        rec.min_robot_distance =
            std::min(rec.min_robot_distance, geometry::min_signed_distance(agents[i].pieces(), agents[j].pieces()));
      }
    }
    if (progress) progress(step, rec);
    if (failed) {
      for (std::size_t i = 0; i < agents.size(); ++i) {
        if (agents[i].failed) rec.robots[i].outcome = Outcome::Infeasible;
      }
      rec.outcome = Outcome::Infeasible;
      break;
    }
    if (std::all_of(agents.begin(), agents.end(), [](const auto& a) { return a.reached; })) {
      rec.outcome = Outcome::GoalReached;
      break;
    }
  }
  rec.step_time = timing_stats(times);
  rec.max_iterations = iterations.empty() ? 0 : *std::max_element(iterations.begin(), iterations.end());
  rec.median_iterations = median(iterations);
  return rec;
}

double replay_error(const ScenarioConfig& config, const RunRecord& record) {
  const auto model = dynamics::make_model(config.dimension);
  double worst = 0.0;
  for (std::size_t i = 0; i < record.robots.size(); ++i) {
    Vec x = config.robots.at(i).initial_state;
    for (const auto& s : record.robots[i].steps) {
      worst = std::max(worst, (x - s.state).lpNorm<Eigen::Infinity>());
      x = model->step(x, s.input, config.mpc.dt);
      worst = std::max(worst, (x - s.next_state).lpNorm<Eigen::Infinity>());
    }
  }
  return worst;
}

}  // namespace impc::scenario
