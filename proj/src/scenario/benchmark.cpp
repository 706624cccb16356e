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

#include <cmath>
#include <random>
#include <sstream>

#include "impc/multirobot/team.hpp"
#include "impc/scenario/scenario.hpp"

namespace impc::scenario {

namespace {

struct Start {
  Vec state;
  planner::ReferencePath path;
};

// Rejection-samples collision-free starts of robot 0 with the heading aligned
// to the local reference toward its goal.
std::vector<Start> sample_starts(const ScenarioConfig& config, int count, std::uint64_t seed,
                                 const std::function<void(const std::string&)>& log) {
  const auto model = dynamics::make_model(config.dimension);
  const auto& spec = config.robots.front();
  const double inflation =
      config.planner.inflation >= 0.0 ? config.planner.inflation : spec.shape.circumscribed_radius();
  const auto grid = planner::GridMap::rasterize(config.obstacles, config.region_lo, config.region_hi,
                                                config.planner.resolution, inflation);
  std::mt19937_64 rng(seed);
  std::vector<std::uniform_real_distribution<double>> axis;
  for (int i = 0; i < config.dimension; ++i) axis.emplace_back(config.region_lo[i], config.region_hi[i]);
  std::vector<Start> out;
  int attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > 1000 * count) throw Infeasible("benchmark: could not sample enough free starts");
    Vec pos(config.dimension);
    for (int i = 0; i < config.dimension; ++i) pos[i] = axis[static_cast<std::size_t>(i)](rng);
    if ((pos - spec.goal).norm() < 0.3) continue;
    planner::Cell cell;
    try {
      cell = grid.cell_of(pos);
    } catch (const std::out_of_range&) {
      continue;
    }
    if (grid.occupied(cell)) continue;
    planner::ReferencePath path;
    try {
      path = planner::astar(grid, pos, spec.goal);
    } catch (const NoPath&) {
      continue;
    }
    Vec orient = Vec::Zero(config.dimension == 3 ? 2 : 1);
    const Vec ahead = path.point_at(0.06) - pos;
    if (ahead.norm() < 1e-9) continue;
    orient[0] = std::atan2(ahead[1], ahead[0]);
    if (config.dimension == 3) orient[1] = std::atan2(ahead[2], std::hypot(ahead[0], ahead[1]));
    const Vec x = model->compose_state(pos, orient, 0.0);
    if (((x - config.mpc.state_lo).array() < 0.0).any() || ((config.mpc.state_hi - x).array() < 0.0).any()) continue;
    const auto body = geometry::pose_to_world(spec.shape, model->pose(x));
    if (!config.obstacles.empty() && geometry::min_signed_distance(config.obstacles, body) <= 0.01) continue;
    out.push_back({x, std::move(path)});
  }
  if (log) {
    std::ostringstream os;
    os << "sampled " << count << " starts in " << attempts << " attempts";
    log(os.str());
  }
  return out;
}

}  // namespace

std::vector<BenchmarkCell> benchmark(const ScenarioConfig& config, const BenchmarkSettings& settings,
                                     const std::function<void(const std::string&)>& log) {
  if (settings.trials < 1) throw std::invalid_argument("benchmark: trials must be >= 1");
  const auto starts = sample_starts(config, settings.trials, settings.seed, log);
  const auto model = dynamics::make_model(config.dimension);
  const auto& spec = config.robots.front();
  std::vector<BenchmarkCell> cells;
  for (int horizon : settings.horizons) {
    for (double gamma : settings.gammas) {
      mpc::MpcConfig mc = config.mpc;
      mc.horizon = horizon;
      mc.cbf.gammas.assign(static_cast<std::size_t>(mc.cbf.relative_degree), gamma);
      BenchmarkCell cell;
      cell.shape = spec.shape_name.empty() ? spec.name : spec.shape_name;
      cell.horizon = horizon;
      cell.gamma = gamma;
      std::vector<double> times;
      for (std::size_t t = 0; t < starts.size(); ++t) {
        multirobot::Agent agent{mpc::Controller(model, spec.shape, mc, starts[t].state),
                                starts[t].path,
                                spec.goal,
                                spec.goal_radius,
                                config.planner.ref_speed,
                                config.planner.ref_speed_max,
                                config.planner.lookahead};
        std::vector<multirobot::Agent> team;
        team.push_back(std::move(agent));
        std::vector<double> trial_times;
        bool ok = true;
        for (int s = 0; s < settings.steps && !team.front().reached; ++s) {
          try {
            const auto ts = multirobot::plan_team_step(team, config.obstacles);
            if (ts.outcomes.front().failed) {
              ok = false;
              break;
            }
            trial_times.push_back(ts.outcomes.front().diagnostics.total_time);
          } catch (const std::exception& e) {
            ok = false;
            break;
          }
        }
        if (!ok) {
          ++cell.skipped;
          if (log) log("skipped trial " + std::to_string(t) + " (N=" + std::to_string(horizon) + ")");
          continue;
        }
        ++cell.trials;
        times.insert(times.end(), trial_times.begin(), trial_times.end());
      }
      cell.timing = timing_stats(times);
      cells.push_back(cell);
      if (log) {
        std::ostringstream os;
        os << cell.shape << " N=" << horizon << " gamma=" << gamma << ": " << cell.timing.mean_ms << " +- "
           << cell.timing.std_ms << " ms";
        log(os.str());
      }
    }
  }
  return cells;
}

}  // namespace impc::scenario
