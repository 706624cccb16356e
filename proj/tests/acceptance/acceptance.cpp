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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "support/dcbf_decay.hpp"
#include "support/finite_difference.hpp"
#include "support/grid_oracle.hpp"
#include "support/oracles.hpp"

#include "impc/dynamics/model.hpp"
#include "impc/geometry/queries.hpp"
#include "impc/mpc/mpc.hpp"
#include "impc/planner/planner.hpp"
#include "impc/scenario/scenario.hpp"

namespace {

using namespace impc;
namespace fs = std::filesystem;

const fs::path kScenarios = fs::path(IMPC_SOURCE_DIR) / "scenarios";

int failures = 0;

void report(int id, bool pass, const std::string& what, std::string detail) {
  while (!detail.empty() && (detail.back() == ' ' || detail.back() == ';')) detail.pop_back();
  std::printf("%s %2d %s: %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void geometry_oracle() {
  std::mt19937_64 rng(1);
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto [p, q] = testing::random_disjoint_polygons(rng);
    worst = std::max(worst, std::abs(geometry::closest_points(p, q).distance() - testing::vertex_edge_distance(p, q)));
  }
  const double dt = seconds_since(t0);
  report(1, worst <= 1e-5 && dt < 5.0, "geometry oracle equivalence",
         fmt("100 pairs, max |d - oracle| = %.2e, %.3f s", worst, dt));
}

// Both vertex inequalities of the separation property, worst violation.
double separation_violation(const geometry::Polytope& obs, const geometry::Polytope& robot) {
  const auto pair = geometry::closest_points(obs, robot);
  const auto h = geometry::supporting_hyperplane(pair);
  double worst = 0.0;
  for (const auto& v : robot.vertices()) worst = std::max(worst, pair.distance() - h.normal.dot(v - h.anchor));
  for (const auto& w : obs.vertices()) worst = std::max(worst, h.normal.dot(w - h.anchor));
  return worst;
}

void separation() {
  std::mt19937_64 rng(2);
  double worst2 = 0.0, worst3 = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto [p, q] = testing::random_disjoint_polygons(rng);
    worst2 = std::max(worst2, separation_violation(p, q));
  }
  std::uniform_real_distribution<double> dir(-1.0, 1.0);
  int pairs3 = 0;
  while (pairs3 < 50) {
    Eigen::Vector3d d(dir(rng), dir(rng), dir(rng));
    if (d.norm() < 1e-3) continue;
    d.normalize();
    const auto p = testing::random_polyhedron(rng, Eigen::Vector3d::Zero(), 0.5);
    const auto q = testing::random_polyhedron(rng, (1.6 + 0.6 * (dir(rng) + 1.0)) * d, 0.5);
    if (geometry::closest_points(p, q).distance() < 1e-3) continue;
    worst3 = std::max(worst3, separation_violation(p, q));
    ++pairs3;
  }
  report(2, worst2 <= 1e-7 && worst3 <= 1e-7, "separation invariant",
         fmt("worst vertex violation 2-D %.2e (100 pairs), 3-D %.2e (50 pairs)", worst2, worst3));
}

void jacobians() {
  double worst = 0.0;
  for (int dim : {2, 3}) {
    const auto model = dynamics::make_model(dim);
    std::mt19937_64 rng(static_cast<std::uint64_t>(30 + dim));
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
      Vec x(model->state_dim()), u(model->input_dim());
      for (auto& e : x) e = uni(rng);
      for (auto& e : u) e = 0.25 * uni(rng);
      Mat a, b, fa, fb;
      model->jacobians(x, u, 0.1, a, b);
      testing::fd_jacobians(*model, x, u, 0.1, 1e-6, fa, fb);
      worst = std::max({worst, testing::relative_error(fa, a), testing::relative_error(fb, b)});
    }
  }
  report(3, worst < 1e-6, "jacobian check", fmt("both models, 100 points each, max relative error %.2e", worst));
}

void decay() {
  const auto c = testing::run_decay_check();
  const bool pass = c.solved && c.rows > 0 && c.worst_margin >= -1e-6;
  report(4, pass, "dcbf decay at optimum",
         fmt("%g rows, worst margin %.2e, %g rows on the bound", c.rows, c.worst_margin, c.bound_active_rows));
}

struct RunResult {
  scenario::ScenarioConfig config;
  scenario::RunRecord record;
};

RunResult run_file(const std::string& name) {
  RunResult r{scenario::load_scenario(kScenarios / name), {}};
  r.record = scenario::run(r.config);
  return r;
}

bool reached_all(const RunResult& r) {
  if (r.record.outcome != scenario::Outcome::GoalReached) return false;
  const auto model = dynamics::make_model(r.config.dimension);
  for (std::size_t i = 0; i < r.config.robots.size(); ++i) {
    const auto& steps = r.record.robots[i].steps;
    if (steps.empty()) return false;
    if ((model->position(steps.back().next_state) - r.config.robots[i].goal).norm() > 0.05 + 1e-12) return false;
  }
  return true;
}

std::vector<RunResult> planar_mazes() {
  std::vector<RunResult> out;
  for (const char* f : {"maze2d_rectangle.yaml", "maze2d_triangle.yaml", "maze2d_l_shape.yaml"}) {
    out.push_back(run_file(f));
  }
  bool pass = true;
  std::string detail;
  for (const auto& r : out) {
    const bool ok = reached_all(r) && r.record.steps <= 400 && r.record.min_obstacle_distance >= -1e-6;
    pass = pass && ok;
    detail += r.config.robots[0].name + fmt(" %g steps, min dist %.4f; ", r.record.steps, r.record.min_obstacle_distance);
  }
  report(5, pass, "2-D maze scenarios", detail);
  return out;
}

RunResult team() {
  auto r = run_file("maze2d_team.yaml");
  const bool pass = r.config.robots.size() == 3 && reached_all(r) && r.record.min_obstacle_distance >= -1e-6 &&
                    r.record.min_robot_distance >= -1e-6;
  report(6, pass, "multi-robot scenario",
         fmt("%g steps, min obstacle dist %.4f, min robot dist %.4f", r.record.steps, r.record.min_obstacle_distance,
             r.record.min_robot_distance));
  return r;
}

RunResult spatial() {
  auto r = run_file("maze3d_l_shape.yaml");
  report(7, reached_all(r) && r.record.min_obstacle_distance >= -1e-6, "3-D scenario",
         fmt("%g steps, min dist %.4f", r.record.steps, r.record.min_obstacle_distance));
  return r;
}

void timing() {
  const auto config = scenario::load_scenario(kScenarios / "maze2d_rectangle.yaml");
  scenario::BenchmarkSettings s;
  s.trials = 20;
  s.steps = 20;
  s.horizons = {6, 12, 24};
  s.gammas = {0.1, 0.2};
  s.seed = 1;
  const auto cells = scenario::benchmark(config, s);
  auto mean = [&](int n, double g) {
    for (const auto& c : cells) {
      if (c.horizon == n && c.gamma == g) return c.timing.mean_ms;
    }
    return -1.0;
  };
  bool pass = true;
  std::string detail;
  for (double g : s.gammas) {
    const double m6 = mean(6, g), m12 = mean(12, g), m24 = mean(24, g);
    pass = pass && m6 > 0.0 && m6 < m12 && m12 < m24 && m12 <= 100.0;
    detail += fmt("gamma %.1f: N6 %.2f ms, N12 %.2f ms, N24 %.2f ms; ", g, m6, m12, m24);
  }
  for (int n : s.horizons) {
    const double a = mean(n, 0.1), b = mean(n, 0.2);
    pass = pass && a > 0.0 && b > 0.0 && std::max(a, b) <= 2.0 * std::min(a, b);
  }
  report(8, pass, "timing trends", detail);
}

void iterations(const std::vector<RunResult>& runs) {
  std::vector<int> all;
  int cap = 0;
  for (const auto& r : runs) {
    cap = r.config.mpc.max_iterations;
    for (const auto& t : r.record.robots) {
      for (const auto& s : t.steps) all.push_back(s.diagnostics.iterations);
    }
  }
  if (all.empty()) {
    report(9, false, "iteration behavior", "no steps recorded");
    return;
  }
  std::sort(all.begin(), all.end());
  const std::size_t n = all.size();
  const double median = n % 2 == 1 ? all[n / 2] : 0.5 * (all[n / 2 - 1] + all[n / 2]);
  report(9, all.back() <= cap && cap == 50 && median <= 10.0, "iteration behavior",
         fmt("%g steps, max %g, median %.1f", static_cast<double>(n), all.back(), median));
}

void convergence() {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<Vec> bar;
  for (int k = 0; k < 13; ++k) {
    Vec x(4);
    for (auto& e : x) e = uni(rng);
    bar.push_back(x);
  }
  std::vector<Vec> star;
  for (const auto& x : bar) star.push_back(1.1 * x);
  const auto [abs0, rel0] = mpc::convergence(bar, bar);
  const auto [abs1, rel1] = mpc::convergence(star, bar);
  const bool pass = abs0 == 0.0 && rel0 == 0.0 && std::abs(rel1 - 0.1) <= 1e-12;
  report(10, pass, "convergence function", fmt("identity (%.1e, %.1e), 10%% case e_rel - 0.1 = %.1e", abs0, rel0,
                                                rel1 - 0.1));
}

void astar_optimality() {
  std::mt19937_64 rng(11);
  std::bernoulli_distribution block(0.2);
  std::uniform_int_distribution<int> cell(0, 39);
  int compared = 0, unreachable = 0, mismatched = 0;
  Vec lo(2), hi(2);
  lo << 0.0, 0.0;
  hi << 40.0, 40.0;
  for (int t = 0; t < 100; ++t) {
    planner::GridMap g(lo, hi, 1.0);
    for (int x = 0; x < 40; ++x) {
      for (int y = 0; y < 40; ++y) {
        if (block(rng)) g.set_occupied({x, y, 0});
      }
    }
    const planner::Cell s{cell(rng), cell(rng), 0}, e{cell(rng), cell(rng), 0};
    g.set_occupied(s, false);
    g.set_occupied(e, false);
    const double oracle = testing::dijkstra_cost(g, s, e);
    if (std::isinf(oracle)) {
      ++unreachable;
      try {
        planner::astar(g, s, e);
        ++mismatched;
      } catch (const NoPath&) {
      }
      continue;
    }
    ++compared;
    if (std::abs(planner::astar(g, s, e).cost() - oracle) > 1e-9) ++mismatched;
  }
  report(11, mismatched == 0, "A* optimality",
         fmt("%g grids compared, %g unreachable, %g mismatches", compared, unreachable, mismatched));
}

void replay(const std::vector<const RunResult*>& runs) {
  double worst = 0.0;
  for (const auto* r : runs) worst = std::max(worst, scenario::replay_error(r->config, r->record));
  report(12, worst <= 1e-9 && runs.size() >= 5, "replay integrity",
         fmt("%g scenarios, max state deviation %.2e", static_cast<double>(runs.size()), worst));
}

}  // namespace

int main() {
  geometry_oracle();
  separation();
  jacobians();
  decay();
  const auto mazes = planar_mazes();
  const auto group = team();
  const auto space = spatial();
  timing();
  iterations(mazes);
  convergence();
  astar_optimality();
  std::vector<const RunResult*> all;
  for (const auto& r : mazes) all.push_back(&r);
  all.push_back(&group);
  all.push_back(&space);
  replay(all);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
