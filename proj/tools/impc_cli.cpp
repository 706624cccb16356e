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

// Batch driver: run, benchmark and validate scenario files.

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "impc/scenario/scenario.hpp"

namespace {

using namespace impc;

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::stringstream is(item);
    T v;
    if (!(is >> v)) throw CLI::ValidationError(what, "bad list entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError(what, "empty list");
  return out;
}

int cmd_run(const std::string& file, int max_steps, const std::string& out_dir, bool plot, bool quiet) {
  const auto config = scenario::load_scenario(file);
  const auto record = scenario::run(config, max_steps, [&](int step, const scenario::RunRecord& rec) {
    if (quiet || step % 25 != 0) return;
    std::cerr << "step " << step;
    for (const auto& r : rec.robots) {
      if (r.steps.empty()) continue;
      const auto& s = r.steps.back();
      std::cerr << "  " << r.name << " (" << s.next_state[0] << ", " << s.next_state[1] << ") it "
                << s.diagnostics.iterations;
    }
    std::cerr << '\n';
  });
  std::printf("scenario %s: %s after %d steps\n", config.name.c_str(), std::string(to_string(record.outcome)).c_str(),
              record.steps);
  for (const auto& r : record.robots) {
    std::printf("  %-12s %-12s reached_step=%d\n", r.name.c_str(), std::string(to_string(r.outcome)).c_str(),
                r.reached_step);
  }
  std::printf("  min obstacle distance %.6g m, min robot distance %.6g m\n", record.min_obstacle_distance,
              record.min_robot_distance);
  std::printf("  step time %.3f +- %.3f ms, iterations max %d median %.1f\n", record.step_time.mean_ms,
              record.step_time.std_ms, record.max_iterations, record.median_iterations);
  if (!out_dir.empty()) {
    const std::filesystem::path dir(out_dir);
    scenario::write_trajectory_csv(record, dir / (config.name + "_trajectory.csv"));
    scenario::write_summary_json(config, record, dir / (config.name + "_summary.json"));
    if (plot) scenario::write_plot_svg(config, record, dir / (config.name + ".svg"));
    std::printf("  wrote outputs to %s\n", dir.string().c_str());
  }
  return record.outcome == scenario::Outcome::GoalReached ? 0 : 1;
}

int cmd_bench(const std::string& file, int trials, int steps, const std::string& horizons, const std::string& gammas,
              std::uint64_t seed, const std::string& out_dir) {
  const auto config = scenario::load_scenario(file);
  scenario::BenchmarkSettings s;
  s.trials = trials;
  s.steps = steps;
  s.horizons = parse_list<int>(horizons, "--horizons");
  s.gammas = parse_list<double>(gammas, "--gammas");
  s.seed = seed;
  const auto cells = scenario::benchmark(config, s, [](const std::string& msg) { std::cerr << msg << '\n'; });
  std::printf("%-12s %4s %6s %12s %10s %7s %8s\n", "shape", "N", "gamma", "mean_ms", "std_ms", "trials", "skipped");
  for (const auto& c : cells) {
    std::printf("%-12s %4d %6.2f %12.3f %10.3f %7d %8d\n", c.shape.c_str(), c.horizon, c.gamma, c.timing.mean_ms,
                c.timing.std_ms, c.trials, c.skipped);
  }
  if (!out_dir.empty()) scenario::write_benchmark_json(cells, std::filesystem::path(out_dir) / (config.name + "_bench.json"));
  return 0;
}

int cmd_validate(const std::string& file) {
  const auto config = scenario::load_scenario(file);
  std::printf("%s: ok (%zu obstacles, %zu robots, dimension %d)\n", config.name.c_str(), config.obstacles.size(),
              config.robots.size(), config.dimension);
  for (std::size_t i = 0; i < config.robots.size(); ++i) {
    const auto path = scenario::plan_path(config, i);
    std::printf("  %s: reference path %.3f m, %zu waypoints\n", config.robots[i].name.c_str(), path.length(),
                path.waypoints.size());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative convex MPC with discrete-time CBF constraints"};
  app.require_subcommand(1);

  std::string file;
  int max_steps = 0;
  std::string out_dir;
  bool plot = false;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Simulate a scenario in closed loop");
  run->add_option("scenario", file, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--max-steps", max_steps, "Step limit (default: from the scenario)");
  run->add_option("--out", out_dir, "Directory for the trajectory table, summary and plot");
  run->add_flag("--plot", plot, "Also write an SVG plot (needs --out)");
  run->add_flag("-q,--quiet", quiet, "No progress output");

  int trials = 20;
  int steps = 20;
  std::string horizons = "6,12,24";
  std::string gammas = "0.1,0.2";
  std::uint64_t seed = 1;
  auto* bench = app.add_subcommand("bench", "Time the controller from random free starts");
  bench->add_option("scenario", file, "Scenario file")->required()->check(CLI::ExistingFile);
  bench->add_option("--trials", trials, "Random starts per cell")->check(CLI::PositiveNumber);
  bench->add_option("--steps", steps, "Closed-loop steps per trial")->check(CLI::PositiveNumber);
  bench->add_option("--horizons", horizons, "Comma-separated horizons");
  bench->add_option("--gammas", gammas, "Comma-separated decay rates");
  bench->add_option("--seed", seed, "Random seed");
  bench->add_option("--out", out_dir, "Directory for the JSON table");

  auto* validate = app.add_subcommand("validate", "Load and check a scenario, then plan its reference paths");
  validate->add_option("scenario", file, "Scenario file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) {
      if (plot && out_dir.empty()) out_dir = ".";
      return cmd_run(file, max_steps, out_dir, plot, quiet);
    }
    if (bench->parsed()) return cmd_bench(file, trials, steps, horizons, gammas, seed, out_dir);
    if (validate->parsed()) return cmd_validate(file);
  } catch (const impc::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
