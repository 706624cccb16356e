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

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "impc/scenario/scenario.hpp"

namespace impc::scenario {

namespace {

std::ofstream open_out(const std::filesystem::path& file) {
  if (file.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(file.parent_path(), ec);
  }
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << std::setprecision(17);
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& file) {
  out.flush();
  if (!out) throw IoError("write failed for " + file.string());
}

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

void write_trajectory_csv(const RunRecord& record, const std::filesystem::path& file) {
  auto out = open_out(file);
  int nx = 0, nu = 0;
  for (const auto& r : record.robots) {
    if (!r.steps.empty()) {
      nx = static_cast<int>(r.steps.front().state.size());
      nu = static_cast<int>(r.steps.front().input.size());
      break;
    }
  }
  out << "robot,step,t";
  for (int i = 0; i < nx; ++i) out << ",x" << i;
  for (int i = 0; i < nu; ++i) out << ",u" << i;
  for (int i = 0; i < nx; ++i) out << ",next_x" << i;
  out << ",min_distance,iterations,solve_time,qp_time,active_obstacles,fallback\n";
  for (std::size_t r = 0; r < record.robots.size(); ++r) {
    for (const auto& s : record.robots[r].steps) {
      out << r << ',' << s.step << ',' << s.time;
      for (Eigen::Index i = 0; i < s.state.size(); ++i) out << ',' << s.state[i];
      for (Eigen::Index i = 0; i < s.input.size(); ++i) out << ',' << s.input[i];
      for (Eigen::Index i = 0; i < s.next_state.size(); ++i) out << ',' << s.next_state[i];
      const auto& d = s.diagnostics;
      out << ',' << d.min_distance << ',' << d.iterations << ',' << d.total_time << ',' << d.qp_time << ','
          << d.active_obstacles << ',' << d.fallback << '\n';
    }
  }
  finish(out, file);
}

void write_summary_json(const ScenarioConfig& config, const RunRecord& record, const std::filesystem::path& file) {
  nlohmann::json j;
  j["scenario"] = record.scenario;
  j["outcome"] = std::string(to_string(record.outcome));
  j["steps"] = record.steps;
  j["horizon"] = config.mpc.horizon;
  j["gamma"] = config.mpc.cbf.gamma1();
  j["step_time_ms"] = {{"mean", record.step_time.mean_ms}, {"std", record.step_time.std_ms},
                       {"samples", record.step_time.samples}};
  j["iterations"] = {{"max", record.max_iterations}, {"median", record.median_iterations}};
  auto finite = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  j["min_obstacle_distance"] = finite(record.min_obstacle_distance);
  j["min_robot_distance"] = finite(record.min_robot_distance);
  j["robots"] = nlohmann::json::array();
  for (std::size_t i = 0; i < record.robots.size(); ++i) {
    const auto& r = record.robots[i];
    nlohmann::json rj;
    rj["name"] = r.name;
    rj["outcome"] = std::string(to_string(r.outcome));
    rj["reached_step"] = r.reached_step;
    rj["goal"] = to_std(config.robots[i].goal);
    if (!r.steps.empty()) rj["final_state"] = to_std(r.steps.back().next_state);
    rj["path_length"] = r.path.length();
    rj["applied_steps"] = r.steps.size();
    j["robots"].push_back(rj);
  }
  auto out = open_out(file);
  out << j.dump(2) << '\n';
  finish(out, file);
}

void write_benchmark_json(const std::vector<BenchmarkCell>& cells, const std::filesystem::path& file) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : cells) {
    j.push_back({{"shape", c.shape},
                 {"horizon", c.horizon},
                 {"gamma", c.gamma},
                 {"mean_ms", c.timing.mean_ms},
                 {"std_ms", c.timing.std_ms},
                 {"samples", c.timing.samples},
                 {"trials", c.trials},
                 {"skipped", c.skipped}});
  }
  auto out = open_out(file);
  out << j.dump(2) << '\n';
  finish(out, file);
}

namespace {

// Convex hull of 2-D points (monotone chain), for drawing projected polytopes.
std::vector<Eigen::Vector2d> hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  if (pts.size() < 3) return pts;
  auto cross = [](const auto& o, const auto& a, const auto& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

}  // namespace

void write_plot_svg(const ScenarioConfig& config, const RunRecord& record, const std::filesystem::path& file) {
  const double scale = 500.0;  // px per metre
  const double pad = 20.0;
  const double w = (config.region_hi[0] - config.region_lo[0]) * scale + 2 * pad;
  const double h = (config.region_hi[1] - config.region_lo[1]) * scale + 2 * pad;
  auto px = [&](double x) { return pad + (x - config.region_lo[0]) * scale; };
  auto py = [&](double y) { return h - pad - (y - config.region_lo[1]) * scale; };
  auto points = [&](const std::vector<Eigen::Vector2d>& pts) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    for (const auto& p : pts) os << px(p.x()) << ',' << py(p.y()) << ' ';
    return os.str();
  };

  auto out = open_out(file);
  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
      << ' ' << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<g id=\"obstacles\" fill=\"#555\" stroke=\"none\">\n";
  for (const auto& o : config.obstacles) {
    std::vector<Eigen::Vector2d> pts;
    for (const auto& v : o.vertices()) pts.emplace_back(v[0], v[1]);
    out << "<polygon class=\"obstacle\" points=\"" << points(hull(pts)) << "\"/>\n";
  }
  out << "</g>\n";
  for (std::size_t i = 0; i < record.robots.size(); ++i) {
    const auto& r = record.robots[i];
    const char* color = kColors[i % 5];
    std::vector<Eigen::Vector2d> path;
    for (const auto& p : r.path.waypoints) path.emplace_back(p[0], p[1]);
    out << "<polyline class=\"reference\" fill=\"none\" stroke=\"" << color
        << "\" stroke-dasharray=\"4 3\" stroke-width=\"1\" points=\"" << points(path) << "\"/>\n";
    std::vector<Eigen::Vector2d> traj;
    const Vec& x0 = config.robots[i].initial_state;
    traj.emplace_back(x0[0], x0[1]);
    for (const auto& s : r.steps) traj.emplace_back(s.next_state[0], s.next_state[1]);
    out << "<polyline class=\"trajectory\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
        << points(traj) << "\"/>\n";
    // Robot footprints every few steps.
    const auto model = dynamics::make_model(config.dimension);
    const std::size_t every = std::max<std::size_t>(1, r.steps.size() / 12);
    for (std::size_t k = 0; k < r.steps.size(); k += every) {
      for (const auto& piece : geometry::pose_to_world(config.robots[i].shape, model->pose(r.steps[k].next_state))) {
        std::vector<Eigen::Vector2d> pts;
        for (const auto& v : piece.vertices()) pts.emplace_back(v[0], v[1]);
        out << "<polygon class=\"footprint\" fill=\"" << color << "\" fill-opacity=\"0.25\" stroke=\"" << color
            << "\" stroke-width=\"0.5\" points=\"" << points(hull(pts)) << "\"/>\n";
      }
    }
    out << "<circle class=\"start\" cx=\"" << px(x0[0]) << "\" cy=\"" << py(x0[1]) << "\" r=\"5\" fill=\"none\" stroke=\""
        << color << "\" stroke-width=\"2\"/>\n";
    const Vec& g = config.robots[i].goal;
    out << "<circle class=\"goal\" cx=\"" << px(g[0]) << "\" cy=\"" << py(g[1]) << "\" r=\""
        << config.robots[i].goal_radius * scale << "\" fill=\"" << color << "\" fill-opacity=\"0.4\"/>\n";
  }
  out << "</svg>\n";
  finish(out, file);
}

}  // namespace impc::scenario
