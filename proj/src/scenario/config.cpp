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
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "impc/scenario/scenario.hpp"

namespace impc::scenario {

namespace {

[[noreturn]] void fail(const std::string& source, const YAML::Node& node, const std::string& field,
                       const std::string& what) {
  std::ostringstream os;
  os << source;
  if (node.IsDefined() && node.Mark().line >= 0) os << ":" << node.Mark().line + 1;
  os << ": field '" << field << "': " << what;
  throw ParseError(os.str());
}

struct Reader {
  std::string source;

  template <typename T>
  T scalar(const YAML::Node& node, const std::string& field) const {
    if (!node.IsScalar()) fail(source, node, field, "expected a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception& e) {
      fail(source, node, field, "bad value '" + node.Scalar() + "'");
    }
  }

  template <typename T>
  T optional(const YAML::Node& parent, const std::string& key, const std::string& ctx, T fallback) const {
    const YAML::Node n = parent[key];
    if (!n.IsDefined() || n.IsNull()) return fallback;
    return scalar<T>(n, ctx + key);
  }

  Vec vec(const YAML::Node& node, const std::string& field, int expected = -1) const {
    if (!node.IsSequence()) fail(source, node, field, "expected a list of numbers");
    Vec v(static_cast<Eigen::Index>(node.size()));
    for (std::size_t i = 0; i < node.size(); ++i) v[static_cast<Eigen::Index>(i)] = scalar<double>(node[i], field);
    if (expected >= 0 && v.size() != expected) {
      fail(source, node, field, "expected " + std::to_string(expected) + " entries, got " + std::to_string(v.size()));
    }
    return v;
  }

  /// A list of numbers, or one number repeated `n` times.
  Vec vec_or_scalar(const YAML::Node& node, const std::string& field, int n) const {
    if (node.IsScalar()) return Vec::Constant(n, scalar<double>(node, field));
    return vec(node, field, n);
  }

  /// Diagonal weight from a list (diagonal) or a nested list (full matrix).
  Mat weight(const YAML::Node& node, const std::string& field, int n) const {
    if (node.IsSequence() && node.size() > 0 && node[0].IsSequence()) {
      Mat m(n, n);
      if (static_cast<int>(node.size()) != n) fail(source, node, field, "matrix row count");
      for (int i = 0; i < n; ++i) m.row(i) = vec(node[static_cast<std::size_t>(i)], field, n).transpose();
      return m;
    }
    return vec_or_scalar(node, field, n).asDiagonal();
  }

  geometry::Polytope polytope(const YAML::Node& node, const std::string& field, int dim) const {
    if (!node.IsMap()) fail(source, node, field, "expected a map with 'box', 'polygon' or 'halfspaces'");
    try {
      if (node["box"]) {
        const auto b = node["box"];
        return geometry::Polytope::box(vec(b["lo"], field + ".box.lo", dim), vec(b["hi"], field + ".box.hi", dim));
      }
      if (node["polygon"]) {
        if (dim != 2) fail(source, node, field, "polygon obstacles are 2-D only");
        std::vector<Eigen::Vector2d> pts;
        for (const auto& p : node["polygon"]) {
          const Vec q = vec(p, field + ".polygon", 2);
          pts.emplace_back(q[0], q[1]);
        }
        return geometry::Polytope::from_points_2d(pts);
      }
      if (node["halfspaces"]) {
        const auto h = node["halfspaces"];
        const YAML::Node a = h["a"];
        const Vec b = vec(h["b"], field + ".halfspaces.b");
        if (!a.IsSequence() || a.size() != static_cast<std::size_t>(b.size())) {
          fail(source, h, field + ".halfspaces", "'a' must have one row per entry of 'b'");
        }
        Mat am(b.size(), dim);
        for (Eigen::Index i = 0; i < b.size(); ++i) {
          am.row(i) = vec(a[static_cast<std::size_t>(i)], field + ".halfspaces.a", dim).transpose();
        }
        return geometry::Polytope(am, b);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      fail(source, node, field, e.what());
    }
    fail(source, node, field, "expected 'box', 'polygon' or 'halfspaces'");
  }
};

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ParseError(source + ": top level must be a map");
  const Reader r{source};
  ScenarioConfig c;
  c.name = r.optional<std::string>(root, "name", "", "scenario");
  c.description = r.optional<std::string>(root, "description", "", "");
  c.dimension = r.optional<int>(root, "dimension", "", 2);
  if (c.dimension != 2 && c.dimension != 3) fail(source, root["dimension"], "dimension", "must be 2 or 3");
  const int d = c.dimension;
  const auto model = dynamics::make_model(d);
  const int nx = model->state_dim();
  const int nu = model->input_dim();

  if (const auto obs = root["obstacles"]) {
    if (!obs.IsSequence()) fail(source, obs, "obstacles", "expected a list");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      c.obstacles.push_back(r.polytope(obs[i], "obstacles[" + std::to_string(i) + "]", d));
    }
  }
  if (const auto region = root["region"]) {
    c.region_lo = r.vec(region["lo"], "region.lo", d);
    c.region_hi = r.vec(region["hi"], "region.hi", d);
  } else {
    if (c.obstacles.empty()) fail(source, root, "region", "required when there are no obstacles");
    c.region_lo = c.obstacles.front().aabb_lo();
    c.region_hi = c.obstacles.front().aabb_hi();
    for (const auto& o : c.obstacles) {
      c.region_lo = c.region_lo.cwiseMin(o.aabb_lo());
      c.region_hi = c.region_hi.cwiseMax(o.aabb_hi());
    }
  }

  const auto robots = root["robots"];
  if (!robots || !robots.IsSequence() || robots.size() == 0) {
    fail(source, robots ? robots : root, "robots", "expected a non-empty list");
  }
  for (std::size_t i = 0; i < robots.size(); ++i) {
    const auto node = robots[i];
    const std::string ctx = "robots[" + std::to_string(i) + "].";
    RobotSpec spec;
    spec.name = r.optional<std::string>(node, "name", ctx, "robot" + std::to_string(i + 1));
    spec.scale = r.optional<double>(node, "scale", ctx, 1.0);
    if (!(spec.scale > 0.0)) fail(source, node["scale"], ctx + "scale", "must be positive");
    if (node["shape"]) {
      spec.shape_name = r.scalar<std::string>(node["shape"], ctx + "shape");
      try {
        spec.shape = builtin_shape(spec.shape_name);
      } catch (const std::invalid_argument& e) {
        fail(source, node["shape"], ctx + "shape", e.what());
      }
    } else if (node["pieces"]) {
      for (std::size_t k = 0; k < node["pieces"].size(); ++k) {
        spec.shape.pieces.push_back(r.polytope(node["pieces"][k], ctx + "pieces[" + std::to_string(k) + "]", d));
      }
    } else {
      fail(source, node, ctx + "shape", "either 'shape' or 'pieces' is required");
    }
    if (spec.shape.dim() != d) fail(source, node, ctx + "shape", "shape dimension differs from the scenario");
    spec.shape = spec.shape.scaled(spec.scale);
    if (!node["initial_state"]) fail(source, node, ctx + "initial_state", "missing");
    spec.initial_state = r.vec(node["initial_state"], ctx + "initial_state", nx);
    if (!node["goal"]) fail(source, node, ctx + "goal", "missing");
    spec.goal = r.vec(node["goal"], ctx + "goal", d);
    spec.goal_radius = r.optional<double>(node, "goal_radius", ctx, 0.05);
    c.robots.push_back(std::move(spec));
  }

  c.mpc = mpc::MpcConfig::defaults_for(*model);
  if (const auto m = root["mpc"]) {
    c.mpc.horizon = r.optional<int>(m, "horizon", "mpc.", c.mpc.horizon);
    c.mpc.dt = r.optional<double>(m, "dt", "mpc.", c.mpc.dt);
    if (m["q"]) c.mpc.q = r.weight(m["q"], "mpc.q", nx);
    if (m["r"]) c.mpc.r = r.weight(m["r"], "mpc.r", nu);
    c.mpc.p = m["p"] ? r.weight(m["p"], "mpc.p", nx) : c.mpc.q;
    c.mpc.slack_weight = r.optional<double>(m, "slack_weight", "mpc.", c.mpc.slack_weight);
    if (const auto sb = m["state_bounds"]) {
      c.mpc.state_lo = r.vec_or_scalar(sb["lo"], "mpc.state_bounds.lo", nx);
      c.mpc.state_hi = r.vec_or_scalar(sb["hi"], "mpc.state_bounds.hi", nx);
    }
    if (const auto ib = m["input_bounds"]) {
      c.mpc.input_lo = r.vec_or_scalar(ib["lo"], "mpc.input_bounds.lo", nu);
      c.mpc.input_hi = r.vec_or_scalar(ib["hi"], "mpc.input_bounds.hi", nu);
    }
    c.mpc.eps_abs = r.optional<double>(m, "eps_abs", "mpc.", c.mpc.eps_abs);
    c.mpc.eps_rel = r.optional<double>(m, "eps_rel", "mpc.", c.mpc.eps_rel);
    c.mpc.max_iterations = r.optional<int>(m, "max_iterations", "mpc.", c.mpc.max_iterations);
    c.mpc.sensing_radius = r.optional<double>(m, "sensing_radius", "mpc.", c.mpc.sensing_radius);
    if (const auto cb = m["cbf"]) {
      if (cb["gamma"]) {
        const Vec g = r.vec_or_scalar(cb["gamma"], "mpc.cbf.gamma", cb["gamma"].IsScalar() ? 1 : -1);
        c.mpc.cbf.gammas.assign(g.data(), g.data() + g.size());
        c.mpc.cbf.relative_degree = static_cast<int>(g.size());
      }
      c.mpc.cbf.order = r.optional<int>(cb, "order", "mpc.cbf.", c.mpc.cbf.order);
      c.mpc.cbf.margin = r.optional<double>(cb, "margin", "mpc.cbf.", c.mpc.cbf.margin);
      c.mpc.cbf.slack_min = r.optional<double>(cb, "slack_min", "mpc.cbf.", c.mpc.cbf.slack_min);
      c.mpc.cbf.slack_max = r.optional<double>(cb, "slack_max", "mpc.cbf.", c.mpc.cbf.slack_max);
    }
  }
  if (const auto p = root["planner"]) {
    c.planner.resolution = r.optional<double>(p, "resolution", "planner.", c.planner.resolution);
    c.planner.ref_speed = r.optional<double>(p, "ref_speed", "planner.", c.planner.ref_speed);
    c.planner.ref_speed_max = r.optional<double>(p, "ref_speed_max", "planner.", c.planner.ref_speed);
    c.planner.lookahead = r.optional<double>(p, "lookahead", "planner.", c.planner.lookahead);
    c.planner.inflation = r.optional<double>(p, "inflation", "planner.", c.planner.inflation);
  } else if (d == 3) {
    c.planner.resolution = 0.03;
  }
  c.max_steps = r.optional<int>(root, "max_steps", "", c.max_steps);
  c.seed = r.optional<std::uint64_t>(root, "seed", "", c.seed);
  validate(c);
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open scenario file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), file.string());
}

void validate(const ScenarioConfig& c) {
  const auto model = dynamics::make_model(c.dimension);
  try {
    c.mpc.validate(*model);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("mpc settings: ") + e.what());
  }
  if (c.region_lo.size() != c.dimension || c.region_hi.size() != c.dimension ||
      (c.region_lo.array() >= c.region_hi.array()).any()) {
    throw ValidationError("region bounds are inconsistent");
  }
  if (!(c.planner.resolution > 0.0) || !(c.planner.ref_speed > 0.0) || c.planner.ref_speed_max < c.planner.ref_speed) {
    throw ValidationError("planner settings: need resolution > 0 and 0 < ref_speed <= ref_speed_max");
  }
  if (c.max_steps < 1) throw ValidationError("max_steps must be >= 1");
  if (c.robots.empty()) throw ValidationError("no robots");
  std::vector<std::vector<geometry::Polytope>> bodies;
  for (const auto& spec : c.robots) {
    if (spec.shape.pieces.empty()) throw ValidationError("robot '" + spec.name + "' has no pieces");
    if (spec.initial_state.size() != model->state_dim() || spec.goal.size() != c.dimension) {
      throw ValidationError("robot '" + spec.name + "': state or goal size");
    }
    if (!(spec.goal_radius > 0.0)) throw ValidationError("robot '" + spec.name + "': goal radius must be positive");
    if (((spec.initial_state - c.mpc.state_lo).array() < 0.0).any() ||
        ((c.mpc.state_hi - spec.initial_state).array() < 0.0).any()) {
      throw ValidationError("robot '" + spec.name + "': initial state violates the state bounds");
    }
    const Vec pos = model->position(spec.initial_state);
    for (const Vec* p : {&pos, &spec.goal}) {
      if (((*p - c.region_lo).array() < 0.0).any() || ((c.region_hi - *p).array() < 0.0).any()) {
        throw ValidationError("robot '" + spec.name + "': start or goal outside the region");
      }
    }
    auto body = geometry::pose_to_world(spec.shape, model->pose(spec.initial_state));
    if (!c.obstacles.empty()) {
      const double dist = geometry::min_signed_distance(c.obstacles, body);
      if (dist <= 0.0) {
        throw ValidationError("robot '" + spec.name + "' collides with an obstacle at its initial state (distance " +
                              std::to_string(dist) + ")");
      }
    }
    for (std::size_t j = 0; j < bodies.size(); ++j) {
      if (geometry::min_signed_distance(bodies[j], body) <= 0.0) {
        throw ValidationError("robot '" + spec.name + "' overlaps robot '" + c.robots[j].name + "'");
      }
    }
    bodies.push_back(std::move(body));
  }
}

}  // namespace impc::scenario
