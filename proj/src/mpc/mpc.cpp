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

#include "impc/mpc/mpc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace impc::mpc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool is_psd(const Mat& m, double tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10) return false;
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

// Lower bound on the distance between two axis-aligned boxes.
double aabb_gap(const geometry::Polytope& a, const geometry::Polytope& b) {
  double sq = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    const double g = std::max({0.0, a.aabb_lo()[i] - b.aabb_hi()[i], b.aabb_lo()[i] - a.aabb_hi()[i]});
    sq += g * g;
  }
  return std::sqrt(sq);
}

bool within(const Vec& x, const Vec& lo, const Vec& hi, double tol = 1e-9) {
  return ((x - lo).array() >= -tol).all() && ((hi - x).array() >= -tol).all();
}

}  // namespace

MpcConfig MpcConfig::defaults_2d() {
  MpcConfig c;
  c.horizon = 12;
  c.q = Vec((Eigen::Vector4d() << 10.0, 10.0, 3.0, 0.1).finished()).asDiagonal();
  c.r = Mat::Identity(2, 2);
  c.p = c.q;
  c.state_lo = Vec::Constant(4, -2.0);
  c.state_hi = Vec::Constant(4, 2.0);
  c.input_lo = Vec::Constant(2, -0.5);
  c.input_hi = Vec::Constant(2, 0.5);
  c.sensing_radius = 0.35;
  return c;
}

MpcConfig MpcConfig::defaults_3d() {
  MpcConfig c;
  c.horizon = 8;
  Vec qd(6);
  qd << 10.0, 10.0, 10.0, 3.0, 3.0, 0.1;
  c.q = qd.asDiagonal();
  c.r = Mat::Identity(3, 3);
  c.p = c.q;
  c.state_lo = Vec::Constant(6, -4.0);
  c.state_hi = Vec::Constant(6, 4.0);
  c.input_lo = Vec::Constant(3, -0.5);
  c.input_hi = Vec::Constant(3, 0.5);
  c.sensing_radius = 0.4;
  return c;
}

MpcConfig MpcConfig::defaults_for(const dynamics::Model& model) {
  return model.workspace_dim() == 3 ? defaults_3d() : defaults_2d();
}

void MpcConfig::validate(const dynamics::Model& model) const {
  if (horizon < 1) throw std::invalid_argument("MpcConfig: horizon must be >= 1");
  if (max_iterations < 1) throw std::invalid_argument("MpcConfig: max_iterations must be >= 1");
  if (!(eps_abs > 0.0) || !(eps_rel > 0.0)) throw std::invalid_argument("MpcConfig: tolerances must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("MpcConfig: dt must be positive");
  if (!(sensing_radius > 0.0)) throw std::invalid_argument("MpcConfig: sensing radius must be positive");
  if (slack_weight < 0.0) throw std::invalid_argument("MpcConfig: slack weight must be nonnegative");
  const int nx = model.state_dim();
  const int nu = model.input_dim();
  if (q.rows() != nx || p.rows() != nx || r.rows() != nu) throw DimensionMismatch("MpcConfig: weight sizes");
  if (state_lo.size() != nx || state_hi.size() != nx) throw DimensionMismatch("MpcConfig: state bound sizes");
  if (input_lo.size() != nu || input_hi.size() != nu) throw DimensionMismatch("MpcConfig: input bound sizes");
  if (!is_psd(q) || !is_psd(r) || !is_psd(p)) {
    throw std::invalid_argument("MpcConfig: weights must be symmetric positive semidefinite");
  }
  cbf.validate();
}

int World::num_obstacles() const {
  return static_cast<int>(statics.size() + (dynamic.empty() ? 0 : dynamic.front().size()));
}

const geometry::Polytope& World::at(int index, int k) const {
  const int ns = static_cast<int>(statics.size());
  if (index < ns) return statics[static_cast<std::size_t>(index)];
  const auto& layer = dynamic[static_cast<std::size_t>(std::min<int>(k, static_cast<int>(dynamic.size()) - 1))];
  return layer[static_cast<std::size_t>(index - ns)];
}

std::vector<geometry::Polytope> World::snapshot(int k) const {
  std::vector<geometry::Polytope> out = statics;
  if (!dynamic.empty()) {
    const auto& layer = dynamic[static_cast<std::size_t>(std::min<int>(k, static_cast<int>(dynamic.size()) - 1))];
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

std::pair<double, double> convergence(const Mat& x_star, const Mat& x_bar) {
  if (x_star.rows() != x_bar.rows() || x_star.cols() != x_bar.cols()) {
    throw DimensionMismatch("convergence: shapes differ");
  }
  const double e_abs = (x_star - x_bar).norm();
  const double scale = x_bar.norm();
  const double e_rel = scale < 1e-12 ? std::numeric_limits<double>::infinity() : e_abs / scale;
  return {e_abs, e_rel};
}

std::pair<double, double> convergence(const std::vector<Vec>& x_star, const std::vector<Vec>& x_bar) {
  if (x_star.size() != x_bar.size() || x_star.empty()) throw DimensionMismatch("convergence: lengths differ");
  const Eigen::Index nx = x_star.front().size();
  Mat a(nx, static_cast<Eigen::Index>(x_star.size()));
  Mat b(nx, static_cast<Eigen::Index>(x_bar.size()));
  for (std::size_t k = 0; k < x_star.size(); ++k) {
    if (x_star[k].size() != nx || x_bar[k].size() != nx) throw DimensionMismatch("convergence: state sizes");
    a.col(static_cast<Eigen::Index>(k)) = x_star[k];
    b.col(static_cast<Eigen::Index>(k)) = x_bar[k];
  }
  return convergence(a, b);
}

Cftoc assemble_cftoc(const NominalTrajectory& nominal, const std::vector<dynamics::LinearizedStep>& linearized,
                     const std::vector<cbf::DcbfRow>& rows, const MpcConfig& config,
                     const std::vector<Vec>& reference) {
  const int n_steps = config.horizon;
  if (static_cast<int>(nominal.states.size()) != n_steps + 1 ||
      static_cast<int>(nominal.inputs.size()) != n_steps) {
    throw DimensionMismatch("assemble_cftoc: nominal trajectory length must match the horizon");
  }
  if (static_cast<int>(linearized.size()) != n_steps) {
    throw DimensionMismatch("assemble_cftoc: need one linearized step per horizon step");
  }
  if (static_cast<int>(reference.size()) != n_steps + 1) {
    throw DimensionMismatch("assemble_cftoc: reference must hold N + 1 states");
  }
  const int nx = static_cast<int>(nominal.states.front().size());
  const int nu = static_cast<int>(nominal.inputs.front().size());
  for (const auto& s : nominal.states) {
    if (s.size() != nx) throw DimensionMismatch("assemble_cftoc: state size");
  }
  for (const auto& u : nominal.inputs) {
    if (u.size() != nu) throw DimensionMismatch("assemble_cftoc: input size");
  }
  for (const auto& s : reference) {
    if (s.size() != nx) throw DimensionMismatch("assemble_cftoc: reference state size");
  }
  for (const auto& l : linearized) {
    if (l.a.rows() != nx || l.a.cols() != nx || l.b.rows() != nx || l.b.cols() != nu || l.residual.size() != nx) {
      throw DimensionMismatch("assemble_cftoc: linearized step size");
    }
  }
  if (config.q.rows() != nx || config.q.cols() != nx || config.p.rows() != nx || config.p.cols() != nx ||
      config.r.rows() != nu || config.r.cols() != nu) {
    throw DimensionMismatch("assemble_cftoc: weight sizes");
  }
  if (config.state_lo.size() != nx || config.state_hi.size() != nx || config.input_lo.size() != nu ||
      config.input_hi.size() != nu) {
    throw DimensionMismatch("assemble_cftoc: bound sizes");
  }
  if ((config.input_lo.array() > config.input_hi.array()).any()) {
    throw Infeasible("assemble_cftoc: input set is empty");
  }
  if ((config.state_lo.array() > config.state_hi.array()).any()) {
    throw Infeasible("assemble_cftoc: state set is empty");
  }
  for (const auto& row : rows) {
    if (row.state_coeffs.size() != nx) throw DimensionMismatch("assemble_cftoc: DCBF row size");
    if (row.step < 1 || row.step > n_steps) throw DimensionMismatch("assemble_cftoc: DCBF row step");
  }

  CftocLayout lay{nx, nu, n_steps, static_cast<int>(rows.size())};
  const int n = lay.num_vars();
  const int m_slack = lay.num_slacks;
  const int m = n_steps * nx      // dynamics
                + n_steps * nx    // state bounds
                + n_steps * nu    // input bounds
                + 2 * m_slack;    // slack bounds and DCBF rows

  Mat h = Mat::Zero(n, n);
  Vec g = Vec::Zero(n);
  for (int k = 1; k <= n_steps; ++k) {
    const Mat& w = k < n_steps ? config.q : config.p;
    h.block(lay.state(k), lay.state(k), nx, nx) += 2.0 * w;
    g.segment(lay.state(k), nx) -= 2.0 * w * reference[static_cast<std::size_t>(k)];
  }
  for (int k = 0; k < n_steps; ++k) h.block(lay.input(k), lay.input(k), nu, nu) += 2.0 * config.r;
  for (int i = 0; i < m_slack; ++i) {
    h(lay.slack(i), lay.slack(i)) += 2.0 * config.slack_weight;
    g[lay.slack(i)] -= 2.0 * config.slack_weight;  // reference value 1
  }

  Mat a = Mat::Zero(m, n);
  Vec lo(m), hi(m);
  int row = 0;
  const Vec& x0 = nominal.states.front();
  for (int k = 0; k < n_steps; ++k) {
    const auto& lin = linearized[static_cast<std::size_t>(k)];
    // x_{k+1} - A x_k - B u_k = f(xbar, ubar) - A xbar - B ubar
    const Vec affine = lin.residual + nominal.states[static_cast<std::size_t>(k + 1)] - lin.a * lin.nominal_state -
                       lin.b * lin.nominal_input;
    a.block(row, lay.state(k + 1), nx, nx) = Mat::Identity(nx, nx);
    a.block(row, lay.input(k), nx, nu) = -lin.b;
    Vec rhs = affine;
    if (k == 0) {
      rhs += lin.a * x0;
    } else {
      a.block(row, lay.state(k), nx, nx) = -lin.a;
    }
    lo.segment(row, nx) = rhs;
    hi.segment(row, nx) = rhs;
    row += nx;
  }
  for (int k = 1; k <= n_steps; ++k) {
    a.block(row, lay.state(k), nx, nx) = Mat::Identity(nx, nx);
    lo.segment(row, nx) = config.state_lo;
    hi.segment(row, nx) = config.state_hi;
    row += nx;
  }
  for (int k = 0; k < n_steps; ++k) {
    a.block(row, lay.input(k), nu, nu) = Mat::Identity(nu, nu);
    lo.segment(row, nu) = config.input_lo;
    hi.segment(row, nu) = config.input_hi;
    row += nu;
  }
  for (int i = 0; i < m_slack; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    a(row, lay.slack(i)) = 1.0;
    lo[row] = r.slack_min;
    hi[row] = r.slack_max;
    ++row;
  }
  for (int i = 0; i < m_slack; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    a.block(row, lay.state(r.step), 1, nx) = r.state_coeffs.transpose();
    a(row, lay.slack(i)) = -r.slack_coeff;
    lo[row] = -r.constant;
    hi[row] = qp::kInf;
    ++row;
  }
  return Cftoc{qp::QpProblem(std::move(h), std::move(g), std::move(a), std::move(lo), std::move(hi)), lay};
}

bool is_convex(const qp::QpProblem& problem, double tol) {
  const Mat& p = problem.quadratic_cost;
  if (p.rows() != p.cols() || p.rows() != problem.num_vars()) return false;
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-10) return false;
  Eigen::SelfAdjointEigenSolver<Mat> es(p, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

void HyperplaneCache::put(int obstacle, int piece, int step, Entry entry) {
  entries_[{obstacle, piece, step}] = std::move(entry);
}

const HyperplaneCache::Entry* HyperplaneCache::find(int obstacle, int piece, int step) const {
  const auto it = entries_.find({obstacle, piece, step});
  return it == entries_.end() ? nullptr : &it->second;
}

void HyperplaneCache::shift() {
  std::map<std::tuple<int, int, int>, Entry> next;
  for (const auto& [key, entry] : entries_) {
    const auto [o, p, k] = key;
    if (k >= 2) next[{o, p, k - 1}] = entry;
  }
  // Keep the old last-step planes as a guess for the new last step.
  for (const auto& [key, entry] : entries_) {
    const auto [o, p, k] = key;
    if (next.find({o, p, k}) == next.end()) next[{o, p, k}] = entry;
  }
  entries_ = std::move(next);
}

namespace {

// Obstacle facet that best separates a robot piece, for contacts without any
// cached plane. Returns the plane and the deepest robot vertex.
std::pair<geometry::Hyperplane, Vec> facet_fallback(const geometry::Polytope& obstacle,
                                                    const geometry::Polytope& piece_world) {
  double best = -std::numeric_limits<double>::infinity();
  Eigen::Index best_facet = 0;
  Vec best_vertex;
  for (Eigen::Index i = 0; i < obstacle.num_facets(); ++i) {
    double worst = std::numeric_limits<double>::infinity();
    Vec worst_vertex;
    for (const auto& v : piece_world.vertices()) {
      const double s = obstacle.a().row(i).dot(v) - obstacle.b()[i];
      if (s < worst) {
        worst = s;
        worst_vertex = v;
      }
    }
    if (worst > best) {
      best = worst;
      best_facet = i;
      best_vertex = worst_vertex;
    }
  }
  const Vec n = obstacle.a().row(best_facet).transpose();
  return {geometry::Hyperplane{n, n * obstacle.b()[best_facet], 0.0}, best_vertex};
}

double pair_distance(const geometry::Polytope& obstacle, const geometry::Polytope& piece) {
  const auto pair = geometry::closest_points(obstacle, piece);
  if (pair.squared_distance > 1e-14) return pair.distance();
  return geometry::signed_distance(obstacle, piece);
}

}  // namespace

std::vector<cbf::SafetyConstraint> build_safety_constraints(const dynamics::Model& model,
                                                            const geometry::RobotShape& shape,
                                                            const Vec& current_state,
                                                            const NominalTrajectory& nominal, const World& world,
                                                            const MpcConfig& config, HyperplaneCache* cache,
                                                            int* active_count) {
  std::vector<cbf::SafetyConstraint> out;
  std::map<std::pair<int, int>, double> psi_current;
  std::vector<char> seen(static_cast<std::size_t>(world.num_obstacles()), 0);
  std::vector<geometry::Polytope> current_pieces;
  const int n_steps = static_cast<int>(nominal.states.size()) - 1;
  for (int k = 1; k <= n_steps; ++k) {
    const Vec& xk = nominal.states[static_cast<std::size_t>(k)];
    const geometry::Pose pose = model.pose(xk);
    const auto snapshot = world.snapshot(k);
    const auto active = geometry::detect_active_obstacles(snapshot, pose.position, config.sensing_radius);
    if (active.empty()) continue;
    const auto pieces = geometry::pose_to_world(shape, pose);
    const Mat rot = geometry::rotation(pose.orientation);
    for (int o : active) {
      seen[static_cast<std::size_t>(o)] = 1;
      const auto& obstacle = snapshot[static_cast<std::size_t>(o)];
      for (int pc = 0; pc < static_cast<int>(pieces.size()); ++pc) {
        const auto& piece = pieces[static_cast<std::size_t>(pc)];
        cbf::SafetyConstraint c;
        c.step = k;
        c.obstacle = o;
        c.piece = pc;
        const auto pair = geometry::closest_points(obstacle, piece);
        if (pair.distance() >= geometry::kDegenerateDistance) {
          c.hyperplane = geometry::supporting_hyperplane(pair, config.cbf.margin);
          c.point_map = geometry::linearize_robot_point(pair, pose);
          if (cache != nullptr) cache->put(o, pc, k, {c.hyperplane, c.point_map.local_point});
        } else if (const auto* hit = cache != nullptr ? cache->find(o, pc, k) : nullptr) {
          c.hyperplane = hit->plane;
          c.point_map = geometry::linearize_robot_point(Vec(rot * hit->local_point + pose.position), pose);
        } else {
          auto [plane, vertex] = facet_fallback(obstacle, piece);
          plane.margin = config.cbf.margin;
          c.hyperplane = plane;
          c.point_map = geometry::linearize_robot_point(vertex, pose);
          if (cache != nullptr) cache->put(o, pc, k, {c.hyperplane, c.point_map.local_point});
        }
        const auto key = std::make_pair(o, pc);
        auto it = psi_current.find(key);
        if (it == psi_current.end()) {
          if (current_pieces.empty()) current_pieces = geometry::pose_to_world(shape, model.pose(current_state));
          const double d = pair_distance(world.at(o, 0), current_pieces[static_cast<std::size_t>(pc)]);
          it = psi_current.emplace(key, d - config.cbf.margin).first;
        }
        c.psi0_current = it->second;
        out.push_back(std::move(c));
      }
    }
  }
  if (active_count != nullptr) *active_count = static_cast<int>(std::count(seen.begin(), seen.end(), 1));
  return out;
}

IterateOutput iterate(const dynamics::Model& model, const geometry::RobotShape& shape, const Vec& current_state,
                      const NominalTrajectory& warm, const std::vector<Vec>& reference, const World& world,
                      const MpcConfig& config, HyperplaneCache* cache) {
  const auto t0 = Clock::now();
  const int n_steps = config.horizon;
  if (static_cast<int>(warm.states.size()) != n_steps + 1 || static_cast<int>(warm.inputs.size()) != n_steps) {
    throw DimensionMismatch("iterate: warm trajectory length must match the horizon");
  }
  if (current_state.size() != model.state_dim()) throw DimensionMismatch("iterate: state size");

  IterateOutput out;
  NominalTrajectory nominal = warm;
  nominal.states.front() = current_state;
  auto& diag = out.diagnostics;

  for (int j = 0; j < config.max_iterations; ++j) {
    std::vector<dynamics::LinearizedStep> lin;
    lin.reserve(static_cast<std::size_t>(n_steps));
    for (int k = 0; k < n_steps; ++k) {
      lin.push_back(dynamics::linearize(model, nominal.states[static_cast<std::size_t>(k)],
                                        nominal.inputs[static_cast<std::size_t>(k)],
                                        nominal.states[static_cast<std::size_t>(k + 1)], config.dt));
    }
    int active = 0;
    const auto constraints =
        build_safety_constraints(model, shape, current_state, nominal, world, config, cache, &active);
    const auto rows = cbf::build_dcbf_rows(constraints, config.cbf, n_steps, model);
    const Cftoc cftoc = assemble_cftoc(nominal, lin, rows, config, reference);

    const auto& lay = cftoc.layout;
    Vec guess(lay.num_vars());
    for (int k = 1; k <= n_steps; ++k) guess.segment(lay.state(k), lay.nx) = nominal.states[static_cast<std::size_t>(k)];
    for (int k = 0; k < n_steps; ++k) guess.segment(lay.input(k), lay.nu) = nominal.inputs[static_cast<std::size_t>(k)];
    for (int i = 0; i < lay.num_slacks; ++i) {
      guess[lay.slack(i)] = std::clamp(1.0, config.cbf.slack_min, config.cbf.slack_max);
    }
    qp::QpSettings settings = config.qp;
    settings.warm_start = guess;
    const auto sol = qp::solve(cftoc.problem, settings);

    ++diag.iterations;
    diag.qp_times.push_back(sol.solve_time);
    diag.qp_time += sol.solve_time;
    diag.qp_status = sol.status;
    diag.active_obstacles = active;
    if (!sol.optimal()) break;

    IterationResult res;
    res.states.resize(static_cast<std::size_t>(n_steps + 1));
    res.inputs.resize(static_cast<std::size_t>(n_steps));
    res.states.front() = current_state;
    for (int k = 1; k <= n_steps; ++k) res.states[static_cast<std::size_t>(k)] = sol.primal.segment(lay.state(k), lay.nx);
    for (int k = 0; k < n_steps; ++k) res.inputs[static_cast<std::size_t>(k)] = sol.primal.segment(lay.input(k), lay.nu);
    for (int i = 0; i < lay.num_slacks; ++i) res.slacks.push_back(sol.primal[lay.slack(i)]);
    res.qp_status = sol.status;
    res.solve_time = sol.solve_time;
    std::tie(res.e_abs, res.e_rel) = convergence(res.states, nominal.states);

    diag.e_abs = res.e_abs;
    diag.e_rel = res.e_rel;
    diag.dcbf_rows = static_cast<int>(rows.size());
    nominal.states = res.states;
    nominal.inputs = res.inputs;
    out.result = std::move(res);
    out.success = true;
    if (out.result.e_abs < config.eps_abs || out.result.e_rel < config.eps_rel) break;
  }
  diag.total_time = seconds_since(t0);
  return out;
}

double min_distance(const dynamics::Model& model, const geometry::RobotShape& shape, const Vec& state,
                    const World& world, int k) {
  const auto pieces = geometry::pose_to_world(shape, model.pose(state));
  double best = std::numeric_limits<double>::infinity();
  for (const auto& obstacle : world.snapshot(k)) {
    for (const auto& piece : pieces) {
      if (aabb_gap(obstacle, piece) >= best) continue;
      best = std::min(best, geometry::signed_distance(obstacle, piece));
    }
  }
  return best;
}

Controller::Controller(std::shared_ptr<const dynamics::Model> model, geometry::RobotShape shape, MpcConfig config,
                       Vec initial_state)
    : model_(std::move(model)), shape_(std::move(shape)), config_(std::move(config)), state_(std::move(initial_state)) {
  if (!model_) throw std::invalid_argument("Controller: model is null");
  config_.validate(*model_);
  if (state_.size() != model_->state_dim()) throw DimensionMismatch("Controller: initial state size");
  if (shape_.dim() != model_->workspace_dim()) throw DimensionMismatch("Controller: shape dimension");
  last_input_ = Vec::Zero(model_->input_dim());
}

void Controller::hold_plan() {
  const auto n = static_cast<std::size_t>(config_.horizon);
  plan_.states.assign(n + 1, state_);
  plan_.inputs.assign(n, Vec::Zero(model_->input_dim()));
}

void Controller::initialize(const World& world) {
  const auto n = static_cast<std::size_t>(config_.horizon);
  plan_.states.assign(1, state_);
  plan_.inputs.assign(n, Vec::Zero(model_->input_dim()));
  bool safe = true;
  for (std::size_t k = 0; k < n; ++k) {
    plan_.states.push_back(model_->step(plan_.states.back(), plan_.inputs[k], config_.dt));
    const Vec& x = plan_.states.back();
    if (!within(x, config_.state_lo, config_.state_hi) ||
        min_distance(*model_, shape_, x, world, static_cast<int>(k + 1)) < 0.0) {
      safe = false;
    }
  }
  if (!safe) hold_plan();
  cache_.clear();
  initialized_ = true;
}

void Controller::shift_plan(const IterationResult& result) {
  plan_.states.assign(result.states.begin() + 1, result.states.end());
  plan_.inputs.assign(result.inputs.begin() + 1, result.inputs.end());
  plan_.inputs.push_back(result.inputs.back());
  plan_.states.push_back(model_->step(plan_.states.back(), plan_.inputs.back(), config_.dt));
  plan_.states.front() = state_;
}

StepOutcome Controller::step(const World& world, const std::vector<Vec>& reference) {
  if (!initialized_) initialize(world);
  const auto t0 = Clock::now();
  StepOutcome out;
  auto it = iterate(*model_, shape_, state_, plan_, reference, world, config_, &cache_);
  out.diagnostics = it.diagnostics;

  const int nu = model_->input_dim();
  const double current = min_distance(*model_, shape_, state_, world, 0);
  auto acceptable = [&](const Vec& next, double& dist) {
    if (!within(next, config_.state_lo, config_.state_hi)) return false;
    dist = min_distance(*model_, shape_, next, world, 1);
    return dist >= std::min(0.0, current);
  };

  struct Candidate {
    Vec input;
    const char* label;
  };
  std::vector<Candidate> candidates;
  if (it.success) candidates.push_back({it.result.inputs.front(), ""});
  candidates.push_back({Vec(0.5 * last_input_), "half_previous"});
  candidates.push_back({Vec::Zero(nu), "zero"});
  Vec brake = Vec::Zero(nu);
  const int vi = model_->speed_index();
  brake[nu - 1] = std::clamp(-state_[vi] / config_.dt, config_.input_lo[nu - 1], config_.input_hi[nu - 1]);
  candidates.push_back({brake, "brake"});

  for (const auto& cand : candidates) {
    const Vec u = cand.input.cwiseMax(config_.input_lo).cwiseMin(config_.input_hi);
    const Vec next = model_->step(state_, u, config_.dt);
    double dist = 0.0;
    if (!acceptable(next, dist)) continue;
    out.input = u;
    out.next_state = next;
    out.diagnostics.min_distance = dist;
    out.diagnostics.fallback = cand.label;
    break;
  }
  cache_.shift();
  if (out.input.size() == 0) {
    out.failed = true;
    out.input = Vec::Zero(nu);
    out.next_state = state_;
    out.diagnostics.min_distance = current;
    out.diagnostics.fallback = "none";
    out.diagnostics.total_time = seconds_since(t0);
    return out;
  }
  state_ = out.next_state;
  last_input_ = out.input;
  if (out.diagnostics.fallback.empty()) {
    out.slacks = it.result.slacks;
    shift_plan(it.result);
  } else {
    initialize(world);
  }
  out.diagnostics.total_time = seconds_since(t0);
  return out;
}

}  // namespace impc::mpc
