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

#include "impc/qp/qp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "impc/simd/kernels.hpp"

namespace impc::qp {

QpProblem::QpProblem(Mat p, Vec q, Mat a, Vec l, Vec u)
    : quadratic_cost(std::move(p)),
      linear_cost(std::move(q)),
      constraint_matrix(std::move(a)),
      lower_bounds(std::move(l)),
      upper_bounds(std::move(u)) {
  validate_and_symmetrize();
}

void QpProblem::validate_and_symmetrize() {
  const Eigen::Index n = linear_cost.size();
  if (quadratic_cost.rows() != n || quadratic_cost.cols() != n) {
    throw DimensionMismatch("QpProblem: quadratic_cost must be num_vars x num_vars");
  }
  if (constraint_matrix.cols() != n && constraint_matrix.rows() != 0) {
    throw DimensionMismatch("QpProblem: constraint_matrix column count differs from num_vars");
  }
  if (constraint_matrix.rows() == 0) constraint_matrix.resize(0, n);
  const Eigen::Index m = constraint_matrix.rows();
  if (lower_bounds.size() != m || upper_bounds.size() != m) {
    throw DimensionMismatch("QpProblem: bound vectors must have num_cons entries");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (std::isnan(lower_bounds[i]) || std::isnan(upper_bounds[i]) ||
        lower_bounds[i] > upper_bounds[i]) {
      throw std::invalid_argument("QpProblem: lower_bounds must not exceed upper_bounds (row " +
                                  std::to_string(i) + ")");
    }
  }
  const Mat sym = 0.5 * (quadratic_cost + quadratic_cost.transpose());
  quadratic_cost = sym;
}

double QpProblem::objective(const Vec& x) const {
  return 0.5 * x.dot(quadratic_cost * x) + linear_cost.dot(x);
}

double QpProblem::max_violation(const Vec& x) const {
  if (num_cons() == 0) return 0.0;
  const Vec ax = constraint_matrix * x;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < ax.size(); ++i) {
    worst = std::max({worst, lower_bounds[i] - ax[i], ax[i] - upper_bounds[i]});
  }
  return worst;
}

std::string_view to_string(QpStatus status) {
  switch (status) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::PrimalInfeasible: return "primal_infeasible";
    case QpStatus::MaxIterations: return "max_iterations";
    case QpStatus::NumericalError: return "numerical_error";
  }
  return "unknown";
}

namespace {

constexpr double kMachEps = std::numeric_limits<double>::epsilon();

// Normalized constraint set: C.col(k)' x >= rhs[k], or == for equalities.
struct ConstraintSet {
  Mat normals;  // n x mc
  Vec rhs;
  std::vector<bool> equality;
  bool trivially_infeasible = false;
};

ConstraintSet normalize_constraints(const QpProblem& prob) {
  const Eigen::Index n = prob.num_vars();
  const Eigen::Index m = prob.num_cons();
  std::vector<Vec> cols;
  std::vector<double> rhs;
  std::vector<bool> eq;
  ConstraintSet out;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Vec a = prob.constraint_matrix.row(i).transpose();
    const double lo = prob.lower_bounds[i];
    const double hi = prob.upper_bounds[i];
    const double norm = a.norm();
    if (norm == 0.0) {
      if (lo > 1e-12 || hi < -1e-12) out.trivially_infeasible = true;
      continue;
    }
    const bool lo_finite = std::isfinite(lo);
    const bool hi_finite = std::isfinite(hi);
    if (lo_finite && hi_finite && hi - lo <= 1e-14 * (1.0 + std::abs(lo))) {
      cols.push_back(a / norm);
      rhs.push_back(0.5 * (lo + hi) / norm);
      eq.push_back(true);
      continue;
    }
    if (lo_finite) {
      cols.push_back(a / norm);
      rhs.push_back(lo / norm);
      eq.push_back(false);
    }
    if (hi_finite) {
      cols.push_back(-a / norm);
      rhs.push_back(-hi / norm);
      eq.push_back(false);
    }
  }
  out.normals.resize(n, static_cast<Eigen::Index>(cols.size()));
  out.rhs.resize(static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    out.normals.col(static_cast<Eigen::Index>(k)) = cols[k];
    out.rhs[static_cast<Eigen::Index>(k)] = rhs[k];
  }
  out.equality = std::move(eq);
  return out;
}

// Goldfarb-Idnani dual active-set state. J = L^{-T} Q where G = L L' and
// [R; 0] = Q' N for the active normals N.
class DualActiveSet {
 public:
  DualActiveSet(Mat j, const ConstraintSet& cons, const simd::KernelTable& k)
      : n_(j.rows()),
        j_(std::move(j)),
        r_(Mat::Zero(n_, n_)),
        d_(n_),
        z_(n_),
        cons_(cons),
        k_(k) {}

  // d = J' np, z = J2 d2, r = R^{-1} d1.
  void compute_step_directions(Eigen::Index p) {
    const double* np = cons_.normals.col(p).data();
    k_.gemv_t(j_.data(), n_, n_, n_, np, nullptr, d_.data());
    const Eigen::Index iq = active_size();
    if (iq < n_) {
      k_.gemv_n(j_.data() + iq * n_, n_, n_ - iq, n_, d_.data() + iq, z_.data());
    } else {
      z_.setZero();
    }
    r_step_.resize(iq);
    for (Eigen::Index i = iq - 1; i >= 0; --i) {
      double sum = d_[i];
      for (Eigen::Index c = i + 1; c < iq; ++c) sum -= r_(i, c) * r_step_[c];
      r_step_[i] = sum / r_(i, i);
    }
  }

  // Appends constraint p with multiplier `mult`. False on numerical dependence.
  bool add(Eigen::Index p, double mult) {
    const Eigen::Index iq = active_size();
    if (iq >= n_) return false;
    for (Eigen::Index jj = n_ - 1; jj > iq; --jj) {
      double cc = d_[jj - 1];
      double ss = d_[jj];
      const double h = std::hypot(cc, ss);
      if (h == 0.0) continue;
      d_[jj] = 0.0;
      cc /= h;
      ss /= h;
      if (cc < 0.0) {
        cc = -cc;
        ss = -ss;
        d_[jj - 1] = -h;
      } else {
        d_[jj - 1] = h;
      }
      const double xny = ss / (1.0 + cc);
      k_.rotate(j_.col(jj - 1).data(), j_.col(jj).data(), static_cast<std::size_t>(n_), cc, ss, xny);
    }
    const double diag = d_[iq];
    if (std::abs(diag) <= kMachEps * r_norm_ * 10.0 || diag == 0.0) return false;
    r_.col(iq).head(iq + 1) = d_.head(iq + 1);
    r_norm_ = std::max(r_norm_, std::abs(diag));
    active_.push_back(p);
    mult_.push_back(mult);
    return true;
  }

  // Removes the active constraint at position pos and restores R to triangular form.
  void drop(Eigen::Index pos) {
    Eigen::Index iq = active_size();
    for (Eigen::Index i = pos; i < iq - 1; ++i) r_.col(i) = r_.col(i + 1);
    r_.col(iq - 1).setZero();
    active_.erase(active_.begin() + pos);
    mult_.erase(mult_.begin() + pos);
    iq -= 1;
    for (Eigen::Index jj = pos; jj < iq; ++jj) {
      double cc = r_(jj, jj);
      double ss = r_(jj + 1, jj);
      const double h = std::hypot(cc, ss);
      if (h == 0.0) continue;
      cc /= h;
      ss /= h;
      r_(jj + 1, jj) = 0.0;
      if (cc < 0.0) {
        r_(jj, jj) = -h;
        cc = -cc;
        ss = -ss;
      } else {
        r_(jj, jj) = h;
      }
      const double xny = ss / (1.0 + cc);
      for (Eigen::Index c = jj + 1; c < iq; ++c) {
        const double t1 = r_(jj, c);
        const double t2 = r_(jj + 1, c);
        r_(jj, c) = t1 * cc + t2 * ss;
        r_(jj + 1, c) = xny * (t1 + r_(jj, c)) - t2;
      }
      k_.rotate(j_.col(jj).data(), j_.col(jj + 1).data(), static_cast<std::size_t>(n_), cc, ss, xny);
    }
  }

  [[nodiscard]] Eigen::Index active_size() const { return static_cast<Eigen::Index>(active_.size()); }

  Eigen::Index n_;
  Mat j_;
  Mat r_;
  Vec d_;
  Vec z_;
  Vec r_step_;
  double r_norm_ = 1.0;
  std::vector<Eigen::Index> active_;
  std::vector<double> mult_;
  const ConstraintSet& cons_;
  const simd::KernelTable& k_;
};

QpSolution finish(const QpProblem& prob, Vec x, QpStatus status, int iters,
                  std::chrono::steady_clock::time_point start) {
  QpSolution sol;
  sol.primal = std::move(x);
  sol.status = status;
  sol.iterations = iters;
  sol.objective = sol.primal.size() == prob.num_vars() ? prob.objective(sol.primal) : 0.0;
  sol.solve_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

}  // namespace

QpSolution solve(const QpProblem& problem, const QpSettings& settings) {
  return solve_with_kernels(problem, settings, simd::active_kernels());
}

QpSolution solve_with_kernels(const QpProblem& problem, const QpSettings& settings,
                              const simd::KernelTable& kern) {
  const auto start = std::chrono::steady_clock::now();
  const Eigen::Index n = problem.num_vars();
  if (n == 0) return finish(problem, Vec(), QpStatus::Optimal, 0, start);

  const ConstraintSet cons = normalize_constraints(problem);
  if (cons.trivially_infeasible) {
    return finish(problem, Vec::Zero(n), QpStatus::PrimalInfeasible, 0, start);
  }

  // Scale the cost so the Hessian diagonal is O(1); thresholds below are absolute.
  double cost_scale = problem.quadratic_cost.diagonal().cwiseAbs().maxCoeff();
  if (!(cost_scale > 0.0)) cost_scale = 1.0;
  Mat g = problem.quadratic_cost / cost_scale;
  const Vec q = problem.linear_cost / cost_scale;

  double reg = settings.regularization;
  Eigen::LLT<Mat> llt;
  for (int attempt = 0; attempt < 6; ++attempt) {
    Mat greg = g;
    greg.diagonal().array() += reg;
    llt.compute(greg);
    if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 0.0) {
      g = std::move(greg);
      break;
    }
    reg = std::max(reg * 100.0, 1e-12);
    if (attempt == 5) return finish(problem, Vec::Zero(n), QpStatus::NumericalError, 0, start);
  }

  // J = L^{-T}
  Mat jmat = llt.matrixU().solve(Mat::Identity(n, n));
  Vec x = -llt.solve(q);

  DualActiveSet das(std::move(jmat), cons, kern);
  const Eigen::Index mc = cons.rhs.size();
  int iters = 0;
  const double tiny = 1e-14;

  // Equalities first; their multipliers are free in sign.
  for (Eigen::Index p = 0; p < mc; ++p) {
    if (!cons.equality[static_cast<std::size_t>(p)]) continue;
    ++iters;
    das.compute_step_directions(p);
    const double resid = cons.rhs[p] - cons.normals.col(p).dot(x);
    const double zn = das.z_.dot(cons.normals.col(p));
    if (das.z_.squaredNorm() <= tiny || std::abs(zn) <= tiny) {
      if (std::abs(resid) <= 1e-9 * (1.0 + std::abs(cons.rhs[p]))) continue;  // redundant
      return finish(problem, x, QpStatus::PrimalInfeasible, iters, start);
    }
    const double t = resid / zn;
    x += t * das.z_;
    for (Eigen::Index i = 0; i < das.active_size(); ++i) das.mult_[i] -= t * das.r_step_[i];
    if (!das.add(p, t)) return finish(problem, x, QpStatus::NumericalError, iters, start);
  }

  std::vector<bool> is_active(static_cast<std::size_t>(mc), false);
  for (auto a : das.active_) is_active[static_cast<std::size_t>(a)] = true;

  std::vector<bool> hinted(static_cast<std::size_t>(mc), false);
  bool have_hint = false;
  if (settings.warm_start && settings.warm_start->size() == n) {
    const Vec& guess = *settings.warm_start;
    for (Eigen::Index p = 0; p < mc; ++p) {
      if (cons.equality[static_cast<std::size_t>(p)]) continue;
      const double s = cons.normals.col(p).dot(guess) - cons.rhs[p];
      if (std::abs(s) <= 1e-7 * (1.0 + std::abs(cons.rhs[p]))) {
        hinted[static_cast<std::size_t>(p)] = true;
        have_hint = true;
      }
    }
  }

  auto violation_tol = [&](Eigen::Index p) { return 1e-10 * (1.0 + std::abs(cons.rhs[p])); };

  Vec slack(mc);
  while (true) {
    if (iters >= settings.max_iterations) {
      return finish(problem, x, QpStatus::MaxIterations, iters, start);
    }
    if (mc > 0) kern.gemv_t(cons.normals.data(), n, mc, n, x.data(), nullptr, slack.data());
    slack -= cons.rhs;

    Eigen::Index p = -1;
    double worst = 0.0;
    auto pick = [&](bool hinted_only) {
      for (Eigen::Index c = 0; c < mc; ++c) {
        const auto cu = static_cast<std::size_t>(c);
        if (cons.equality[cu] || is_active[cu]) continue;
        if (hinted_only && !hinted[cu]) continue;
        if (slack[c] < -violation_tol(c) && slack[c] < worst) {
          worst = slack[c];
          p = c;
        }
      }
    };
    if (have_hint) pick(true);
    if (p < 0) pick(false);
    if (p < 0) break;

    double new_mult = 0.0;
    while (true) {
      ++iters;
      if (iters > settings.max_iterations) {
        return finish(problem, x, QpStatus::MaxIterations, iters, start);
      }
      das.compute_step_directions(p);
      const auto& np = cons.normals.col(p);

      // Largest dual step keeping active inequality multipliers nonnegative.
      double t1 = kInf;
      Eigen::Index drop_pos = -1;
      for (Eigen::Index i = 0; i < das.active_size(); ++i) {
        const auto c = static_cast<std::size_t>(das.active_[static_cast<std::size_t>(i)]);
        if (cons.equality[c]) continue;
        if (das.r_step_[i] > 0.0) {
          const double ratio = das.mult_[static_cast<std::size_t>(i)] / das.r_step_[i];
          if (ratio < t1) {
            t1 = ratio;
            drop_pos = i;
          }
        }
      }
      double t2 = kInf;
      const double zn = das.z_.dot(np);
      const double sp = np.dot(x) - cons.rhs[p];
      if (das.z_.squaredNorm() > tiny && zn > tiny) t2 = -sp / zn;

      const double t = std::min(t1, t2);
      if (!std::isfinite(t)) {
        return finish(problem, x, QpStatus::PrimalInfeasible, iters, start);
      }
      if (!std::isfinite(t2)) {
        for (Eigen::Index i = 0; i < das.active_size(); ++i) {
          das.mult_[static_cast<std::size_t>(i)] -= t * das.r_step_[i];
        }
        new_mult += t;
        is_active[static_cast<std::size_t>(das.active_[static_cast<std::size_t>(drop_pos)])] = false;
        das.drop(drop_pos);
        continue;
      }
      x += t * das.z_;
      for (Eigen::Index i = 0; i < das.active_size(); ++i) {
        das.mult_[static_cast<std::size_t>(i)] -= t * das.r_step_[i];
      }
      new_mult += t;
      if (t2 <= t1) {
        if (!das.add(p, new_mult)) {
          return finish(problem, x, QpStatus::NumericalError, iters, start);
        }
        is_active[static_cast<std::size_t>(p)] = true;
        break;
      }
      is_active[static_cast<std::size_t>(das.active_[static_cast<std::size_t>(drop_pos)])] = false;
      das.drop(drop_pos);
    }
  }

  const double viol = problem.max_violation(x);
  double bound_scale = 1.0;
  if (problem.num_cons() > 0) {
    for (Eigen::Index i = 0; i < problem.num_cons(); ++i) {
      if (std::isfinite(problem.lower_bounds[i])) bound_scale = std::max(bound_scale, std::abs(problem.lower_bounds[i]));
      if (std::isfinite(problem.upper_bounds[i])) bound_scale = std::max(bound_scale, std::abs(problem.upper_bounds[i]));
    }
  }
  if (!x.allFinite() || viol > settings.eps_abs + settings.eps_rel * bound_scale) {
    return finish(problem, x, QpStatus::NumericalError, iters, start);
  }
  return finish(problem, x, QpStatus::Optimal, iters, start);
}

}  // namespace impc::qp
