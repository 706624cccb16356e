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

#include "impc/geometry/polytope.hpp"

#include <algorithm>
#include <cmath>

namespace impc::geometry {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kDedupTol = 1e-9;

void push_unique(std::vector<Vec>& out, const Vec& v) {
  for (const auto& w : out) {
    if ((w - v).lpNorm<Eigen::Infinity>() <= kDedupTol) return;
  }
  out.push_back(v);
}

bool feasible(const Mat& a, const Vec& b, const Vec& x) {
  return ((a * x - b).array() <= kFeasTol).all();
}

}  // namespace

bool has_recession_direction(const Mat& a) {
  const int dim = static_cast<int>(a.cols());
  Eigen::FullPivLU<Mat> lu(a);
  lu.setThreshold(1e-12);
  if (lu.rank() < dim) return true;
  auto is_recession = [&](const Vec& d) { return ((a * d).array() <= 1e-12).all(); };
  const Eigen::Index m = a.rows();
  if (dim == 2) {
    for (Eigen::Index i = 0; i < m; ++i) {
      Vec d(2);
      d << -a(i, 1), a(i, 0);
      if (is_recession(d) || is_recession(-d)) return true;
    }
    return false;
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const Eigen::Vector3d ai = a.row(i).transpose();
      const Eigen::Vector3d aj = a.row(j).transpose();
      Eigen::Vector3d d = ai.cross(aj);
      const double nd = d.norm();
      if (nd < 1e-12) continue;
      d /= nd;
      if (is_recession(d) || is_recession(-d)) return true;
    }
  }
  return false;
}

std::vector<Vec> enumerate_vertices(const Mat& a, const Vec& b) {
  const int dim = static_cast<int>(a.cols());
  if (dim != 2 && dim != 3) throw DimensionMismatch("enumerate_vertices: dimension must be 2 or 3");
  if (b.size() != a.rows()) throw DimensionMismatch("enumerate_vertices: b size mismatch");
  if (has_recession_direction(a)) throw UnboundedPolytope("polytope is unbounded");
  std::vector<Vec> out;
  const Eigen::Index m = a.rows();
  if (dim == 2) {
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i + 1; j < m; ++j) {
        Eigen::Matrix2d s;
        s << a.row(i), a.row(j);
        if (std::abs(s.determinant()) < 1e-12) continue;
        const Vec x = s.inverse() * Eigen::Vector2d(b[i], b[j]);
        if (feasible(a, b, x)) push_unique(out, x);
      }
    }
  } else {
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i + 1; j < m; ++j) {
        for (Eigen::Index k = j + 1; k < m; ++k) {
          Eigen::Matrix3d s;
          s << a.row(i), a.row(j), a.row(k);
          if (std::abs(s.determinant()) < 1e-12) continue;
          const Vec x = s.partialPivLu().solve(Eigen::Vector3d(b[i], b[j], b[k]));
          if (feasible(a, b, x)) push_unique(out, x);
        }
      }
    }
  }
  if (out.empty()) throw EmptyPolytope("polytope is empty");
  return out;
}

Polytope::Polytope(Mat a, Vec b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.cols() != 2 && a_.cols() != 3) throw DimensionMismatch("Polytope: dimension must be 2 or 3");
  if (b_.size() != a_.rows()) throw DimensionMismatch("Polytope: b size must equal facet count");
  for (Eigen::Index i = 0; i < a_.rows(); ++i) {
    const double n = a_.row(i).norm();
    if (n == 0.0) throw DimensionMismatch("Polytope: zero facet normal");
    a_.row(i) /= n;
    b_[i] /= n;
  }
  vertices_ = enumerate_vertices(a_, b_);
  finalize();
}

Polytope::Polytope(Mat a, Vec b, std::vector<Vec> vertices)
    : a_(std::move(a)), b_(std::move(b)), vertices_(std::move(vertices)) {
  finalize();
}

void Polytope::finalize() {
  const int d = dim();
  lo_ = Vec::Constant(d, std::numeric_limits<double>::infinity());
  hi_ = Vec::Constant(d, -std::numeric_limits<double>::infinity());
  for (const auto& v : vertices_) {
    lo_ = lo_.cwiseMin(v);
    hi_ = hi_.cwiseMax(v);
  }
  axis_box_ = false;
  if (a_.rows() == 2 * d) {
    std::vector<int> seen(static_cast<std::size_t>(2 * d), 0);
    bool ok = true;
    for (Eigen::Index i = 0; i < a_.rows() && ok; ++i) {
      int axis = -1;
      int nonzero = 0;
      for (int c = 0; c < d; ++c) {
        if (std::abs(a_(i, c)) > 1e-12) {
          ++nonzero;
          axis = c;
        }
      }
      if (nonzero != 1 || std::abs(std::abs(a_(i, axis)) - 1.0) > 1e-12) {
        ok = false;
        break;
      }
      seen[static_cast<std::size_t>(2 * axis + (a_(i, axis) > 0 ? 1 : 0))]++;
    }
    axis_box_ = ok && std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
  }
}

Polytope Polytope::box(const Vec& lo, const Vec& hi) {
  const Eigen::Index d = lo.size();
  if (hi.size() != d) throw DimensionMismatch("Polytope::box: bound sizes differ");
  Mat a = Mat::Zero(2 * d, d);
  Vec b(2 * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    a(2 * i, i) = 1.0;
    b[2 * i] = hi[i];
    a(2 * i + 1, i) = -1.0;
    b[2 * i + 1] = -lo[i];
  }
  return Polytope(std::move(a), std::move(b));
}

Polytope Polytope::from_points_2d(const std::vector<Eigen::Vector2d>& points) {
  std::vector<Eigen::Vector2d> pts = points;
  std::sort(pts.begin(), pts.end(), [](const auto& p, const auto& q) {
    return p.x() < q.x() || (p.x() == q.x() && p.y() < q.y());
  });
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& p, const Eigen::Vector2d& q) {
    return (p.x() - o.x()) * (q.y() - o.y()) - (p.y() - o.y()) * (q.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 1e-15) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 1e-15) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k > 0 ? k - 1 : 0);
  if (hull.size() < 3) throw EmptyPolytope("from_points_2d: hull is degenerate");
  Mat a(static_cast<Eigen::Index>(hull.size()), 2);
  Vec b(static_cast<Eigen::Index>(hull.size()));
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Eigen::Vector2d e = hull[(i + 1) % hull.size()] - hull[i];
    const Eigen::Vector2d n = Eigen::Vector2d(e.y(), -e.x()).normalized();
    a.row(static_cast<Eigen::Index>(i)) = n.transpose();
    b[static_cast<Eigen::Index>(i)] = n.dot(hull[i]);
  }
  return Polytope(std::move(a), std::move(b));
}

Polytope Polytope::extrude(const Polytope& polygon, double z_lo, double z_hi) {
  if (polygon.dim() != 2) throw DimensionMismatch("extrude: polygon must be 2-D");
  const Eigen::Index m = polygon.num_facets();
  Mat a = Mat::Zero(m + 2, 3);
  Vec b(m + 2);
  a.topLeftCorner(m, 2) = polygon.a();
  b.head(m) = polygon.b();
  a(m, 2) = 1.0;
  b[m] = z_hi;
  a(m + 1, 2) = -1.0;
  b[m + 1] = -z_lo;
  return Polytope(std::move(a), std::move(b));
}

Vec Polytope::centroid() const {
  Vec c = Vec::Zero(dim());
  for (const auto& v : vertices_) c += v;
  return c / static_cast<double>(vertices_.size());
}

bool Polytope::contains(const Vec& point, double tol) const {
  return ((a_ * point - b_).array() <= tol).all();
}

Polytope Polytope::transformed(const Mat& rotation, const Vec& translation) const {
  Mat a = a_ * rotation.transpose();
  Vec b = b_ + a * translation;
  std::vector<Vec> verts;
  verts.reserve(vertices_.size());
  for (const auto& v : vertices_) verts.push_back(rotation * v + translation);
  return Polytope(std::move(a), std::move(b), std::move(verts));
}

Polytope Polytope::translated(const Vec& t) const {
  return transformed(Mat::Identity(dim(), dim()), t);
}

Polytope Polytope::scaled(double factor) const {
  std::vector<Vec> verts;
  verts.reserve(vertices_.size());
  for (const auto& v : vertices_) verts.push_back(factor * v);
  return Polytope(a_, factor * b_, std::move(verts));
}

}  // namespace impc::geometry
