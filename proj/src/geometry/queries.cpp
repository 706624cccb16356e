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

#include "impc/geometry/queries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "impc/qp/qp.hpp"

namespace impc::geometry {

double RobotShape::circumscribed_radius() const {
  double r = 0.0;
  for (const auto& piece : pieces) {
    for (const auto& v : piece.vertices()) r = std::max(r, v.norm());
  }
  return r;
}

RobotShape RobotShape::scaled(double factor) const {
  RobotShape out;
  for (const auto& piece : pieces) out.pieces.push_back(piece.scaled(factor));
  return out;
}

Mat rotation(const Vec& orientation) {
  if (orientation.size() == 1) {
    const double c = std::cos(orientation[0]);
    const double s = std::sin(orientation[0]);
    Mat r(2, 2);
    r << c, -s, s, c;
    return r;
  }
  if (orientation.size() == 2) {
    const double c1 = std::cos(orientation[0]), s1 = std::sin(orientation[0]);
    const double c2 = std::cos(orientation[1]), s2 = std::sin(orientation[1]);
    Mat rz(3, 3), ry(3, 3);
    rz << c1, -s1, 0, s1, c1, 0, 0, 0, 1;
    ry << c2, 0, -s2, 0, 1, 0, s2, 0, c2;
    return rz * ry;
  }
  throw DimensionMismatch("rotation: orientation must have 1 (2-D) or 2 (3-D) entries");
}

std::vector<Mat> rotation_derivatives(const Vec& orientation) {
  if (orientation.size() == 1) {
    const double c = std::cos(orientation[0]);
    const double s = std::sin(orientation[0]);
    Mat d(2, 2);
    d << -s, -c, c, -s;
    return {d};
  }
  if (orientation.size() == 2) {
    const double c1 = std::cos(orientation[0]), s1 = std::sin(orientation[0]);
    const double c2 = std::cos(orientation[1]), s2 = std::sin(orientation[1]);
    Mat rz(3, 3), drz(3, 3), ry(3, 3), dry(3, 3);
    rz << c1, -s1, 0, s1, c1, 0, 0, 0, 1;
    drz << -s1, -c1, 0, c1, -s1, 0, 0, 0, 0;
    ry << c2, 0, -s2, 0, 1, 0, s2, 0, c2;
    dry << -s2, 0, -c2, 0, 0, 0, c2, 0, -s2;
    return {drz * ry, rz * dry};
  }
  throw DimensionMismatch("rotation_derivatives: orientation must have 1 or 2 entries");
}

std::vector<Polytope> pose_to_world(const RobotShape& shape, const Pose& pose) {
  const Mat r = rotation(pose.orientation);
  if (pose.position.size() != r.rows()) throw DimensionMismatch("pose_to_world: position size");
  std::vector<Polytope> out;
  out.reserve(shape.pieces.size());
  for (const auto& piece : shape.pieces) {
    if (piece.dim() != r.rows()) throw DimensionMismatch("pose_to_world: piece dimension");
    out.push_back(piece.transformed(r, pose.position));
  }
  return out;
}

bool intersects_box(const Polytope& poly, const Vec& center, double half_width) {
  const int d = poly.dim();
  for (int i = 0; i < d; ++i) {
    if (poly.aabb_hi()[i] < center[i] - half_width || poly.aabb_lo()[i] > center[i] + half_width) {
      return false;
    }
  }
  if (poly.is_axis_aligned_box()) return true;
  // Feasibility of {A c <= b} intersected with the box.
  const Eigen::Index m = poly.num_facets();
  Mat a(m + d, d);
  a.topRows(m) = poly.a();
  a.bottomRows(d) = Mat::Identity(d, d);
  Vec lo(m + d), hi(m + d);
  lo.head(m).setConstant(-qp::kInf);
  hi.head(m) = poly.b() - poly.a() * center;
  lo.tail(d).setConstant(-half_width);
  hi.tail(d).setConstant(half_width);
  const qp::QpProblem prob(2.0 * Mat::Identity(d, d), Vec::Zero(d), a, lo, hi);
  return qp::solve(prob).status == qp::QpStatus::Optimal;
}

std::vector<int> detect_active_obstacles(const std::vector<Polytope>& obstacles,
                                         const Vec& position, double sensing_radius) {
  if (!(sensing_radius > 0.0)) throw std::invalid_argument("sensing radius must be positive");
  std::vector<int> out;
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    if (intersects_box(obstacles[i], position, sensing_radius)) out.push_back(static_cast<int>(i));
  }
  return out;
}

ClosestPointPair closest_points(const Polytope& obstacle, const Polytope& robot_piece_world) {
  const int d = obstacle.dim();
  if (robot_piece_world.dim() != d) throw DimensionMismatch("closest_points: dimension mismatch");
  // Work in coordinates centered between the two sets; the Hessian
  // regularization then pulls toward a neutral point.
  const Vec center = 0.5 * (obstacle.centroid() + robot_piece_world.centroid());
  const Eigen::Index mo = obstacle.num_facets();
  const Eigen::Index mr = robot_piece_world.num_facets();
  Mat p = Mat::Zero(2 * d, 2 * d);
  p.topLeftCorner(d, d) = 2.0 * Mat::Identity(d, d);
  p.bottomRightCorner(d, d) = 2.0 * Mat::Identity(d, d);
  p.topRightCorner(d, d) = -2.0 * Mat::Identity(d, d);
  p.bottomLeftCorner(d, d) = -2.0 * Mat::Identity(d, d);
  Mat a = Mat::Zero(mo + mr, 2 * d);
  a.topLeftCorner(mo, d) = obstacle.a();
  a.bottomRightCorner(mr, d) = robot_piece_world.a();
  Vec hi(mo + mr);
  hi.head(mo) = obstacle.b() - obstacle.a() * center;
  hi.tail(mr) = robot_piece_world.b() - robot_piece_world.a() * center;
  const Vec lo = Vec::Constant(mo + mr, -qp::kInf);
  const qp::QpProblem prob(std::move(p), Vec::Zero(2 * d), std::move(a), lo, hi);
  const auto sol = qp::solve(prob);
  if (!sol.optimal()) {
    throw SolverFailure(std::string("closest_points: QP ended with status ") +
                        std::string(qp::to_string(sol.status)));
  }
  ClosestPointPair pair;
  pair.point_on_obstacle = sol.primal.head(d) + center;
  pair.point_on_robot = sol.primal.tail(d) + center;
  pair.squared_distance = (pair.point_on_obstacle - pair.point_on_robot).squaredNorm();
  return pair;
}

Hyperplane supporting_hyperplane(const ClosestPointPair& pair, double margin) {
  const Vec diff = pair.point_on_robot - pair.point_on_obstacle;
  const double dist = diff.norm();
  if (dist < kDegenerateDistance) {
    throw DegenerateContact("supporting_hyperplane: closest points coincide (distance " +
                            std::to_string(dist) + ")");
  }
  return Hyperplane{diff / dist, pair.point_on_obstacle, margin};
}

Vec AffinePointMap::evaluate(const Vec& position, const Vec& orientation) const {
  return position + base + orientation_jacobian * (orientation - nominal_orientation);
}

AffinePointMap linearize_robot_point(const Vec& robot_point, const Pose& nominal_pose) {
  const Mat r = rotation(nominal_pose.orientation);
  const auto dr = rotation_derivatives(nominal_pose.orientation);
  AffinePointMap map;
  map.local_point = r.transpose() * (robot_point - nominal_pose.position);
  map.base = r * map.local_point;
  map.nominal_orientation = nominal_pose.orientation;
  map.orientation_jacobian.resize(r.rows(), static_cast<Eigen::Index>(dr.size()));
  for (std::size_t i = 0; i < dr.size(); ++i) {
    map.orientation_jacobian.col(static_cast<Eigen::Index>(i)) = dr[i] * map.local_point;
  }
  return map;
}

AffinePointMap linearize_robot_point(const ClosestPointPair& pair, const Pose& nominal_pose) {
  return linearize_robot_point(pair.point_on_robot, nominal_pose);
}

namespace {

void projection_range(const Polytope& p, const Vec& axis, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (const auto& v : p.vertices()) {
    const double s = axis.dot(v);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
}

std::vector<Vec> candidate_axes(const Polytope& a, const Polytope& b) {
  std::vector<Vec> axes;
  for (Eigen::Index i = 0; i < a.num_facets(); ++i) axes.push_back(a.a().row(i).transpose());
  for (Eigen::Index i = 0; i < b.num_facets(); ++i) axes.push_back(b.a().row(i).transpose());
  if (a.dim() == 3) {
    // Edge directions lie along cross products of facet-normal pairs.
    auto edge_dirs = [](const Polytope& p) {
      std::vector<Eigen::Vector3d> dirs;
      for (Eigen::Index i = 0; i < p.num_facets(); ++i) {
        for (Eigen::Index j = i + 1; j < p.num_facets(); ++j) {
          const Eigen::Vector3d e =
              Eigen::Vector3d(p.a().row(i).transpose()).cross(Eigen::Vector3d(p.a().row(j).transpose()));
          if (e.norm() > 1e-9) dirs.push_back(e.normalized());
        }
      }
      return dirs;
    };
    const auto ea = edge_dirs(a);
    const auto eb = edge_dirs(b);
    for (const auto& u : ea) {
      for (const auto& w : eb) {
        const Eigen::Vector3d c = u.cross(w);
        if (c.norm() > 1e-9) axes.push_back(Vec(c.normalized()));
      }
    }
  }
  return axes;
}

}  // namespace

double signed_distance(const Polytope& a, const Polytope& b) {
  const auto pair = closest_points(a, b);
  if (pair.squared_distance > 1e-14) return std::sqrt(pair.squared_distance);
  double depth = std::numeric_limits<double>::infinity();
  for (const auto& axis : candidate_axes(a, b)) {
    double alo, ahi, blo, bhi;
    projection_range(a, axis, alo, ahi);
    projection_range(b, axis, blo, bhi);
    depth = std::min(depth, std::min(ahi - blo, bhi - alo));
  }
  return -std::max(depth, 0.0);
}

double min_signed_distance(const std::vector<Polytope>& a, const std::vector<Polytope>& b) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& pa : a) {
    for (const auto& pb : b) best = std::min(best, signed_distance(pa, pb));
  }
  return best;
}

}  // namespace impc::geometry
