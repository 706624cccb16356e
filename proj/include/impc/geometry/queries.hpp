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

#pragma once

#include <cmath>
#include <vector>

#include "impc/geometry/polytope.hpp"

namespace impc::geometry {

/// Robot geometry as a union of body-frame convex pieces. The body frame's
/// origin is the robot's reference point.
struct RobotShape {
  std::vector<Polytope> pieces;

  [[nodiscard]] int dim() const { return pieces.empty() ? 0 : pieces.front().dim(); }
  /// Largest distance from the reference point to any vertex.
  [[nodiscard]] double circumscribed_radius() const;
  [[nodiscard]] RobotShape scaled(double factor) const;
};

/// Position (2 or 3 entries) and orientation (heading in 2-D; yaw, pitch in 3-D).
struct Pose {
  Vec position;
  Vec orientation;
};

/// 2-D: planar rotation by theta. 3-D: Rz(yaw) * Ry(-pitch), which maps the
/// body x-axis to (cos(pitch)cos(yaw), cos(pitch)sin(yaw), sin(pitch)).
Mat rotation(const Vec& orientation);

/// Partial derivatives of rotation() with respect to each orientation entry.
std::vector<Mat> rotation_derivatives(const Vec& orientation);

std::vector<Polytope> pose_to_world(const RobotShape& shape, const Pose& pose);

/// Indices of obstacles with at least one point inside the axis-aligned box of
/// half-width sensing_radius centered at position.
std::vector<int> detect_active_obstacles(const std::vector<Polytope>& obstacles,
                                         const Vec& position, double sensing_radius);

/// Box-polytope intersection test behind detect_active_obstacles.
bool intersects_box(const Polytope& poly, const Vec& center, double half_width);

struct ClosestPointPair {
  Vec point_on_obstacle;
  Vec point_on_robot;
  double squared_distance = 0.0;
  int obstacle_index = -1;
  int piece_index = -1;

  [[nodiscard]] double distance() const { return std::sqrt(squared_distance); }
};

/// Minimum-distance pair between two polytopes, from the 2*dim-variable QP.
/// Throws SolverFailure if the QP does not reach optimality.
ClosestPointPair closest_points(const Polytope& obstacle, const Polytope& robot_piece_world);

inline constexpr double kDegenerateDistance = 1e-6;

struct Hyperplane {
  Vec normal;  // unit, points from obstacle toward robot
  Vec anchor;  // obstacle-side closest point
  double margin = 0.0;
};

/// Separating hyperplane through the obstacle-side closest point.
/// Throws DegenerateContact when the pair is closer than kDegenerateDistance.
Hyperplane supporting_hyperplane(const ClosestPointPair& pair, double margin = 0.0);

/// Robot-side point as an affine function of the pose, linearized in the
/// orientation around a nominal pose:
///   c(p, theta) = p + base + jacobian * (theta - nominal_orientation)
struct AffinePointMap {
  Vec base;                 // R(theta_nom) * c_local
  Mat orientation_jacobian;  // dim x orientation entries
  Vec nominal_orientation;
  Vec local_point;          // c_local, body frame

  [[nodiscard]] Vec evaluate(const Vec& position, const Vec& orientation) const;
};

AffinePointMap linearize_robot_point(const Vec& robot_point, const Pose& nominal_pose);
AffinePointMap linearize_robot_point(const ClosestPointPair& pair, const Pose& nominal_pose);

/// Euclidean distance for disjoint polytopes, minus the penetration depth
/// (separating-axis) when they overlap.
double signed_distance(const Polytope& a, const Polytope& b);

/// Minimum signed distance between any two pieces of two unions.
double min_signed_distance(const std::vector<Polytope>& a, const std::vector<Polytope>& b);

}  // namespace impc::geometry
