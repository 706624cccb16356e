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

#include <vector>

#include "impc/common.hpp"

namespace impc::geometry {

/// Bounded, non-empty convex polytope {c : A c <= b} in 2-D or 3-D.
/// Rows of A are normalized to unit length at construction and the vertex
/// set is cached.
class Polytope {
 public:
  Polytope() = default;

  /// Throws DimensionMismatch, UnboundedPolytope or EmptyPolytope.
  Polytope(Mat a, Vec b);

  static Polytope box(const Vec& lo, const Vec& hi);

  /// Convex hull of a planar point set (counter-clockwise facets).
  static Polytope from_points_2d(const std::vector<Eigen::Vector2d>& points);

  /// Right prism: a 2-D polygon extruded over z in [z_lo, z_hi].
  static Polytope extrude(const Polytope& polygon, double z_lo, double z_hi);

  [[nodiscard]] int dim() const { return static_cast<int>(a_.cols()); }
  [[nodiscard]] Eigen::Index num_facets() const { return a_.rows(); }
  [[nodiscard]] const Mat& a() const { return a_; }
  [[nodiscard]] const Vec& b() const { return b_; }
  [[nodiscard]] const std::vector<Vec>& vertices() const { return vertices_; }
  [[nodiscard]] const Vec& aabb_lo() const { return lo_; }
  [[nodiscard]] const Vec& aabb_hi() const { return hi_; }
  [[nodiscard]] bool is_axis_aligned_box() const { return axis_box_; }
  [[nodiscard]] Vec centroid() const;

  [[nodiscard]] bool contains(const Vec& point, double tol = 1e-9) const;

  /// {R c + t : c in this}. Vertices are mapped directly, not re-enumerated.
  [[nodiscard]] Polytope transformed(const Mat& rotation, const Vec& translation) const;
  [[nodiscard]] Polytope translated(const Vec& t) const;
  [[nodiscard]] Polytope scaled(double factor) const;

 private:
  Polytope(Mat a, Vec b, std::vector<Vec> vertices);
  void finalize();

  Mat a_;
  Vec b_;
  std::vector<Vec> vertices_;
  Vec lo_;
  Vec hi_;
  bool axis_box_ = false;
};

/// Brute-force vertex enumeration over all dim-subsets of facets, filtered by
/// feasibility and deduplicated within 1e-9.
/// Throws UnboundedPolytope or EmptyPolytope.
std::vector<Vec> enumerate_vertices(const Mat& a, const Vec& b);

/// True when some nonzero direction d satisfies A d <= 0.
bool has_recession_direction(const Mat& a);

}  // namespace impc::geometry
