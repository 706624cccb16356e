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

#include <stdexcept>

#include "impc/scenario/scenario.hpp"

namespace impc::scenario {

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

geometry::Polytope l_leg_horizontal() { return geometry::Polytope::box(v2(-0.08, -0.08), v2(0.09, 0.0)); }
geometry::Polytope l_leg_vertical() { return geometry::Polytope::box(v2(-0.08, 0.0), v2(0.0, 0.09)); }

}  // namespace

std::vector<std::string> builtin_shape_names() { return {"rectangle", "triangle", "l_shape", "l_shape_3d"}; }

geometry::RobotShape builtin_shape(const std::string& name) {
  geometry::RobotShape s;
  if (name == "rectangle") {
    // 0.15 x 0.06, reference point on the centerline 0.025 from the rear edge.
    s.pieces.push_back(geometry::Polytope::box(v2(-0.025, -0.03), v2(0.125, 0.03)));
  } else if (name == "triangle") {
    // Forward length 0.13, rear width 0.075, reference at the centroid.
    s.pieces.push_back(geometry::Polytope::from_points_2d(
        {Eigen::Vector2d(0.0867, 0.0), Eigen::Vector2d(-0.0433, 0.0375), Eigen::Vector2d(-0.0433, -0.0375)}));
  } else if (name == "l_shape") {
    // Legs 0.17 long and 0.08 thick, reference at the inner corner.
    s.pieces.push_back(l_leg_horizontal());
    s.pieces.push_back(l_leg_vertical());
  } else if (name == "l_shape_3d") {
    // Planar L extruded to +-0.03, reference at the centroid of the L.
    const auto a = l_leg_horizontal();
    const auto b = l_leg_vertical();
    const double area_a = 0.17 * 0.08;
    const double area_b = 0.08 * 0.09;
    const Vec ca = v2(0.005, -0.04);
    const Vec cb = v2(-0.04, 0.045);
    const Vec c2 = (area_a * ca + area_b * cb) / (area_a + area_b);
    Vec shift(3);
    shift << -c2[0], -c2[1], 0.0;
    s.pieces.push_back(geometry::Polytope::extrude(a, -0.03, 0.03).translated(shift));
    s.pieces.push_back(geometry::Polytope::extrude(b, -0.03, 0.03).translated(shift));
  } else {
    throw std::invalid_argument("unknown shape '" + name + "'");
  }
  return s;
}

}  // namespace impc::scenario
