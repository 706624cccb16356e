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

#include <array>
#include <cstdint>
#include <vector>

#include "impc/common.hpp"
#include "impc/dynamics/model.hpp"
#include "impc/geometry/polytope.hpp"

namespace impc::planner {

using Cell = std::array<int, 3>;  // unused trailing entries are 0

/// Occupancy grid over an axis-aligned region in 2-D or 3-D. Cell i along an
/// axis covers [lo + i*res, lo + (i+1)*res) and has its center half a cell in.
class GridMap {
 public:
  GridMap(Vec lo, Vec hi, double resolution);

  /// Marks every cell whose center lies within `inflation` of an obstacle.
  /// Distances are exact for boxes and 2-D polygons; other 3-D polytopes use
  /// the largest facet violation, which over-inflates near edges.
  static GridMap rasterize(const std::vector<geometry::Polytope>& obstacles, const Vec& lo, const Vec& hi,
                           double resolution, double inflation);

  [[nodiscard]] int dim() const { return static_cast<int>(lo_.size()); }
  [[nodiscard]] double resolution() const { return res_; }
  [[nodiscard]] const Cell& size() const { return size_; }
  [[nodiscard]] std::size_t num_cells() const { return occ_.size(); }
  [[nodiscard]] const Vec& lo() const { return lo_; }
  [[nodiscard]] const Vec& hi() const { return hi_; }

  [[nodiscard]] bool in_bounds(const Cell& c) const;
  [[nodiscard]] bool occupied(const Cell& c) const { return occ_[index(c)] != 0; }
  void set_occupied(const Cell& c, bool value = true) { occ_[index(c)] = value ? 1 : 0; }

  [[nodiscard]] std::size_t index(const Cell& c) const;
  [[nodiscard]] Cell cell_of_index(std::size_t i) const;
  /// Cell containing a world point; throws std::out_of_range outside the grid.
  [[nodiscard]] Cell cell_of(const Vec& point) const;
  [[nodiscard]] Vec center(const Cell& c) const;

 private:
  Vec lo_, hi_;
  double res_;
  Cell size_{1, 1, 1};
  std::vector<std::uint8_t> occ_;
};

/// Euclidean distance from a point to a polytope as used by rasterize().
double point_distance(const geometry::Polytope& poly, const Vec& point);

struct GridPath {
  std::vector<Cell> cells;
  /// Move counts by type: axis steps, 2-axis diagonals, 3-axis diagonals.
  std::array<int, 3> moves{0, 0, 0};

  /// Path length in cell units, summed from the move counts so equal paths
  /// give bit-identical costs.
  [[nodiscard]] double cost() const;
};

/// Minimal-cost path between two free cells (8-connected in 2-D, 26 in 3-D)
/// with the octile heuristic. Throws NoPath when the goal is unreachable and
/// std::invalid_argument when either endpoint is occupied or outside.
GridPath astar(const GridMap& grid, const Cell& start, const Cell& goal);

struct ReferencePath {
  std::vector<Vec> waypoints;
  std::vector<double> arc_length;  // cumulative, same length as waypoints

  [[nodiscard]] double length() const { return arc_length.empty() ? 0.0 : arc_length.back(); }
  /// Point at arc length s, clamped to the path.
  [[nodiscard]] Vec point_at(double s) const;
  /// Arc length of the closest point to `point` among segments whose start
  /// lies in [s_from, s_to].
  [[nodiscard]] double project(const Vec& point, double s_from, double s_to) const;
};

ReferencePath make_path(std::vector<Vec> waypoints);

/// Free cell closest to a world point (its own cell when free). Throws NoPath
/// when nothing free lies nearby.
Cell nearest_free(const GridMap& grid, const Vec& point);

/// World-coordinate A*. The start and goal points are snapped to their
/// nearest free cells; the returned waypoints begin at `start` and end at
/// `goal` exactly.
ReferencePath astar(const GridMap& grid, const Vec& start, const Vec& goal);

struct LocalReference {
  std::vector<Vec> states;  // N + 1 reference states
  double progress = 0.0;    // arc length of the projection of the current position
};

/// Projects the current position onto the path (never behind `progress_hint`,
/// searching at most `lookahead` metres ahead) and samples N + 1 points spaced
/// ref_speed * dt apart. Headings follow a chord of the path, unwrapped around
/// the current orientation; samples clamped at the path end carry zero speed.
LocalReference local_reference(const ReferencePath& path, const dynamics::Model& model, const Vec& state,
                               double ref_speed, int horizon, double dt, double progress_hint = 0.0,
                               double lookahead = 0.3);

}  // namespace impc::planner
