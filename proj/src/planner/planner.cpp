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

#include "impc/planner/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace impc::planner {

GridMap::GridMap(Vec lo, Vec hi, double resolution) : lo_(std::move(lo)), hi_(std::move(hi)), res_(resolution) {
  if (lo_.size() != hi_.size() || (lo_.size() != 2 && lo_.size() != 3)) {
    throw DimensionMismatch("GridMap: bounds must be 2-D or 3-D and agree");
  }
  if (!(res_ > 0.0)) throw std::invalid_argument("GridMap: resolution must be positive");
  std::size_t total = 1;
  for (int i = 0; i < dim(); ++i) {
    const double extent = hi_[i] - lo_[i];
    if (!(extent > 0.0)) throw std::invalid_argument("GridMap: empty region");
    size_[static_cast<std::size_t>(i)] = std::max(1, static_cast<int>(std::ceil(extent / res_ - 1e-9)));
    total *= static_cast<std::size_t>(size_[static_cast<std::size_t>(i)]);
  }
  occ_.assign(total, 0);
}

bool GridMap::in_bounds(const Cell& c) const {
  for (int i = 0; i < 3; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (i < dim() ? (c[u] < 0 || c[u] >= size_[u]) : c[u] != 0) return false;
  }
  return true;
}

std::size_t GridMap::index(const Cell& c) const {
  return (static_cast<std::size_t>(c[2]) * static_cast<std::size_t>(size_[1]) + static_cast<std::size_t>(c[1])) *
             static_cast<std::size_t>(size_[0]) +
         static_cast<std::size_t>(c[0]);
}

Cell GridMap::cell_of_index(std::size_t i) const {
  Cell c{0, 0, 0};
  c[0] = static_cast<int>(i % static_cast<std::size_t>(size_[0]));
  i /= static_cast<std::size_t>(size_[0]);
  c[1] = static_cast<int>(i % static_cast<std::size_t>(size_[1]));
  c[2] = static_cast<int>(i / static_cast<std::size_t>(size_[1]));
  return c;
}

Cell GridMap::cell_of(const Vec& point) const {
  if (point.size() != dim()) throw DimensionMismatch("GridMap::cell_of: point dimension");
  Cell c{0, 0, 0};
  for (int i = 0; i < dim(); ++i) {
    const auto u = static_cast<std::size_t>(i);
    c[u] = static_cast<int>(std::floor((point[i] - lo_[i]) / res_));
    if (c[u] == size_[u] && point[i] <= hi_[i]) c[u] = size_[u] - 1;
  }
  if (!in_bounds(c)) throw std::out_of_range("GridMap::cell_of: point outside the grid");
  return c;
}

Vec GridMap::center(const Cell& c) const {
  Vec p(dim());
  for (int i = 0; i < dim(); ++i) p[i] = lo_[i] + (c[static_cast<std::size_t>(i)] + 0.5) * res_;
  return p;
}

double point_distance(const geometry::Polytope& poly, const Vec& point) {
  const Vec viol = poly.a() * point - poly.b();
  if ((viol.array() <= 0.0).all()) return 0.0;
  if (poly.is_axis_aligned_box()) {
    const Vec clamped = point.cwiseMax(poly.aabb_lo()).cwiseMin(poly.aabb_hi());
    return (point - clamped).norm();
  }
  if (poly.dim() == 2) {
    // Sort vertices around the centroid and take the nearest edge.
    const Vec c = poly.centroid();
    std::vector<Vec> v = poly.vertices();
    std::sort(v.begin(), v.end(), [&](const Vec& a, const Vec& b) {
      return std::atan2(a[1] - c[1], a[0] - c[0]) < std::atan2(b[1] - c[1], b[0] - c[0]);
    });
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec& a = v[i];
      const Vec& b = v[(i + 1) % v.size()];
      const Vec ab = b - a;
      const double t = std::clamp((point - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
      best = std::min(best, (a + t * ab - point).norm());
    }
    return best;
  }
  return viol.maxCoeff();
}

GridMap GridMap::rasterize(const std::vector<geometry::Polytope>& obstacles, const Vec& lo, const Vec& hi,
                           double resolution, double inflation) {
  GridMap grid(lo, hi, resolution);
  const int d = grid.dim();
  for (const auto& obs : obstacles) {
    if (obs.dim() != d) throw DimensionMismatch("rasterize: obstacle dimension");
    Cell from{0, 0, 0}, to{0, 0, 0};
    for (int i = 0; i < d; ++i) {
      const auto u = static_cast<std::size_t>(i);
      from[u] = std::max(0, static_cast<int>(std::floor((obs.aabb_lo()[i] - inflation - lo[i]) / resolution)) - 1);
      to[u] = std::min(grid.size_[u] - 1,
                       static_cast<int>(std::ceil((obs.aabb_hi()[i] + inflation - lo[i]) / resolution)) + 1);
    }
    Cell c{0, 0, 0};
    for (c[2] = from[2]; c[2] <= to[2]; ++c[2]) {
      for (c[1] = from[1]; c[1] <= to[1]; ++c[1]) {
        for (c[0] = from[0]; c[0] <= to[0]; ++c[0]) {
          const std::size_t idx = grid.index(c);
          if (grid.occ_[idx] != 0) continue;
          if (point_distance(obs, grid.center(c)) <= inflation) grid.occ_[idx] = 1;
        }
      }
    }
  }
  return grid;
}

double GridPath::cost() const {
  return static_cast<double>(moves[0]) + static_cast<double>(moves[1]) * std::sqrt(2.0) +
         static_cast<double>(moves[2]) * std::sqrt(3.0);
}

namespace {

double octile(const Cell& a, const Cell& b) {
  std::array<double, 3> d{std::abs(a[0] - b[0]) * 1.0, std::abs(a[1] - b[1]) * 1.0, std::abs(a[2] - b[2]) * 1.0};
  std::sort(d.begin(), d.end(), std::greater<>());
  return d[0] + (std::sqrt(2.0) - 1.0) * d[1] + (std::sqrt(3.0) - std::sqrt(2.0)) * d[2];
}

}  // namespace

GridPath astar(const GridMap& grid, const Cell& start, const Cell& goal) {
  if (!grid.in_bounds(start) || !grid.in_bounds(goal)) throw std::invalid_argument("astar: endpoint outside grid");
  if (grid.occupied(start) || grid.occupied(goal)) throw std::invalid_argument("astar: endpoint is occupied");
  const std::size_t n = grid.num_cells();
  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);
  struct Node {
    double f;
    std::uint64_t order;
    std::size_t idx;
    bool operator>(const Node& o) const { return f != o.f ? f > o.f : order > o.order; }
  };
  std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
  std::uint64_t counter = 0;
  const std::size_t s = grid.index(start);
  const std::size_t t = grid.index(goal);
  g[s] = 0.0;
  open.push({octile(start, goal), counter++, s});

  std::vector<Cell> offsets;
  const int dz = grid.dim() == 3 ? 1 : 0;
  for (int z = -dz; z <= dz; ++z) {
    for (int y = -1; y <= 1; ++y) {
      for (int x = -1; x <= 1; ++x) {
        if (x != 0 || y != 0 || z != 0) offsets.push_back({x, y, z});
      }
    }
  }
  while (!open.empty()) {
    const Node cur = open.top();
    open.pop();
    if (closed[cur.idx] != 0) continue;
    closed[cur.idx] = 1;
    if (cur.idx == t) break;
    const Cell c = grid.cell_of_index(cur.idx);
    for (const auto& off : offsets) {
      const Cell nb{c[0] + off[0], c[1] + off[1], c[2] + off[2]};
      if (!grid.in_bounds(nb) || grid.occupied(nb)) continue;
      const std::size_t ni = grid.index(nb);
      if (closed[ni] != 0) continue;
      const int axes = std::abs(off[0]) + std::abs(off[1]) + std::abs(off[2]);
      const double step = axes == 1 ? 1.0 : (axes == 2 ? std::sqrt(2.0) : std::sqrt(3.0));
      const double cand = g[cur.idx] + step;
      if (cand < g[ni]) {
        g[ni] = cand;
        parent[ni] = static_cast<std::int64_t>(cur.idx);
        open.push({cand + octile(nb, goal), counter++, ni});
      }
    }
  }
  if (closed[t] == 0) throw NoPath("astar: goal unreachable");
  GridPath path;
  for (std::int64_t i = static_cast<std::int64_t>(t); i >= 0; i = parent[static_cast<std::size_t>(i)]) {
    path.cells.push_back(grid.cell_of_index(static_cast<std::size_t>(i)));
  }
  std::reverse(path.cells.begin(), path.cells.end());
  for (std::size_t i = 1; i < path.cells.size(); ++i) {
    int axes = 0;
    for (int a = 0; a < 3; ++a) axes += path.cells[i][static_cast<std::size_t>(a)] != path.cells[i - 1][static_cast<std::size_t>(a)];
    ++path.moves[static_cast<std::size_t>(axes - 1)];
  }
  return path;
}

ReferencePath make_path(std::vector<Vec> waypoints) {
  if (waypoints.empty()) throw std::invalid_argument("make_path: no waypoints");
  ReferencePath p;
  p.arc_length.push_back(0.0);
  p.waypoints.push_back(waypoints.front());
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const double step = (waypoints[i] - p.waypoints.back()).norm();
    if (step < 1e-12) continue;
    p.arc_length.push_back(p.arc_length.back() + step);
    p.waypoints.push_back(waypoints[i]);
  }
  return p;
}

Vec ReferencePath::point_at(double s) const {
  if (waypoints.size() == 1 || s <= 0.0) return waypoints.front();
  if (s >= length()) return waypoints.back();
  const auto it = std::upper_bound(arc_length.begin(), arc_length.end(), s);
  const auto i = static_cast<std::size_t>(it - arc_length.begin());
  const double t = (s - arc_length[i - 1]) / (arc_length[i] - arc_length[i - 1]);
  return waypoints[i - 1] + t * (waypoints[i] - waypoints[i - 1]);
}

double ReferencePath::project(const Vec& point, double s_from, double s_to) const {
  if (waypoints.size() == 1) return 0.0;
  double best_d = std::numeric_limits<double>::infinity();
  double best_s = std::clamp(s_from, 0.0, length());
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    if (arc_length[i + 1] < s_from) continue;
    if (arc_length[i] > s_to) break;
    const Vec ab = waypoints[i + 1] - waypoints[i];
    const double t = std::clamp((point - waypoints[i]).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    const double d = (waypoints[i] + t * ab - point).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best_s = arc_length[i] + t * (arc_length[i + 1] - arc_length[i]);
    }
  }
  return std::max(best_s, s_from);
}

Cell nearest_free(const GridMap& grid, const Vec& point) {
  const Cell c = grid.cell_of(point);
  if (!grid.occupied(c)) return c;
  // Expanding shells around the cell; the closest free center wins.
  const int dz = grid.dim() == 3 ? 1 : 0;
  for (int radius = 1; radius < 64; ++radius) {
    double best = std::numeric_limits<double>::infinity();
    Cell best_cell = c;
    for (int z = -radius * dz; z <= radius * dz; ++z) {
      for (int y = -radius; y <= radius; ++y) {
        for (int x = -radius; x <= radius; ++x) {
          if (std::max({std::abs(x), std::abs(y), std::abs(z)}) != radius) continue;
          const Cell n{c[0] + x, c[1] + y, c[2] + z};
          if (!grid.in_bounds(n) || grid.occupied(n)) continue;
          const double d = (grid.center(n) - point).squaredNorm();
          if (d < best) {
            best = d;
            best_cell = n;
          }
        }
      }
    }
    if (std::isfinite(best)) return best_cell;
  }
  throw NoPath("astar: no free cell near the endpoint");
}

ReferencePath astar(const GridMap& grid, const Vec& start, const Vec& goal) {
  const GridPath cells = astar(grid, nearest_free(grid, start), nearest_free(grid, goal));
  std::vector<Vec> pts;
  pts.push_back(start);
  for (std::size_t i = 1; i + 1 < cells.cells.size(); ++i) pts.push_back(grid.center(cells.cells[i]));
  pts.push_back(goal);
  return make_path(std::move(pts));
}

namespace {

double unwrap_near(double angle, double target) {
  return angle + 2.0 * M_PI * std::round((target - angle) / (2.0 * M_PI));
}

}  // namespace

LocalReference local_reference(const ReferencePath& path, const dynamics::Model& model, const Vec& state,
                               double ref_speed, int horizon, double dt, double progress_hint, double lookahead) {
  if (path.waypoints.empty()) throw std::invalid_argument("local_reference: empty path");
  if (horizon < 1) throw std::invalid_argument("local_reference: horizon must be >= 1");
  const int l = model.workspace_dim();
  const Vec pos = model.position(state);
  const Vec orient = model.orientation(state);
  LocalReference out;
  out.progress = path.project(pos, progress_hint, progress_hint + lookahead);
  const double total = path.length();
  const double spacing = ref_speed * dt;
  // Chord half-length for tangents; smooths the 45-degree grid staircase.
  const double chord = 0.03;
  Vec prev_orient = orient;
  for (int k = 0; k <= horizon; ++k) {
    const double raw = out.progress + k * spacing;
    const double s = std::min(raw, total);
    const Vec p = path.point_at(s);
    Vec dir = path.point_at(std::min(s + chord, total)) - path.point_at(std::max(s - chord, 0.0));
    Vec o = prev_orient;
    if (dir.norm() > 1e-9) {
      if (l == 2) {
        o[0] = unwrap_near(std::atan2(dir[1], dir[0]), prev_orient[0]);
      } else {
        o[0] = unwrap_near(std::atan2(dir[1], dir[0]), prev_orient[0]);
        o[1] = std::atan2(dir[2], std::hypot(dir[0], dir[1]));
      }
    }
    prev_orient = o;
    const double v = (raw >= total - 1e-12) ? 0.0 : ref_speed;
    out.states.push_back(model.compose_state(p, o, v));
  }
  return out;
}

}  // namespace impc::planner
