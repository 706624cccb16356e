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

#include <cmath>
#include <queue>
#include <random>

#include <gtest/gtest.h>

#include "support/grid_oracle.hpp"

#include "impc/planner/planner.hpp"

namespace impc::planner {
namespace {

using geometry::Polytope;

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) out[i++] = e;
  return out;
}

GridMap empty_grid(int n, int dim = 2) {
  return dim == 2 ? GridMap(vec({0.0, 0.0}), vec({double(n), double(n)}), 1.0)
                  : GridMap(vec({0.0, 0.0, 0.0}), vec({double(n), double(n), double(n)}), 1.0);
}

using testing::dijkstra_cost;

bool neighbors(const Cell& a, const Cell& b) {
  int diff = 0;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(a[i] - b[i]) > 1) return false;
    diff += std::abs(a[i] - b[i]);
  }
  return diff > 0;
}

// ---------------------------------------------------------------- grid

TEST(GridMap, CellGeometry) {
  const GridMap g(vec({-1.0, 0.0}), vec({1.0, 0.5}), 0.1);
  EXPECT_EQ(g.size()[0], 20);
  EXPECT_EQ(g.size()[1], 5);
  EXPECT_EQ(g.num_cells(), 100u);
  const Cell c = g.cell_of(vec({-0.95, 0.26}));
  EXPECT_EQ(c[0], 0);
  EXPECT_EQ(c[1], 2);
  EXPECT_NEAR(g.center(c)[0], -0.95, 1e-12);
  EXPECT_NEAR(g.center(c)[1], 0.25, 1e-12);
  EXPECT_EQ(g.cell_of_index(g.index({7, 3, 0})), (Cell{7, 3, 0}));
  EXPECT_THROW((void)g.cell_of(vec({1.5, 0.0})), std::out_of_range);
  EXPECT_FALSE(g.in_bounds({20, 0, 0}));
}

TEST(GridMap, InflatedCellsAreOccupied) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.1, 0.9), w(0.05, 0.2);
  std::vector<Polytope> obs;
  for (int i = 0; i < 6; ++i) {
    const double x = u(rng), y = u(rng);
    obs.push_back(Polytope::box(vec({x, y}), vec({x + w(rng), y + w(rng)})));
  }
  const double inflation = 0.07;
  const auto g = GridMap::rasterize(obs, vec({0.0, 0.0}), vec({1.2, 1.2}), 0.02, inflation);
  int occupied = 0;
  for (std::size_t i = 0; i < g.num_cells(); ++i) {
    const Cell c = g.cell_of_index(i);
    const Vec p = g.center(c);
    double d = std::numeric_limits<double>::infinity();
    for (const auto& o : obs) {
      const Vec q = p.cwiseMax(o.aabb_lo()).cwiseMin(o.aabb_hi());
      d = std::min(d, (p - q).norm());
    }
    EXPECT_EQ(g.occupied(c), d <= inflation) << "cell " << c[0] << "," << c[1] << " d=" << d;
    occupied += g.occupied(c) ? 1 : 0;
  }
  EXPECT_GT(occupied, 0);
}

TEST(GridMap, PolygonDistanceIsExact) {
  const auto tri = Polytope::from_points_2d({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
  EXPECT_NEAR(point_distance(tri, vec({-0.3, -0.4})), 0.5, 1e-12);
  EXPECT_NEAR(point_distance(tri, vec({1.0, 1.0})), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(point_distance(tri, vec({0.2, 0.2})), 0.0, 1e-12);
}

// ---------------------------------------------------------------- A*

TEST(Astar, StraightLineCostsNine) {
  const auto p = astar(empty_grid(10), Cell{0, 0, 0}, Cell{0, 9, 0});
  EXPECT_DOUBLE_EQ(p.cost(), 9.0);
  EXPECT_EQ(p.cells.size(), 10u);
}

TEST(Astar, DiagonalCostsNineRootTwo) {
  const auto p = astar(empty_grid(10), Cell{0, 0, 0}, Cell{9, 9, 0});
  EXPECT_NEAR(p.cost(), 9.0 * std::sqrt(2.0), 1e-12);
  EXPECT_EQ(p.moves[1], 9);
}

TEST(Astar, SpatialDiagonal) {
  const auto p = astar(empty_grid(6, 3), Cell{0, 0, 0}, Cell{5, 5, 5});
  EXPECT_NEAR(p.cost(), 5.0 * std::sqrt(3.0), 1e-12);
  const auto q = astar(empty_grid(6, 3), Cell{0, 0, 0}, Cell{5, 2, 0});
  EXPECT_NEAR(q.cost(), 3.0 + 2.0 * std::sqrt(2.0), 1e-12);
}

TEST(Astar, MatchesDijkstraOnRandomGrids) {
  std::mt19937_64 rng(2024);
  std::bernoulli_distribution block(0.2);
  std::uniform_int_distribution<int> cell(0, 39);
  int compared = 0;
  for (int t = 0; t < 100; ++t) {
    auto g = empty_grid(40);
    for (int x = 0; x < 40; ++x)
      for (int y = 0; y < 40; ++y)
        if (block(rng)) g.set_occupied({x, y, 0});
    Cell s{cell(rng), cell(rng), 0}, e{cell(rng), cell(rng), 0};
    g.set_occupied(s, false);
    g.set_occupied(e, false);
    const double oracle = dijkstra_cost(g, s, e);
    if (std::isinf(oracle)) {
      EXPECT_THROW(astar(g, s, e), NoPath);
      continue;
    }
    const auto p = astar(g, s, e);
    EXPECT_NEAR(p.cost(), oracle, 1e-9) << "grid " << t;
    ASSERT_EQ(p.cells.front(), s);
    ASSERT_EQ(p.cells.back(), e);
    for (std::size_t i = 1; i < p.cells.size(); ++i) {
      EXPECT_TRUE(neighbors(p.cells[i - 1], p.cells[i]));
      EXPECT_FALSE(g.occupied(p.cells[i]));
    }
    ++compared;
  }
  EXPECT_GT(compared, 80);
}

TEST(Astar, EqualLengthPathsGiveIdenticalCosts) {
  auto g = empty_grid(12);
  const auto a = astar(g, Cell{0, 0, 0}, Cell{11, 4, 0});
  const auto b = astar(g, Cell{11, 4, 0}, Cell{0, 0, 0});
  EXPECT_EQ(a.cost(), b.cost());
}

TEST(Astar, Errors) {
  auto g = empty_grid(5);
  g.set_occupied({2, 0, 0});
  g.set_occupied({2, 1, 0});
  g.set_occupied({2, 2, 0});
  g.set_occupied({2, 3, 0});
  g.set_occupied({2, 4, 0});
  EXPECT_THROW(astar(g, Cell{0, 0, 0}, Cell{4, 4, 0}), NoPath);
  EXPECT_THROW(astar(g, Cell{2, 0, 0}, Cell{4, 4, 0}), std::invalid_argument);
  EXPECT_THROW(astar(g, Cell{0, 0, 0}, Cell{9, 4, 0}), std::invalid_argument);
}

TEST(Astar, WorldPathSnapsOccupiedEndpoints) {
  std::vector<Polytope> obs{Polytope::box(vec({0.4, 0.0}), vec({0.6, 0.7}))};
  const auto g = GridMap::rasterize(obs, vec({0.0, 0.0}), vec({1.0, 1.0}), 0.02, 0.055);
  const Vec start = vec({0.37, 0.1});  // inside the inflation band
  const Vec goal = vec({0.9, 0.1});
  ASSERT_TRUE(g.occupied(g.cell_of(start)));
  const Cell snapped = nearest_free(g, start);
  EXPECT_FALSE(g.occupied(snapped));
  EXPECT_LT((g.center(snapped) - start).norm(), 0.055);
  const auto path = astar(g, start, goal);
  EXPECT_EQ(path.waypoints.front(), start);
  EXPECT_EQ(path.waypoints.back(), goal);
  for (std::size_t i = 2; i + 1 < path.waypoints.size(); ++i) {
    const Vec step = (path.waypoints[i] - path.waypoints[i - 1]) / 0.02;
    EXPECT_LE(step.cwiseAbs().maxCoeff(), 1.0 + 1e-9);
    EXPECT_GE(step.norm(), 1.0 - 1e-9);
  }
  // Crosses the wall's x-range only above its inflated top.
  int over = 0;
  for (const auto& w : path.waypoints) {
    if (w[0] >= 0.4 && w[0] <= 0.6) {
      EXPECT_GT(w[1], 0.755);
      ++over;
    }
  }
  EXPECT_GT(over, 0);
}

// ---------------------------------------------------------------- reference path

TEST(ReferencePath, ArcLengthAndProjection) {
  const auto p = make_path({vec({0.0, 0.0}), vec({1.0, 0.0}), vec({1.0, 1.0})});
  EXPECT_DOUBLE_EQ(p.length(), 2.0);
  EXPECT_TRUE(p.point_at(1.5).isApprox(vec({1.0, 0.5})));
  EXPECT_TRUE(p.point_at(-1.0).isApprox(vec({0.0, 0.0})));
  EXPECT_TRUE(p.point_at(9.0).isApprox(vec({1.0, 1.0})));
  EXPECT_NEAR(p.project(vec({0.4, 0.2}), 0.0, 2.0), 0.4, 1e-12);
  EXPECT_NEAR(p.project(vec({1.3, 0.6}), 0.0, 2.0), 1.6, 1e-12);
  // Never behind the window start.
  EXPECT_GE(p.project(vec({0.1, 0.0}), 0.5, 1.0), 0.5);
}

// ---------------------------------------------------------------- local reference

TEST(LocalReference, StraightPathSpacing) {
  const dynamics::Unicycle2D m;
  const auto path = make_path({vec({0.0, 0.0}), vec({2.0, 0.0})});
  const auto ref = local_reference(path, m, vec({0.0, 0.0, 0.0, 0.0}), 0.2, 12, 0.1);
  ASSERT_EQ(ref.states.size(), 13u);
  for (int k = 0; k <= 12; ++k) {
    EXPECT_NEAR(ref.states[static_cast<std::size_t>(k)][0], 0.02 * k, 1e-12);
    EXPECT_NEAR(ref.states[static_cast<std::size_t>(k)][1], 0.0, 1e-12);
    EXPECT_NEAR(ref.states[static_cast<std::size_t>(k)][2], 0.0, 1e-12);
    EXPECT_NEAR(ref.states[static_cast<std::size_t>(k)][3], 0.2, 1e-12);
  }
}

TEST(LocalReference, PathEndClampsToGoal) {
  const dynamics::Unicycle2D m;
  const auto path = make_path({vec({0.0, 0.0}), vec({0.5, 0.5})});
  const auto ref = local_reference(path, m, vec({0.5, 0.5, 0.7, 0.0}), 0.2, 12, 0.1, 0.6);
  for (const auto& r : ref.states) {
    EXPECT_NEAR(r[0], 0.5, 1e-12);
    EXPECT_NEAR(r[1], 0.5, 1e-12);
    EXPECT_EQ(r[3], 0.0);
  }
}

TEST(LocalReference, CornerHeadingsStayNearCurrentBranch) {
  const dynamics::Unicycle2D m;
  // Westward leg then a turn to the south: headings pi then -pi/2, which
  // must appear as pi and 3pi/2 next to a current heading of 3.1.
  const auto path = make_path({vec({1.0, 0.0}), vec({0.9, 0.0}), vec({0.9, -0.5})});
  const auto ref = local_reference(path, m, vec({1.0, 0.0, 3.1, 0.2}), 0.2, 12, 0.1);
  EXPECT_NEAR(ref.states.front()[2], M_PI, 1e-9);
  EXPECT_NEAR(ref.states.back()[2], 1.5 * M_PI, 1e-9);
  for (std::size_t k = 1; k < ref.states.size(); ++k) {
    EXPECT_LE(std::abs(ref.states[k][2] - ref.states[k - 1][2]), M_PI / 2 + 1e-9);
  }
}

TEST(LocalReference, ContinuityOnGridPaths) {
  const dynamics::Unicycle2D m;
  std::vector<Polytope> obs{Polytope::box(vec({0.4, 0.0}), vec({0.6, 0.7}))};
  const auto g = GridMap::rasterize(obs, vec({0.0, 0.0}), vec({1.0, 1.0}), 0.02, 0.05);
  const auto path = astar(g, vec({0.2, 0.1}), vec({0.9, 0.1}));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> s(0.0, path.length());
  for (int t = 0; t < 50; ++t) {
    const double s0 = s(rng);
    const Vec p = path.point_at(s0);
    const auto ref = local_reference(path, m, vec({p[0], p[1], 0.0, 0.1}), 0.2, 12, 0.1, std::max(0.0, s0 - 0.05));
    for (std::size_t k = 1; k < ref.states.size(); ++k) {
      const double gap = (ref.states[k].head(2) - ref.states[k - 1].head(2)).norm();
      EXPECT_LE(gap, 0.2 * 0.1 + 1e-9);
    }
  }
}

TEST(LocalReference, SpatialPitchFromPath) {
  const dynamics::Unicycle3D m;
  const auto path = make_path({vec({0.0, 0.0, 0.0}), vec({1.0, 0.0, 1.0})});
  const auto ref = local_reference(path, m, vec({0.0, 0.0, 0.0, 0.0, 0.0, 0.0}), 0.2, 8, 0.1);
  ASSERT_EQ(ref.states.size(), 9u);
  for (const auto& r : ref.states) {
    EXPECT_NEAR(r[3], 0.0, 1e-12);
    EXPECT_NEAR(r[4], M_PI / 4, 1e-12);
    EXPECT_NEAR(r[5], 0.2, 1e-12);
  }
  EXPECT_NEAR((ref.states[1].head(3) - ref.states[0].head(3)).norm(), 0.02, 1e-12);
}

TEST(LocalReference, RejectsEmptyPath) {
  const dynamics::Unicycle2D m;
  EXPECT_THROW(local_reference(ReferencePath{}, m, vec({0.0, 0.0, 0.0, 0.0}), 0.2, 12, 0.1), std::invalid_argument);
}

}  // namespace
}  // namespace impc::planner
