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
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "impc/planner/planner.hpp"

namespace impc::testing {

// Plain Dijkstra over the 8-connected grid: unit axis moves, sqrt(2)
// diagonals. +infinity when t is unreachable.
inline double dijkstra_cost(const planner::GridMap& g, const planner::Cell& s, const planner::Cell& t) {
  const int nx = g.size()[0], ny = g.size()[1];
  std::vector<double> dist(static_cast<std::size_t>(nx * ny), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  auto id = [&](int x, int y) { return y * nx + x; };
  dist[static_cast<std::size_t>(id(s[0], s[1]))] = 0.0;
  open.push({0.0, id(s[0], s[1])});
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (d > dist[static_cast<std::size_t>(u)]) continue;
    const int x = u % nx, y = u / nx;
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        if (dx == 0 && dy == 0) continue;
        const int a = x + dx, b = y + dy;
        if (a < 0 || b < 0 || a >= nx || b >= ny || g.occupied({a, b, 0})) continue;
        const double w = (dx != 0 && dy != 0) ? std::sqrt(2.0) : 1.0;
        if (d + w < dist[static_cast<std::size_t>(id(a, b))] - 1e-12) {
          dist[static_cast<std::size_t>(id(a, b))] = d + w;
          open.push({d + w, id(a, b)});
        }
      }
    }
  }
  return dist[static_cast<std::size_t>(id(t[0], t[1]))];
}

}  // namespace impc::testing
