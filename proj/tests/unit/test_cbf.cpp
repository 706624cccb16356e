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
#include <random>

#include <gtest/gtest.h>

#include "impc/cbf/cbf.hpp"

namespace impc::cbf {
namespace {

using geometry::Hyperplane;
using geometry::Polytope;

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) out[i++] = e;
  return out;
}

struct Fixture2D {
  dynamics::Unicycle2D model;
  Vec state = vec({0.0, 0.0, 0.3, 0.1});
  geometry::ClosestPointPair pair;
  Hyperplane plane;
  geometry::AffinePointMap map;

  explicit Fixture2D(double margin = 0.0) {
    const Polytope obstacle = Polytope::box(vec({0.4, -0.5}), vec({0.6, 0.5}));
    const Polytope body = Polytope::box(vec({-0.05, -0.03}), vec({0.1, 0.03}));
    const auto world = body.transformed(geometry::rotation(vec({0.3})), vec({0.0, 0.0}));
    pair = geometry::closest_points(obstacle, world);
    plane = geometry::supporting_hyperplane(pair, margin);
    map = geometry::linearize_robot_point(pair, model.pose(state));
  }
};

TEST(Psi0, EqualsDistanceAtNominal) {
  const Fixture2D f;
  EXPECT_NEAR(psi0(f.plane, f.map, f.model, f.state), f.pair.distance(), 1e-7);
}

TEST(Psi0, MarginSubtraction) {
  Hyperplane h{vec({1.0, 0.0}), vec({0.0, 0.0}), 0.05};
  geometry::AffinePointMap map = geometry::linearize_robot_point(vec({0.3, 0.0}), {vec({0.3, 0.0}), vec({0.0})});
  const dynamics::Unicycle2D m;
  EXPECT_NEAR(psi0(h, map, m, vec({0.3, 0.0, 0.0, 0.0})), 0.25, 1e-12);
}

TEST(Psi0, MovesWithTranslationAlongNormal) {
  const Fixture2D f;
  Vec moved = f.state;
  moved.head(2) += 0.1 * f.plane.normal;
  EXPECT_NEAR(psi0(f.plane, f.map, f.model, moved) - psi0(f.plane, f.map, f.model, f.state), 0.1, 1e-7);
}

TEST(Psi0, AffineFormMatchesDirectEvaluation) {
  const Fixture2D f;
  const auto aff = psi0_affine(f.plane, f.map, f.model);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 0.5);
  for (int i = 0; i < 50; ++i) {
    const Vec x = vec({n(rng), n(rng), n(rng), n(rng)});
    EXPECT_NEAR(aff(x), psi0(f.plane, f.map, f.model, x), 1e-12);
  }
}

TEST(Psi0, MarginShiftIsExact) {
  const Fixture2D f0(0.0);
  const Fixture2D f1(0.07);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 0.3);
  for (int i = 0; i < 20; ++i) {
    const Vec x = vec({n(rng), n(rng), n(rng), n(rng)});
    EXPECT_NEAR(psi0(f0.plane, f0.map, f0.model, x) - psi0(f1.plane, f1.map, f1.model, x), 0.07, 1e-12);
  }
}

TEST(Psi0, ThreeDimensionalOrientationColumns) {
  const dynamics::Unicycle3D m;
  const Vec x = vec({0.1, 0.2, 0.3, 0.4, 0.2, 0.0});
  const Vec local = vec({0.1, 0.05, -0.02});
  const Vec world = geometry::rotation(m.orientation(x)) * local + m.position(x);
  const auto map = geometry::linearize_robot_point(world, m.pose(x));
  const Hyperplane h{vec({0.0, 0.6, 0.8}), vec({0.0, -1.0, 0.0}), 0.0};
  const auto aff = psi0_affine(h, map, m);
  // Small orientation perturbations follow the first-order model.
  Vec y = x;
  y[3] += 1e-4;
  y[4] -= 2e-4;
  const Vec exact = geometry::rotation(m.orientation(y)) * local + m.position(y);
  EXPECT_NEAR(aff(y), h.normal.dot(exact - h.anchor), 1e-7);
}

TEST(PsiSequence, ConstantSequence) {
  CbfParams p;
  const auto s = psi_sequence({2.0, 2.0, 2.0}, p);
  ASSERT_EQ(s.size(), 1u);
  for (double v : s[0]) EXPECT_NEAR(v, 0.2, 1e-15);
}

TEST(PsiSequence, BoundaryCase) {
  CbfParams p;
  const auto s = psi_sequence({2.0, 1.8}, p);
  EXPECT_NEAR(s[0][0], 0.0, 1e-15);
}

TEST(PsiSequence, SecondOrderMatchesDirectRecursion) {
  CbfParams p;
  p.relative_degree = 2;
  p.gammas = {0.3, 0.6};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(12);
    for (auto& e : v) e = u(rng);
    const auto s = psi_sequence(v, p);
    ASSERT_EQ(s.size(), 2u);
    ASSERT_EQ(s[1].size(), v.size() - 2);
    for (std::size_t k = 0; k + 2 < v.size(); ++k) {
      // psi2(k) = psi1(k+1) - psi1(k) + g2 psi1(k), psi1(k) = v[k+1] - (1 - g1) v[k]
      const double p1k = v[k + 1] - (1.0 - 0.3) * v[k];
      const double p1k1 = v[k + 2] - (1.0 - 0.3) * v[k + 1];
      EXPECT_NEAR(s[1][k], p1k1 - (1.0 - 0.6) * p1k, 1e-14);
    }
  }
}

TEST(PsiSequence, TooShort) {
  CbfParams p;
  p.relative_degree = 2;
  p.gammas = {0.1, 0.1};
  EXPECT_THROW(psi_sequence({1.0, 2.0}, p), std::invalid_argument);
}

TEST(CbfParams, Validation) {
  CbfParams p;
  p.gammas = {0.0};
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.gammas = {1.2};
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = CbfParams{};
  p.order = 2;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = CbfParams{};
  p.slack_min = 2.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

SafetyConstraint unit_constraint(int step, double psi_current) {
  SafetyConstraint c;
  c.step = step;
  c.obstacle = 0;
  c.piece = 0;
  c.hyperplane = Hyperplane{vec({1.0, 0.0}), vec({0.0, 0.0}), 0.0};
  c.point_map = geometry::linearize_robot_point(vec({1.0, 0.0}), {vec({1.0, 0.0}), vec({0.0})});
  c.psi0_current = psi_current;
  return c;
}

TEST(DcbfRows, FirstStepDecay) {
  const dynamics::Unicycle2D m;
  const auto rows = build_dcbf_rows({unit_constraint(1, 1.0)}, CbfParams{}, 12, m);
  ASSERT_EQ(rows.size(), 1u);
  // omega = 1: state_coeffs.x + constant >= 0.9
  EXPECT_NEAR(rows[0].slack_coeff, 0.9, 1e-15);
  const Vec x = vec({1.0, 0.0, 0.0, 0.0});
  EXPECT_NEAR(rows[0].evaluate(x, 1.0), 1.0 - 0.9, 1e-12);
}

TEST(DcbfRows, ThirdStepDecay) {
  const dynamics::Unicycle2D m;
  const auto rows = build_dcbf_rows({unit_constraint(3, 1.0)}, CbfParams{}, 12, m);
  EXPECT_NEAR(rows[0].slack_coeff, 0.729, 1e-15);
}

TEST(DcbfRows, ZeroSlackIsPureSeparation) {
  const dynamics::Unicycle2D m;
  const auto rows = build_dcbf_rows({unit_constraint(5, 0.8)}, CbfParams{}, 12, m);
  const Vec x = vec({0.37, 0.2, 0.0, 0.0});
  const auto aff = psi0_affine(unit_constraint(5, 0.8).hyperplane, unit_constraint(5, 0.8).point_map, m);
  EXPECT_NEAR(rows[0].evaluate(x, 0.0), aff(x), 1e-15);
  EXPECT_EQ(rows[0].slack_min, 0.0);
  EXPECT_EQ(rows[0].slack_max, 1.0);
}

TEST(DcbfRows, NegativeCurrentValueDoesNotLowerFloor) {
  const dynamics::Unicycle2D m;
  const auto rows = build_dcbf_rows({unit_constraint(2, -0.1)}, CbfParams{}, 12, m);
  EXPECT_EQ(rows[0].slack_coeff, 0.0);
}

TEST(DcbfRows, RowsAreAffine) {
  const Fixture2D f;
  SafetyConstraint c;
  c.step = 4;
  c.hyperplane = f.plane;
  c.point_map = f.map;
  c.psi0_current = f.pair.distance();
  const auto rows = build_dcbf_rows({c}, CbfParams{}, 12, f.model);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const Vec x = vec({n(rng), n(rng), n(rng), n(rng)});
    const Vec y = vec({n(rng), n(rng), n(rng), n(rng)});
    const double wx = t(rng), wy = t(rng), a = t(rng);
    const double lhs = rows[0].evaluate(a * x + (1 - a) * y, a * wx + (1 - a) * wy);
    const double rhs = a * rows[0].evaluate(x, wx) + (1 - a) * rows[0].evaluate(y, wy);
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST(DcbfRows, Errors) {
  const dynamics::Unicycle2D m;
  EXPECT_THROW(build_dcbf_rows({unit_constraint(0, 1.0)}, CbfParams{}, 12, m), std::invalid_argument);
  EXPECT_THROW(build_dcbf_rows({unit_constraint(13, 1.0)}, CbfParams{}, 12, m), std::invalid_argument);
  auto bad = unit_constraint(1, 1.0);
  bad.hyperplane.normal = Vec();
  EXPECT_THROW(build_dcbf_rows({bad}, CbfParams{}, 12, m), DegenerateContact);
  CbfParams p;
  p.relative_degree = 2;
  p.order = 2;
  p.gammas = {0.1, 0.1};
  EXPECT_THROW(build_dcbf_rows({unit_constraint(1, 1.0)}, p, 12, m), std::invalid_argument);
}

}  // namespace
}  // namespace impc::cbf
