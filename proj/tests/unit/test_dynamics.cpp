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

#include "impc/dynamics/model.hpp"
#include "support/finite_difference.hpp"

namespace impc::dynamics {
namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) out[i++] = e;
  return out;
}

TEST(Unicycle2D, StraightLine) {
  const Unicycle2D m;
  const Vec next = m.step(vec({0, 0, 0, 1}), vec({0, 0}), 0.1);
  EXPECT_NEAR((next - vec({0.1, 0, 0, 1})).norm(), 0.0, 1e-15);
}

TEST(Unicycle2D, DirectSubstitution) {
  const Unicycle2D m;
  const Vec next = m.step(vec({0, 0, M_PI / 2, 2}), vec({0.5, 0.5}), 0.1);
  EXPECT_NEAR((next - vec({0, 0.2, M_PI / 2 + 0.05, 2.05})).norm(), 0.0, 1e-15);
}

TEST(Unicycle3D, PureVerticalMotion) {
  const Unicycle3D m;
  const Vec next = m.step(vec({0, 0, 0, 0, M_PI / 2, 1}), vec({0, 0, 0}), 0.1);
  EXPECT_NEAR((next - vec({0, 0, 0.1, 0, M_PI / 2, 1})).norm(), 0.0, 1e-15);
}

TEST(Unicycle2D, JacobianAtZeroHeading) {
  const Unicycle2D m;
  const auto lin = linearize(m, vec({0, 0, 0, 1}), vec({0, 0}), m.step(vec({0, 0, 0, 1}), vec({0, 0}), 0.1), 0.1);
  Mat expected_a = Mat::Identity(4, 4);
  expected_a(0, 3) = 0.1;
  expected_a(1, 2) = 0.1;
  EXPECT_NEAR((lin.a - expected_a).norm(), 0.0, 1e-15);
  Mat expected_b(4, 2);
  expected_b << 0, 0, 0, 0, 0.1, 0, 0, 0.1;
  EXPECT_NEAR((lin.b - expected_b).norm(), 0.0, 1e-15);
}

TEST(Linearize, ConsistentNominalHasZeroResidual) {
  const Unicycle3D m;
  const Vec x = vec({0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
  const Vec u = vec({0.1, -0.2, 0.3});
  EXPECT_EQ(linearize(m, x, u, m.step(x, u, 0.1), 0.1).residual.norm(), 0.0);
  const Vec off = m.step(x, u, 0.1) + Vec::Constant(6, 0.01);
  EXPECT_NEAR((linearize(m, x, u, off, 0.1).residual + Vec::Constant(6, 0.01)).norm(), 0.0, 1e-15);
}

class JacobianCheck : public ::testing::TestWithParam<int> {};

TEST_P(JacobianCheck, MatchesCentralDifferences) {
  const auto model = make_model(GetParam());
  std::mt19937_64 rng(GetParam() * 100 + 1);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    Vec x(model->state_dim()), u(model->input_dim());
    for (auto& e : x) e = uni(rng);
    for (auto& e : u) e = 0.25 * uni(rng);
    Mat a, b, fa, fb;
    model->jacobians(x, u, 0.1, a, b);
    testing::fd_jacobians(*model, x, u, 0.1, 1e-6, fa, fb);
    EXPECT_LT(testing::relative_error(fa, a), 1e-6);
    EXPECT_LT(testing::relative_error(fb, b), 1e-6);
  }
}

TEST_P(JacobianCheck, LinearPredictionIsSecondOrderAccurate) {
  const auto model = make_model(GetParam());
  std::mt19937_64 rng(GetParam() * 100 + 2);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Vec x(model->state_dim()), u(model->input_dim());
    for (auto& e : x) e = 2.0 * uni(rng);
    for (auto& e : u) e = 0.5 * uni(rng);
    Vec dx(model->state_dim()), du(model->input_dim());
    for (auto& e : dx) e = 1e-2 * uni(rng);
    for (auto& e : du) e = 1e-2 * uni(rng);
    const auto lin = linearize(*model, x, u, model->step(x, u, 0.1), 0.1);
    const Vec predicted = model->step(x, u, 0.1) + lin.a * dx + lin.b * du;
    EXPECT_LE((model->step(x + dx, u + du, 0.1) - predicted).norm(), 1e-4);
  }
}

INSTANTIATE_TEST_SUITE_P(BothModels, JacobianCheck, ::testing::Values(2, 3));

TEST(Model, ComposeStateAndPose) {
  const Unicycle3D m;
  const Vec x = m.compose_state(vec({1, 2, 3}), vec({0.1, 0.2}), 0.5);
  EXPECT_NEAR((x - vec({1, 2, 3, 0.1, 0.2, 0.5})).norm(), 0.0, 0.0);
  const auto pose = m.pose(x);
  EXPECT_EQ(pose.position.size(), 3);
  EXPECT_EQ(pose.orientation[1], 0.2);
}

TEST(Model, RejectsWrongSizes) {
  const Unicycle2D m;
  EXPECT_THROW((void)m.step(Vec::Zero(3), Vec::Zero(2), 0.1), DimensionMismatch);
}

}  // namespace
}  // namespace impc::dynamics
