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

#include "impc/multirobot/team.hpp"

#include <algorithm>

namespace impc::multirobot {

bool Agent::at_goal() const {
  const auto& m = controller.model();
  return (m.position(controller.state()) - goal).norm() <= goal_radius;
}

double Agent::reference_speed() const {
  const double v = controller.state()[controller.model().speed_index()];
  return std::clamp(v, ref_speed_floor, std::max(ref_speed_floor, ref_speed_max));
}

std::vector<geometry::Polytope> Agent::pieces() const {
  return geometry::pose_to_world(controller.shape(), controller.model().pose(controller.state()));
}

mpc::World world_for(std::size_t i, const std::vector<Agent>& agents, const std::vector<geometry::Polytope>& statics,
                     const TeamPlan& plan) {
  mpc::World world;
  world.statics = statics;
  for (std::size_t j = 0; j < agents.size(); ++j) {
    if (j == i) continue;
    if (agents[j].reached || agents[j].failed) {
      const auto p = agents[j].pieces();
      world.statics.insert(world.statics.end(), p.begin(), p.end());
    }
  }
  const int horizon = agents[i].controller.config().horizon;
  std::vector<std::vector<geometry::Polytope>> layers(static_cast<std::size_t>(horizon + 1));
  bool any = false;
  for (std::size_t j = 0; j < i; ++j) {
    if (agents[j].reached || agents[j].failed || plan.predicted[j].empty()) continue;
    any = true;
    const auto& pred = plan.predicted[j];
    const auto& model = agents[j].controller.model();
    for (int k = 0; k <= horizon; ++k) {
      const Vec& x = pred[std::min<std::size_t>(static_cast<std::size_t>(k), pred.size() - 1)];
      const auto p = geometry::pose_to_world(agents[j].controller.shape(), model.pose(x));
      auto& layer = layers[static_cast<std::size_t>(k)];
      layer.insert(layer.end(), p.begin(), p.end());
    }
  }
  if (any) world.dynamic = std::move(layers);
  return world;
}

TeamStep plan_team_step(std::vector<Agent>& agents, const std::vector<geometry::Polytope>& statics) {
  TeamStep out;
  const std::size_t n = agents.size();
  out.inputs.resize(n);
  out.outcomes.resize(n);
  out.active.assign(n, 0);
  out.plan.predicted.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& agent = agents[i];
    const auto& model = agent.controller.model();
    out.inputs[i] = Vec::Zero(model.input_dim());
    if (agent.reached || agent.failed) continue;
    const mpc::World world = world_for(i, agents, statics, out.plan);
    const Vec x_now = agent.controller.state();
    const auto ref = planner::local_reference(agent.path, model, x_now, agent.reference_speed(),
                                              agent.controller.config().horizon, agent.controller.config().dt,
                                              agent.progress, agent.lookahead);
    agent.progress = ref.progress;
    auto outcome = agent.controller.step(world, ref.states);
    out.active[i] = 1;
    out.inputs[i] = outcome.input;
    // Plan as seen from time t: the state before the step, then the shifted plan.
    auto& pred = out.plan.predicted[i];
    pred.push_back(x_now);
    const auto& plan = agent.controller.plan().states;
    pred.insert(pred.end(), plan.begin(), plan.end() - 1);
    if (outcome.failed) agent.failed = true;
    if (agent.at_goal()) agent.reached = true;
    out.outcomes[i] = std::move(outcome);
  }
  return out;
}

}  // namespace impc::multirobot
