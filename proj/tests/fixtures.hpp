#pragma once

#include "taskgame/core.hpp"

#include <initializer_list>
#include <memory>
#include <optional>

namespace fixtures {

using taskgame::Vec2;

inline taskgame::AgentState agent(int id, Vec2 p, Vec2 v = Vec2::Zero()) {
  return {id, p, v};
}

inline taskgame::Task task(int id, Vec2 pos, double reward, std::initializer_list<double> probs) {
  taskgame::Task t{id, pos, reward, Eigen::VectorXd(static_cast<Eigen::Index>(probs.size()))};
  Eigen::Index k = 0;
  for (double p : probs) t.success_prob[k++] = p;
  return t;
}

inline std::shared_ptr<const taskgame::Scenario> share(taskgame::Scenario s) {
  return std::make_shared<const taskgame::Scenario>(std::move(s));
}

inline taskgame::AssignmentProfile profile(std::initializer_list<int> slots) {
  taskgame::AssignmentProfile out(slots.size());
  std::size_t i = 0;
  for (int t : slots)
    out[i++] = t < 0 ? taskgame::Assignment::null() : taskgame::Assignment::task(t);
  return out;
}

}  // namespace fixtures
