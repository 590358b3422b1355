#include "taskgame/optimal_control.hpp"

#include <cmath>
#include <string>

namespace taskgame {

ControlPlan solve_ocp(const AgentState& state, const Vec2& target_position, double horizon,
                      double min_horizon) {
  if (!(horizon > 0.0) || horizon < min_horizon || !std::isfinite(horizon))
    throw HorizonTooShort("solve_ocp: horizon " + std::to_string(horizon) +
                          " below minimum " + std::to_string(min_horizon));
  const auto c = di::landing_control(state.position, state.velocity, target_position, horizon);
  ControlPlan plan;
  plan.alpha = c.alpha;
  plan.beta = c.beta;
  plan.horizon = horizon;
  plan.origin_state = state;
  return plan;
}

ControlPlan solve_ocp(const AgentState& state, const Task& task, double horizon,
                      double min_horizon) {
  ControlPlan plan = solve_ocp(state, task.target_position, horizon, min_horizon);
  plan.target = Assignment::task(task.task_id);
  return plan;
}

ControlPlan null_plan(const AgentState& state, double horizon) {
  ControlPlan plan;
  plan.horizon = horizon;
  plan.origin_state = state;
  return plan;
}

double cost_to_go(const ControlPlan& plan) {
  return di::control_energy(plan.control(), plan.horizon);
}

double energy_spent(const ControlPlan& plan, double duration) {
  return di::control_energy(plan.control(), duration);
}

AgentState propagate(const ControlPlan& plan, double duration) {
  if (!(duration >= 0.0) || (!plan.is_zero_control() && duration > plan.horizon))
    throw std::out_of_range("propagate: duration outside plan horizon");
  const auto& o = plan.origin_state;
  AgentState out = o;
  if (duration == 0.0) return out;
  const auto c = plan.control();
  out.position = di::position_at(o.position, o.velocity, c, duration);
  out.velocity = di::velocity_at(o.velocity, c, duration);
  return out;
}

double completion_cost(const AgentState& state, const Task& task, double horizon,
                       double min_horizon) {
  return cost_to_go(solve_ocp(state, task, horizon, min_horizon));
}

}  // namespace taskgame
