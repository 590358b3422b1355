#pragma once

#include "taskgame/core.hpp"
#include "taskgame/double_integrator.hpp"

#include <concepts>
#include <stdexcept>

namespace taskgame {

/// Thrown when a plan is requested over a horizon shorter than the minimum.
class HorizonTooShort : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Open-loop control law u(s) = alpha + s beta, s measured from plan creation.
/// A null plan applies zero control and coasts; zero-control plans may be
/// propagated past their horizon.
struct ControlPlan {
  Vec2 alpha = Vec2::Zero();
  Vec2 beta = Vec2::Zero();
  double horizon = 0.0;
  AgentState origin_state;
  Assignment target;

  di::AffineControl<double> control() const { return {alpha, beta}; }
  bool is_zero_control() const { return alpha.isZero(0.0) && beta.isZero(0.0); }
};

/// Throws HorizonTooShort unless horizon > 0 and horizon >= min_horizon.
ControlPlan solve_ocp(const AgentState& state, const Vec2& target_position, double horizon,
                      double min_horizon = 0.0);
/// As above, with the plan tagged by the task it lands on.
ControlPlan solve_ocp(const AgentState& state, const Task& task, double horizon,
                      double min_horizon = 0.0);

/// Zero-control plan for an agent with no task.
ControlPlan null_plan(const AgentState& state, double horizon);

/// Integral of |u|^2 / 2 over the full plan horizon.
double cost_to_go(const ControlPlan& plan);

/// Integral of |u|^2 / 2 over [0, duration].
double energy_spent(const ControlPlan& plan, double duration);

/// State reached after `duration` under the plan.
AgentState propagate(const ControlPlan& plan, double duration);

double completion_cost(const AgentState& state, const Task& task, double horizon,
                       double min_horizon = 0.0);

/// The solve/cost/propagate triple the allocation layer needs from a
/// dynamics model.
template <typename D>
concept TaskDynamics = requires(const AgentState& s, const Vec2& target, double h,
                                const ControlPlan& plan) {
  { D::solve(s, target, h, h) } -> std::same_as<ControlPlan>;
  { D::cost(plan) } -> std::convertible_to<double>;
  { D::propagate(plan, h) } -> std::same_as<AgentState>;
};

struct DoubleIntegrator {
  static ControlPlan solve(const AgentState& s, const Vec2& target, double h, double min_h) {
    return solve_ocp(s, target, h, min_h);
  }
  static double cost(const ControlPlan& plan) { return cost_to_go(plan); }
  static AgentState propagate(const ControlPlan& plan, double duration) {
    return taskgame::propagate(plan, duration);
  }
};

static_assert(TaskDynamics<DoubleIntegrator>);

}  // namespace taskgame
