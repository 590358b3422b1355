#include "checks/oracles.hpp"

#include "taskgame/optimal_control.hpp"

#include <Eigen/Dense>

#include <algorithm>

namespace taskgame::oracle {

CollocationSolution collocation_ocp(const AgentState& state, const Vec2& target, double horizon,
                                    int steps) {
  const double dt = horizon / steps;
  // Constraint rows per axis: terminal velocity and terminal position as
  // linear functions of the step controls.
  Eigen::MatrixXd A(2, steps);
  for (int k = 0; k < steps; ++k) {
    A(0, k) = dt * (horizon - (k + 0.5) * dt);
    A(1, k) = dt;
  }
  const Eigen::Matrix2d gram = A * A.transpose();
  const Eigen::LDLT<Eigen::Matrix2d> solver(gram);

  CollocationSolution sol;
  for (int axis = 0; axis < 2; ++axis) {
    const double p0 = state.position[axis];
    const double v0 = state.velocity[axis];
    Eigen::Vector2d rhs(target[axis] - p0 - v0 * horizon, -v0);
    const Eigen::VectorXd u = A.transpose() * solver.solve(rhs);
    sol.cost += 0.5 * dt * u.squaredNorm();

    // Forward-simulate the discrete controls exactly.
    double p = p0, v = v0;
    for (int k = 0; k < steps; ++k) {
      p += v * dt + 0.5 * u[k] * dt * dt;
      v += u[k] * dt;
    }
    sol.terminal_position[axis] = p;
    sol.terminal_velocity[axis] = v;
  }
  return sol;
}

BruteForceGame::BruteForceGame(const Scenario& scenario, std::vector<AgentState> states,
                               double horizon)
    : scenario_(scenario) {
  for (const auto& s : states) {
    std::vector<double> row;
    for (const auto& t : scenario.tasks) row.push_back(completion_cost(s, t, horizon));
    cost_.push_back(std::move(row));
    actions_.push_back(action_set(scenario, s));
  }
}

double BruteForceGame::team_utility(const AssignmentProfile& profile) const {
  double total = 0.0;
  for (const auto& t : scenario_.tasks) {
    double failure = 1.0;
    double cost = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < profile.size(); ++i) {
      if (profile[i].is_null() || profile[i].task_id() != t.task_id) continue;
      any = true;
      failure *= 1.0 - t.success_prob[static_cast<Eigen::Index>(i)];
      cost += cost_[i][t.task_id];
    }
    const double reward = any ? t.nominal_reward * (1.0 - failure) : 0.0;
    total += std::max(0.0, reward - cost);
  }
  return total;
}

double BruteForceGame::agent_utility(const AssignmentProfile& profile, int agent) const {
  return team_utility(profile) - team_utility(profile.with(agent, Assignment::null()));
}

bool BruteForceGame::is_nash(const AssignmentProfile& profile) const {
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const int agent = static_cast<int>(i);
    const double current = agent_utility(profile, agent);
    for (Assignment a : actions_[i])
      if (agent_utility(profile.with(i, a), agent) > current + 1e-12) return false;
  }
  return true;
}

void BruteForceGame::for_each_profile(
    const std::function<void(const AssignmentProfile&)>& visit) const {
  const std::size_t n = actions_.size();
  std::vector<std::size_t> digit(n, 0);
  AssignmentProfile profile(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) profile[i] = actions_[i][digit[i]];
    visit(profile);
    std::size_t i = 0;
    while (i < n && ++digit[i] == actions_[i].size()) digit[i++] = 0;
    if (i == n) return;
  }
}

}  // namespace taskgame::oracle
