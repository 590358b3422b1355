#pragma once

// Reference computations that deliberately avoid the library's fast paths.
// They are slow and only meant for small instances.

#include "taskgame/core.hpp"

#include <functional>
#include <vector>

namespace taskgame::oracle {

struct CollocationSolution {
  double cost = 0.0;
  Vec2 terminal_position = Vec2::Zero();
  Vec2 terminal_velocity = Vec2::Zero();
};

/// Minimum-energy transfer of the double integrator to (target, 0) with
/// piecewise-constant controls on `steps` equal intervals, solved as an
/// equality-constrained least-squares problem.
CollocationSolution collocation_ocp(const AgentState& state, const Vec2& target, double horizon,
                                    int steps);

/// Brute-force view of a game: completion costs are supplied per (agent,
/// task) and every utility is computed from the definitions.
class BruteForceGame {
 public:
  BruteForceGame(const Scenario& scenario, std::vector<AgentState> states, double horizon);

  double team_utility(const AssignmentProfile& profile) const;

  /// Marginal contribution via two full team-utility sums.
  double agent_utility(const AssignmentProfile& profile, int agent) const;

  const std::vector<Assignment>& actions(int agent) const { return actions_[agent]; }

  bool is_nash(const AssignmentProfile& profile) const;

  /// Calls visit for each of the prod |A_i| profiles.
  void for_each_profile(const std::function<void(const AssignmentProfile&)>& visit) const;

 private:
  const Scenario& scenario_;
  std::vector<std::vector<double>> cost_;  // [agent][task]
  std::vector<std::vector<Assignment>> actions_;
};

}  // namespace taskgame::oracle
