#pragma once

#include "taskgame/core.hpp"

#include <Eigen/Core>

#include <memory>
#include <span>
#include <vector>

namespace taskgame {

/// The game at one evaluation time: agent states, the remaining horizon,
/// and the completion costs they induce.
///
/// Completion costs are computed lazily per (agent, task) entry. The lazy
/// fill mutates internal state, so call populate() before sharing a
/// snapshot across threads.
class GameSnapshot {
 public:
  GameSnapshot(std::shared_ptr<const Scenario> scenario, std::vector<AgentState> agent_states,
               double horizon, double min_horizon = 0.0);

  /// The game at t = 0: initial states, horizon equal to the final time.
  static GameSnapshot initial(std::shared_ptr<const Scenario> scenario);

  const Scenario& scenario() const { return *scenario_; }
  const std::shared_ptr<const Scenario>& scenario_ptr() const { return scenario_; }
  std::span<const AgentState> agent_states() const { return states_; }
  double horizon() const { return horizon_; }
  int num_agents() const { return scenario_->num_agents(); }
  int num_tasks() const { return scenario_->num_tasks(); }

  double completion_cost(int agent, int task) const;
  const std::vector<Assignment>& action_set(int agent) const { return actions_[agent]; }

  /// Fills the whole cost cache.
  void populate() const;

 private:
  std::shared_ptr<const Scenario> scenario_;
  std::vector<AgentState> states_;
  double horizon_;
  double min_horizon_;
  std::vector<std::vector<Assignment>> actions_;
  mutable Eigen::MatrixXd costs_;  // NaN marks an unfilled entry
};

/// Inverse image of a profile: the agents assigned to each task.
class TaskRoster {
 public:
  TaskRoster(const AssignmentProfile& profile, int num_tasks);

  std::span<const int> members(int task) const {
    return {members_.data() + offsets_[task], members_.data() + offsets_[task + 1]};
  }

 private:
  std::vector<int> members_;
  std::vector<int> offsets_;
};

double task_reward(const GameSnapshot& snapshot, const AssignmentProfile& profile, int task);
double task_cost(const GameSnapshot& snapshot, const AssignmentProfile& profile, int task);
double task_utility(const GameSnapshot& snapshot, const AssignmentProfile& profile, int task);
double team_utility(const GameSnapshot& snapshot, const AssignmentProfile& profile);

/// Wonderful-life utility: the agent's marginal contribution to the team
/// utility. Zero for a null assignment; may be negative.
double agent_utility(const GameSnapshot& snapshot, const AssignmentProfile& profile, int agent);

/// Utility agent i would receive by playing `candidate` while everyone else
/// keeps the assignment recorded in `roster`. Touches only the candidate task.
double deviation_utility(const GameSnapshot& snapshot, const TaskRoster& roster, int agent,
                         Assignment candidate);

/// Team utility when each assigned agent i is charged agent_costs[i]
/// instead of its snapshot completion cost.
double team_utility_with_costs(const Scenario& scenario, const AssignmentProfile& profile,
                               std::span<const double> agent_costs);

/// Gains at or below this are not counted as improvements.
inline constexpr double kImprovementTolerance = 1e-12;

/// True iff no agent has a strictly improving unilateral deviation inside
/// its action set.
bool exhaustive_nash_check(const GameSnapshot& snapshot, const AssignmentProfile& profile);

}  // namespace taskgame
