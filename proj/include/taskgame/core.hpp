#pragma once

#include <Eigen/Core>

#include <compare>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace taskgame {

using Vec2 = Eigen::Vector2d;

/// Kinematic state of one agent: position and velocity in the plane.
struct AgentState {
  int agent_id = 0;
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
};

/// A spatially located task. The target state is (target_position, 0):
/// agents must arrive at rest.
struct Task {
  int task_id = 0;
  Vec2 target_position = Vec2::Zero();
  double nominal_reward = 0.0;
  // success_prob[i] is the probability that agent i completes this task.
  Eigen::VectorXd success_prob;
};

/// Either the null assignment or a task index.
class Assignment {
 public:
  constexpr Assignment() = default;

  static constexpr Assignment null() { return Assignment{}; }
  static constexpr Assignment task(int task_id) {
    if (task_id < 0) throw std::invalid_argument("Assignment: negative task id");
    Assignment a;
    a.task_ = task_id;
    return a;
  }

  constexpr bool is_null() const { return task_ < 0; }
  constexpr int task_id() const { return task_; }

  // Dense slot index: 0 for null, task_id + 1 otherwise.
  constexpr int slot() const { return task_ + 1; }
  static constexpr Assignment from_slot(int slot) {
    return slot == 0 ? null() : task(slot - 1);
  }

  friend constexpr bool operator==(Assignment, Assignment) = default;
  friend constexpr auto operator<=>(Assignment, Assignment) = default;

 private:
  int task_ = -1;
};

/// The joint action: one assignment per agent.
class AssignmentProfile {
 public:
  AssignmentProfile() = default;
  explicit AssignmentProfile(std::size_t num_agents) : assignments_(num_agents) {}
  explicit AssignmentProfile(std::vector<Assignment> assignments)
      : assignments_(std::move(assignments)) {}

  std::size_t size() const { return assignments_.size(); }
  Assignment operator[](std::size_t i) const { return assignments_[i]; }
  Assignment& operator[](std::size_t i) { return assignments_[i]; }

  /// Copy with agent i's assignment replaced.
  AssignmentProfile with(std::size_t i, Assignment a) const {
    AssignmentProfile out = *this;
    out.assignments_.at(i) = a;
    return out;
  }

  auto begin() const { return assignments_.begin(); }
  auto end() const { return assignments_.end(); }
  std::span<const Assignment> view() const { return assignments_; }

  friend bool operator==(const AssignmentProfile&, const AssignmentProfile&) = default;

 private:
  std::vector<Assignment> assignments_;
};

/// Problem instance: initial agent states, tasks, common final time and the
/// optional assignment range (nullopt means unbounded).
struct Scenario {
  std::vector<AgentState> agents;
  std::vector<Task> tasks;
  double final_time = 1.0;
  std::optional<double> range;

  int num_agents() const { return static_cast<int>(agents.size()); }
  int num_tasks() const { return static_cast<int>(tasks.size()); }
};

/// Throws std::invalid_argument if any scenario invariant is violated.
void validate(const Scenario& scenario);

/// Throws std::invalid_argument unless the profile has one entry per agent
/// and every task index is in range.
void validate(const Scenario& scenario, const AssignmentProfile& profile);

/// Feasible assignments for an agent at the given state, null first then
/// task ids ascending. Range is measured between positions only.
std::vector<Assignment> action_set(const Scenario& scenario, const AgentState& state);

/// Indices of the agents assigned to task_id, ascending.
std::vector<int> assigned_agents(const Scenario& scenario, const AssignmentProfile& profile,
                                 int task_id);

}  // namespace taskgame
