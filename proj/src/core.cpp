#include "taskgame/core.hpp"

#include <cmath>
#include <string>

namespace taskgame {

namespace {

bool finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

void fail(const std::string& what) { throw std::invalid_argument("scenario: " + what); }

}  // namespace

void validate(const Scenario& scenario) {
  const int n = scenario.num_agents();
  const int p = scenario.num_tasks();
  if (n < 1) fail("at least one agent required");
  if (p < 1) fail("at least one task required");
  if (!(scenario.final_time > 0.0) || !std::isfinite(scenario.final_time))
    fail("final time must be positive");
  if (scenario.range && !(*scenario.range > 0.0)) fail("range must be positive when bounded");

  for (int i = 0; i < n; ++i) {
    const auto& a = scenario.agents[i];
    if (a.agent_id != i) fail("agent ids must be 0..n-1 in order");
    if (!finite(a.position) || !finite(a.velocity)) fail("non-finite agent state");
  }
  for (int j = 0; j < p; ++j) {
    const auto& t = scenario.tasks[j];
    if (t.task_id != j) fail("task ids must be 0..p-1 in order");
    if (!finite(t.target_position)) fail("non-finite task position");
    if (!(t.nominal_reward >= 0.0) || !std::isfinite(t.nominal_reward))
      fail("nominal reward must be nonnegative");
    if (t.success_prob.size() != n) fail("success_prob must have one entry per agent");
    for (int i = 0; i < n; ++i) {
      const double q = t.success_prob[i];
      if (!(q >= 0.0 && q <= 1.0)) fail("success probability outside [0,1]");
    }
  }
}

void validate(const Scenario& scenario, const AssignmentProfile& profile) {
  if (profile.size() != scenario.agents.size())
    throw std::invalid_argument("profile length does not match agent count");
  for (Assignment a : profile) {
    if (!a.is_null() && a.task_id() >= scenario.num_tasks())
      throw std::invalid_argument("profile references unknown task");
  }
}

std::vector<Assignment> action_set(const Scenario& scenario, const AgentState& state) {
  std::vector<Assignment> actions;
  actions.reserve(scenario.tasks.size() + 1);
  actions.push_back(Assignment::null());
  for (const auto& task : scenario.tasks) {
    if (!scenario.range || (task.target_position - state.position).norm() <= *scenario.range)
      actions.push_back(Assignment::task(task.task_id));
  }
  return actions;
}

std::vector<int> assigned_agents(const Scenario& scenario, const AssignmentProfile& profile,
                                 int task_id) {
  if (task_id < 0 || task_id >= scenario.num_tasks())
    throw std::out_of_range("assigned_agents: task id out of range");
  std::vector<int> members;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i] == Assignment::task(task_id)) members.push_back(static_cast<int>(i));
  }
  return members;
}

}  // namespace taskgame
