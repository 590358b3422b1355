#include "taskgame/utilities.hpp"

#include "taskgame/optimal_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace taskgame {

GameSnapshot::GameSnapshot(std::shared_ptr<const Scenario> scenario,
                           std::vector<AgentState> agent_states, double horizon,
                           double min_horizon)
    : scenario_(std::move(scenario)),
      states_(std::move(agent_states)),
      horizon_(horizon),
      min_horizon_(min_horizon) {
  if (!scenario_) throw std::invalid_argument("GameSnapshot: null scenario");
  if (static_cast<int>(states_.size()) != scenario_->num_agents())
    throw std::invalid_argument("GameSnapshot: one state per agent required");
  if (!(horizon_ > 0.0) || horizon_ < min_horizon_)
    throw HorizonTooShort("GameSnapshot: horizon below minimum");
  actions_.reserve(states_.size());
  for (const auto& s : states_) actions_.push_back(taskgame::action_set(*scenario_, s));
  costs_ = Eigen::MatrixXd::Constant(num_agents(), num_tasks(),
                                     std::numeric_limits<double>::quiet_NaN());
}

GameSnapshot GameSnapshot::initial(std::shared_ptr<const Scenario> scenario) {
  auto states = scenario->agents;
  const double tf = scenario->final_time;
  return GameSnapshot(std::move(scenario), std::move(states), tf);
}

double GameSnapshot::completion_cost(int agent, int task) const {
  double& c = costs_(agent, task);
  if (std::isnan(c))
    c = taskgame::completion_cost(states_[agent], scenario_->tasks[task], horizon_, min_horizon_);
  return c;
}

void GameSnapshot::populate() const {
  for (int i = 0; i < num_agents(); ++i)
    for (int j = 0; j < num_tasks(); ++j) completion_cost(i, j);
}

TaskRoster::TaskRoster(const AssignmentProfile& profile, int num_tasks)
    : offsets_(num_tasks + 2, 0) {
  // Counting sort on task id.
  for (Assignment a : profile)
    if (!a.is_null()) ++offsets_[a.task_id() + 2];
  for (int j = 2; j < num_tasks + 2; ++j) offsets_[j] += offsets_[j - 1];
  members_.resize(offsets_[num_tasks + 1]);
  for (std::size_t i = 0; i < profile.size(); ++i)
    if (!profile[i].is_null()) members_[offsets_[profile[i].task_id() + 1]++] = static_cast<int>(i);
  offsets_.pop_back();
}

namespace {

// Failure probability product and summed cost of a set of assignees.
struct Coalition {
  double failure = 1.0;
  double cost = 0.0;
  bool empty = true;

  void add(double success_prob, double completion_cost) {
    failure *= 1.0 - success_prob;
    cost += completion_cost;
    empty = false;
  }
  double reward(double nominal) const { return empty ? 0.0 : nominal * (1.0 - failure); }
  double utility(double nominal) const { return std::max(0.0, reward(nominal) - cost); }
};

Coalition coalition(const GameSnapshot& snapshot, std::span<const int> members, int task,
                    int excluded = -1) {
  const Task& t = snapshot.scenario().tasks[task];
  Coalition c;
  for (int i : members)
    if (i != excluded) c.add(t.success_prob[i], snapshot.completion_cost(i, task));
  return c;
}

}  // namespace

double task_reward(const GameSnapshot& snapshot, const AssignmentProfile& profile, int task) {
  const auto members = assigned_agents(snapshot.scenario(), profile, task);
  return coalition(snapshot, members, task).reward(snapshot.scenario().tasks[task].nominal_reward);
}

double task_cost(const GameSnapshot& snapshot, const AssignmentProfile& profile, int task) {
  const auto members = assigned_agents(snapshot.scenario(), profile, task);
  return coalition(snapshot, members, task).cost;
}

double task_utility(const GameSnapshot& snapshot, const AssignmentProfile& profile, int task) {
  const auto members = assigned_agents(snapshot.scenario(), profile, task);
  return coalition(snapshot, members, task).utility(snapshot.scenario().tasks[task].nominal_reward);
}

double team_utility(const GameSnapshot& snapshot, const AssignmentProfile& profile) {
  validate(snapshot.scenario(), profile);
  const TaskRoster roster(profile, snapshot.num_tasks());
  double total = 0.0;
  for (const Task& t : snapshot.scenario().tasks)
    total += coalition(snapshot, roster.members(t.task_id), t.task_id).utility(t.nominal_reward);
  return total;
}

double deviation_utility(const GameSnapshot& snapshot, const TaskRoster& roster, int agent,
                         Assignment candidate) {
  if (candidate.is_null()) return 0.0;
  const int j = candidate.task_id();
  const Task& t = snapshot.scenario().tasks[j];
  Coalition without = coalition(snapshot, roster.members(j), j, agent);
  const double baseline = without.utility(t.nominal_reward);
  without.add(t.success_prob[agent], snapshot.completion_cost(agent, j));
  return without.utility(t.nominal_reward) - baseline;
}

double agent_utility(const GameSnapshot& snapshot, const AssignmentProfile& profile, int agent) {
  validate(snapshot.scenario(), profile);
  const TaskRoster roster(profile, snapshot.num_tasks());
  return deviation_utility(snapshot, roster, agent, profile[agent]);
}

double team_utility_with_costs(const Scenario& scenario, const AssignmentProfile& profile,
                               std::span<const double> agent_costs) {
  validate(scenario, profile);
  if (agent_costs.size() != profile.size())
    throw std::invalid_argument("team_utility_with_costs: one cost per agent required");
  const TaskRoster roster(profile, scenario.num_tasks());
  double total = 0.0;
  for (const Task& t : scenario.tasks) {
    Coalition c;
    for (int i : roster.members(t.task_id)) c.add(t.success_prob[i], agent_costs[i]);
    total += c.utility(t.nominal_reward);
  }
  return total;
}

bool exhaustive_nash_check(const GameSnapshot& snapshot, const AssignmentProfile& profile) {
  validate(snapshot.scenario(), profile);
  const TaskRoster roster(profile, snapshot.num_tasks());
  for (int i = 0; i < snapshot.num_agents(); ++i) {
    const double current = deviation_utility(snapshot, roster, i, profile[i]);
    for (Assignment a : snapshot.action_set(i)) {
      if (deviation_utility(snapshot, roster, i, a) > current + kImprovementTolerance)
        return false;
    }
  }
  return true;
}

}  // namespace taskgame
