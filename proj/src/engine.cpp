#include "taskgame/engine.hpp"

#include "taskgame/optimal_control.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace taskgame {

std::string_view to_string(Mode mode) { return mode == Mode::OLTA ? "olta" : "dta"; }

Mode parse_mode(std::string_view name) {
  if (name == "olta") return Mode::OLTA;
  if (name == "dta") return Mode::DTA;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

EngineConfig default_config(Mode mode, Protocol protocol, double final_time, std::uint64_t seed) {
  EngineConfig config;
  config.mode = mode;
  config.dt = protocol == Protocol::SAP ? 0.01 : 0.1;
  config.epsilon = final_time / 20.0;
  config.olta_rounds = protocol == Protocol::SAP ? 1000 : 100;
  config.protocol.protocol = protocol;
  config.protocol.rng_seed = seed;
  return config;
}

namespace {

int stage_count(double final_time, double dt) {
  const double ratio = final_time / dt;
  const long long n = std::llround(ratio);
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("final time must be a positive integer multiple of dt");
  return static_cast<int>(n);
}

}  // namespace

void validate(const EngineConfig& config, double final_time) {
  if (!(config.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(config.epsilon > 0.0 && config.epsilon <= final_time))
    throw std::invalid_argument("epsilon must lie in (0, final time]");
  if (config.olta_rounds < 1) throw std::invalid_argument("rounds must be at least 1");
  stage_count(final_time, config.dt);
  validate(config.protocol);
}

int freeze_boundary(double final_time, double epsilon, double dt) {
  // The slack absorbs representation error in (tf - eps) / dt landing on an
  // integer, e.g. 9.5 / 0.1.
  const double last_live = std::floor((final_time - epsilon) / dt + 1e-9);
  return std::max(1, static_cast<int>(last_live) + 1);
}

namespace {

/// Plans and energy bookkeeping for every agent on the stage grid
/// tau_k = k dt, tau_N = tf.
class Fleet {
 public:
  Fleet(const Scenario& scenario, int stages, double dt)
      : scenario_(scenario), stages_(stages), dt_(dt), agents_(scenario.agents.size()) {
    for (std::size_t i = 0; i < agents_.size(); ++i)
      agents_[i].plan = null_plan(scenario.agents[i], scenario.final_time);
  }

  double time(int step) const {
    return step >= stages_ ? scenario_.final_time : static_cast<double>(step) * dt_;
  }
  double remaining(int step) const { return scenario_.final_time - time(step); }

  AgentState state(int i, int step) const {
    const auto& a = agents_[i];
    return propagate(a.plan, time(step) - time(a.start));
  }

  std::vector<AgentState> states(int step) const {
    std::vector<AgentState> out;
    out.reserve(agents_.size());
    for (std::size_t i = 0; i < agents_.size(); ++i) out.push_back(state(static_cast<int>(i), step));
    return out;
  }

  /// Switch agent i to `target` at `step`, banking the energy spent so far.
  void retarget(int i, int step, Assignment target, double min_horizon) {
    auto& a = agents_[i];
    const AgentState here = state(i, step);
    a.banked += energy_spent(a.plan, time(step) - time(a.start));
    a.plan = target.is_null()
                 ? null_plan(here, remaining(step))
                 : solve_ocp(here, scenario_.tasks[target.task_id()], remaining(step), min_horizon);
    a.start = step;
  }

  std::vector<double> committed_costs() const {
    std::vector<double> out;
    out.reserve(agents_.size());
    for (const auto& a : agents_) out.push_back(a.banked + cost_to_go(a.plan));
    return out;
  }

 private:
  struct Agent {
    ControlPlan plan;
    int start = 0;
    double banked = 0.0;
  };
  const Scenario& scenario_;
  int stages_;
  double dt_;
  std::vector<Agent> agents_;
};

StageRecord make_record(const Fleet& fleet, int step, const Scenario& scenario,
                        const GameSnapshot& game, const AssignmentProfile& profile,
                        bool with_states) {
  StageRecord r;
  r.time = fleet.time(step);
  r.profile = profile;
  const auto costs = fleet.committed_costs();
  r.team_utility = team_utility_with_costs(scenario, profile, costs);
  r.game_utility = team_utility(game, profile);
  if (with_states) r.states = fleet.states(step);
  return r;
}

// Horizons on the stage grid can undershoot dt by an ulp.
double effective_min_horizon(double dt) { return dt * (1.0 - 1e-9); }

}  // namespace

SimulationTrace solve_olta(const Scenario& scenario, const EngineConfig& config) {
  validate(scenario);
  validate(config, scenario.final_time);
  const int stages = stage_count(scenario.final_time, config.dt);
  const double min_h = effective_min_horizon(config.dt);

  auto shared = std::make_shared<const Scenario>(scenario);
  const GameSnapshot game(shared, scenario.agents, scenario.final_time, min_h);
  Negotiator negotiator(config.protocol, scenario.num_agents());

  SimulationTrace trace;
  AssignmentProfile profile = negotiator.random_feasible_profile(game);
  trace.negotiation_utilities.reserve(config.olta_rounds);
  for (int round = 0; round < config.olta_rounds; ++round) {
    profile = negotiator.stage_update(game, profile);
    trace.negotiation_utilities.push_back(team_utility(game, profile));
    if (config.observer) config.observer(round, game, profile);
  }

  Fleet fleet(*shared, stages, config.dt);
  for (int i = 0; i < scenario.num_agents(); ++i) fleet.retarget(i, 0, profile[i], min_h);

  trace.records.reserve(stages + 1);
  for (int k = 0; k <= stages; ++k)
    trace.records.push_back(make_record(fleet, k, *shared, game, profile, config.record_states));

  trace.final_profile = profile;
  trace.final_team_utility = trace.records.back().team_utility;
  trace.converged = exhaustive_nash_check(game, profile);
  return trace;
}

SimulationTrace solve_dta(const Scenario& scenario, const EngineConfig& config) {
  validate(scenario);
  validate(config, scenario.final_time);
  const int stages = stage_count(scenario.final_time, config.dt);
  const int freeze = freeze_boundary(scenario.final_time, config.epsilon, config.dt);
  const double min_h = effective_min_horizon(config.dt);

  auto shared = std::make_shared<const Scenario>(scenario);
  Negotiator negotiator(config.protocol, scenario.num_agents());
  Fleet fleet(*shared, stages, config.dt);

  auto game = std::make_shared<const GameSnapshot>(shared, scenario.agents, scenario.final_time, min_h);
  AssignmentProfile profile = negotiator.random_feasible_profile(*game);
  for (int i = 0; i < scenario.num_agents(); ++i) fleet.retarget(i, 0, profile[i], min_h);

  SimulationTrace trace;
  trace.freeze_stage = freeze;
  trace.records.reserve(stages + 1);
  for (int k = 0; k < stages; ++k) {
    // Past the freeze boundary the game built at stage K is reused as is.
    if (k > 0 && k <= freeze)
      game = std::make_shared<const GameSnapshot>(shared, fleet.states(k), fleet.remaining(k), min_h);

    AssignmentProfile proposal = negotiator.stage_update(*game, profile);
    for (int i = 0; i < scenario.num_agents(); ++i) {
      if (proposal[i] == profile[i]) continue;
      if (fleet.remaining(k) < min_h) {
        proposal[i] = profile[i];
        continue;
      }
      fleet.retarget(i, k, proposal[i], min_h);
    }
    profile = std::move(proposal);
    if (config.observer) config.observer(k, *game, profile);
    trace.records.push_back(make_record(fleet, k, *shared, *game, profile, config.record_states));
  }
  trace.records.push_back(make_record(fleet, stages, *shared, *game, profile, config.record_states));

  trace.final_profile = profile;
  trace.final_team_utility = trace.records.back().team_utility;

  const double tail_start = scenario.final_time - config.epsilon / 2.0;
  trace.converged = true;
  for (const auto& r : trace.records)
    if (r.time >= tail_start - 1e-12 && r.profile != profile) trace.converged = false;
  return trace;
}

SimulationTrace simulate(const Scenario& scenario, const EngineConfig& config) {
  return config.mode == Mode::OLTA ? solve_olta(scenario, config) : solve_dta(scenario, config);
}

}  // namespace taskgame
