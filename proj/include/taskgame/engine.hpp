#pragma once

#include "taskgame/core.hpp"
#include "taskgame/negotiation.hpp"
#include "taskgame/utilities.hpp"

#include <functional>
#include <string_view>
#include <vector>

namespace taskgame {

enum class Mode { OLTA, DTA };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view name);

/// Called once per negotiation stage with the game the stage was played on
/// and the profile it produced.
using StageObserver =
    std::function<void(int stage, const GameSnapshot& game, const AssignmentProfile& profile)>;

struct EngineConfig {
  Mode mode = Mode::OLTA;
  double dt = 0.1;
  double epsilon = 0.05;
  int olta_rounds = 100;
  ProtocolParams protocol;
  bool record_states = true;
  StageObserver observer;
};

/// Protocol defaults: dt 0.1 (GRM) or 0.01 (SAP),
/// epsilon = final_time / 20, 100 GRM or 1000 SAP rounds for OLTA.
EngineConfig default_config(Mode mode, Protocol protocol, double final_time,
                            std::uint64_t seed = 0);

void validate(const EngineConfig& config, double final_time);

struct StageRecord {
  double time = 0.0;
  AssignmentProfile profile;
  // Realized-plus-committed team utility: each assigned agent is charged all
  // energy it has spent plus the full cost of its current plan.
  double team_utility = 0.0;
  // Team utility of the profile on the game the stage negotiated against.
  double game_utility = 0.0;
  std::vector<AgentState> states;  // empty unless record_states
};

struct SimulationTrace {
  std::vector<StageRecord> records;
  std::vector<double> negotiation_utilities;  // OLTA: team utility on G^0 after each round
  AssignmentProfile final_profile;
  double final_team_utility = 0.0;
  bool converged = false;
  int freeze_stage = -1;  // DTA only
};

/// Smallest K >= 1 with K * dt > final_time - epsilon.
int freeze_boundary(double final_time, double epsilon, double dt);

/// Negotiate on the initial-state game with the clock paused, then execute
/// the resulting plans open loop.
SimulationTrace solve_olta(const Scenario& scenario, const EngineConfig& config);

/// Negotiate while moving: the game is rebuilt from current states at every
/// stage up to the freeze boundary and held fixed afterwards. Agents whose
/// assignment changes re-plan from their current state over the remaining
/// horizon.
SimulationTrace solve_dta(const Scenario& scenario, const EngineConfig& config);

SimulationTrace simulate(const Scenario& scenario, const EngineConfig& config);

}  // namespace taskgame
