#pragma once

#include "taskgame/core.hpp"
#include "taskgame/random.hpp"
#include "taskgame/utilities.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace taskgame {

enum class Protocol { GRM, SAP, BetterReply };

std::string_view to_string(Protocol protocol);
/// Accepts "grm", "sap" and "br" (case-sensitive).
Protocol parse_protocol(std::string_view name);

/// Randomization level for log-linear learning at stage k >= 1.
using TemperatureSchedule = std::function<double(int)>;

inline double default_temperature(int k) { return 10.0 / (static_cast<double>(k) * k); }

struct ProtocolParams {
  Protocol protocol = Protocol::GRM;
  double discount = 0.1;  // regret discount, in (0, 1]
  double inertia = 0.5;   // willingness to optimize, in (0, 1)
  TemperatureSchedule temperature = default_temperature;
  std::uint64_t rng_seed = 0;
};

void validate(const ProtocolParams& params);

/// Discounted regrets keyed by assignment.
class RegretTable {
 public:
  bool contains(Assignment a) const;
  double value(Assignment a) const;  // 0 when absent
  void set(Assignment a, double regret);

  /// Drops every entry not in `feasible` and not equal to `keep`.
  void retain(std::span<const Assignment> feasible, Assignment keep);
  std::size_t size() const;

 private:
  std::vector<double> values_;
  std::vector<bool> present_;
};

/// Per-agent information carried between negotiation stages.
struct AgentMemory {
  Assignment last_assignment;
  RegretTable regrets;
  int stage_index = 0;
};

/// Test shim: counts utility evaluations made while an agent is updating,
/// and how many of them were for some other agent's utility.
struct QueryAudit {
  std::size_t queries = 0;
  std::size_t cross_agent_queries = 0;
  int active_agent = -1;
};

/// What agent i may see during its update: its own utility for each
/// candidate against the public profile, and its action set.
class AgentView {
 public:
  AgentView(const GameSnapshot& snapshot, const TaskRoster& roster, Assignment current, int agent,
            QueryAudit* audit = nullptr)
      : snapshot_(&snapshot), roster_(&roster), current_(current), agent_(agent), audit_(audit) {}

  int agent() const { return agent_; }
  Assignment current() const { return current_; }
  const std::vector<Assignment>& actions() const { return snapshot_->action_set(agent_); }
  bool feasible(Assignment a) const;

  /// U_i(candidate, a_-i).
  double utility(Assignment candidate) const;

  /// Current assignment if still feasible, null otherwise.
  Assignment stay() const { return feasible(current_) ? current_ : Assignment::null(); }

 private:
  const GameSnapshot* snapshot_;
  const TaskRoster* roster_;
  Assignment current_;
  int agent_;
  QueryAudit* audit_;
};

/// Discounted regret matching with inertia. Updates the agent's regrets for
/// every feasible action, then with probability 1 - inertia repeats its
/// action; otherwise samples an action proportionally to positive regret.
Assignment grm_step(const AgentView& view, AgentMemory& memory, const ProtocolParams& params,
                    Rng& rng);

/// Log-linear choice: P(a) proportional to exp(U_i(a) / temperature).
/// Falls back to a uniformly tie-broken argmax when the temperature is not
/// a positive finite number.
Assignment sap_step(const AgentView& view, double temperature, Rng& rng);

/// Best reply if it strictly improves on the current assignment.
Assignment better_reply_step(const AgentView& view);

/// Runs the negotiation protocol one stage at a time. Holds each agent's
/// memory and the protocol random stream.
///
/// GRM updates every agent simultaneously. SAP updates one uniformly chosen
/// agent. BetterReply sweeps the agents in a random order, each replying to
/// the profile as updated so far.
class Negotiator {
 public:
  Negotiator(ProtocolParams params, int num_agents);

  /// Each agent draws uniformly from its action set.
  AssignmentProfile random_feasible_profile(const GameSnapshot& snapshot);

  AssignmentProfile stage_update(const GameSnapshot& snapshot, const AssignmentProfile& profile,
                                 QueryAudit* audit = nullptr);

  std::span<const AgentMemory> memories() const { return memories_; }
  int stage_index() const { return stage_; }
  const ProtocolParams& params() const { return params_; }

 private:
  ProtocolParams params_;
  std::vector<AgentMemory> memories_;
  Rng init_rng_;
  Rng rng_;
  int stage_ = 0;
};

}  // namespace taskgame
