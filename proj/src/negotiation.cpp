#include "taskgame/negotiation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace taskgame {

std::string_view to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::GRM: return "grm";
    case Protocol::SAP: return "sap";
    case Protocol::BetterReply: return "br";
  }
  return "?";
}

Protocol parse_protocol(std::string_view name) {
  if (name == "grm") return Protocol::GRM;
  if (name == "sap") return Protocol::SAP;
  if (name == "br") return Protocol::BetterReply;
  throw std::invalid_argument("unknown protocol '" + std::string(name) + "'");
}

void validate(const ProtocolParams& params) {
  if (!(params.discount > 0.0 && params.discount <= 1.0))
    throw std::invalid_argument("discount must lie in (0, 1]");
  if (!(params.inertia > 0.0 && params.inertia < 1.0))
    throw std::invalid_argument("inertia must lie in (0, 1)");
  if (!params.temperature) throw std::invalid_argument("temperature schedule missing");
}

// RegretTable

bool RegretTable::contains(Assignment a) const {
  const auto s = static_cast<std::size_t>(a.slot());
  return s < present_.size() && present_[s];
}

double RegretTable::value(Assignment a) const { return contains(a) ? values_[a.slot()] : 0.0; }

void RegretTable::set(Assignment a, double regret) {
  const auto s = static_cast<std::size_t>(a.slot());
  if (s >= values_.size()) {
    values_.resize(s + 1, 0.0);
    present_.resize(s + 1, false);
  }
  values_[s] = regret;
  present_[s] = true;
}

void RegretTable::retain(std::span<const Assignment> feasible, Assignment keep) {
  std::vector<bool> wanted(present_.size(), false);
  for (Assignment a : feasible)
    if (static_cast<std::size_t>(a.slot()) < wanted.size()) wanted[a.slot()] = true;
  if (static_cast<std::size_t>(keep.slot()) < wanted.size()) wanted[keep.slot()] = true;
  for (std::size_t s = 0; s < present_.size(); ++s) {
    if (!wanted[s]) {
      present_[s] = false;
      values_[s] = 0.0;
    }
  }
}

std::size_t RegretTable::size() const {
  return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), true));
}

// AgentView

bool AgentView::feasible(Assignment a) const {
  const auto& acts = actions();
  return std::binary_search(acts.begin(), acts.end(), a);
}

double AgentView::utility(Assignment candidate) const {
  if (audit_) {
    ++audit_->queries;
    if (audit_->active_agent != agent_) ++audit_->cross_agent_queries;
  }
  return deviation_utility(*snapshot_, *roster_, agent_, candidate);
}

// Update rules

Assignment grm_step(const AgentView& view, AgentMemory& memory, const ProtocolParams& params,
                    Rng& rng) {
  const auto& actions = view.actions();
  const double current = view.utility(view.current());
  memory.regrets.retain(actions, memory.last_assignment);

  const double rho = params.discount;
  for (Assignment a : actions) {
    const double instantaneous = view.utility(a) - current;
    memory.regrets.set(a, (1.0 - rho) * memory.regrets.value(a) + rho * instantaneous);
  }

  if (rng.uniform() >= params.inertia) return view.stay();

  double total = 0.0;
  for (Assignment a : actions) total += std::max(0.0, memory.regrets.value(a));
  if (!(total > 0.0)) return view.stay();

  double u = rng.uniform() * total;
  Assignment last_positive = view.stay();
  for (Assignment a : actions) {
    const double w = std::max(0.0, memory.regrets.value(a));
    if (w <= 0.0) continue;
    last_positive = a;
    if (u < w) return a;
    u -= w;
  }
  return last_positive;
}

Assignment sap_step(const AgentView& view, double temperature, Rng& rng) {
  const auto& actions = view.actions();
  std::vector<double> utils(actions.size());
  for (std::size_t k = 0; k < actions.size(); ++k) utils[k] = view.utility(actions[k]);
  const double best = *std::max_element(utils.begin(), utils.end());

  std::vector<double> weights(actions.size(), 0.0);
  double total = 0.0;
  if (temperature > 0.0 && std::isfinite(temperature)) {
    for (std::size_t k = 0; k < actions.size(); ++k) {
      weights[k] = std::exp((utils[k] - best) / temperature);
      total += weights[k];
    }
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    // Argmax, uniform among ties.
    total = 0.0;
    for (std::size_t k = 0; k < actions.size(); ++k) {
      weights[k] = utils[k] >= best - kImprovementTolerance ? 1.0 : 0.0;
      total += weights[k];
    }
  }

  double u = rng.uniform() * total;
  for (std::size_t k = 0; k < actions.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    if (u < weights[k]) return actions[k];
    u -= weights[k];
  }
  // Rounding left u just past the last positive weight.
  for (std::size_t k = actions.size(); k-- > 0;)
    if (weights[k] > 0.0) return actions[k];
  return view.stay();
}

Assignment better_reply_step(const AgentView& view) {
  const Assignment stay = view.stay();
  double best_value = view.utility(stay);
  Assignment best = stay;
  for (Assignment a : view.actions()) {
    const double v = view.utility(a);
    if (v > best_value + kImprovementTolerance) {
      best_value = v;
      best = a;
    }
  }
  return best;
}

// Negotiator

Negotiator::Negotiator(ProtocolParams params, int num_agents)
    : params_(std::move(params)),
      memories_(num_agents),
      init_rng_(Rng::substream(params_.rng_seed, "initial-profile")),
      rng_(Rng::substream(params_.rng_seed, "protocol")) {
  validate(params_);
}

AssignmentProfile Negotiator::random_feasible_profile(const GameSnapshot& snapshot) {
  AssignmentProfile profile(static_cast<std::size_t>(snapshot.num_agents()));
  for (int i = 0; i < snapshot.num_agents(); ++i) {
    const auto& actions = snapshot.action_set(i);
    profile[i] = actions[init_rng_.index(actions.size())];
    memories_[i].last_assignment = profile[i];
  }
  return profile;
}

AssignmentProfile Negotiator::stage_update(const GameSnapshot& snapshot,
                                           const AssignmentProfile& profile, QueryAudit* audit) {
  const int n = snapshot.num_agents();
  if (static_cast<int>(profile.size()) != n || static_cast<int>(memories_.size()) != n)
    throw std::invalid_argument("stage_update: profile/memory length mismatch");
  ++stage_;

  AssignmentProfile next = profile;
  auto view_of = [&](const TaskRoster& roster, const AssignmentProfile& p, int i) {
    if (audit) audit->active_agent = i;
    return AgentView(snapshot, roster, p[i], i, audit);
  };

  switch (params_.protocol) {
    case Protocol::GRM: {
      const TaskRoster roster(profile, snapshot.num_tasks());
      for (int i = 0; i < n; ++i) {
        memories_[i].last_assignment = profile[i];
        next[i] = grm_step(view_of(roster, profile, i), memories_[i], params_, rng_);
      }
      break;
    }
    case Protocol::SAP: {
      const int i = static_cast<int>(rng_.index(static_cast<std::uint64_t>(n)));
      const TaskRoster roster(profile, snapshot.num_tasks());
      next[i] = sap_step(view_of(roster, profile, i), params_.temperature(stage_), rng_);
      break;
    }
    case Protocol::BetterReply: {
      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      for (int k = n - 1; k > 0; --k)
        std::swap(order[k], order[rng_.index(static_cast<std::uint64_t>(k) + 1)]);
      for (int i : order) {
        const TaskRoster roster(next, snapshot.num_tasks());
        next[i] = better_reply_step(view_of(roster, next, i));
      }
      break;
    }
  }
  if (audit) audit->active_agent = -1;

  for (int i = 0; i < n; ++i) {
    memories_[i].last_assignment = next[i];
    memories_[i].stage_index = stage_;
  }
  return next;
}

}  // namespace taskgame
