#include "fixtures.hpp"

#include "checks/checks.hpp"
#include "taskgame/negotiation.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

using namespace taskgame;
using doctest::Approx;
using fixtures::agent;
using fixtures::profile;
using fixtures::task;

namespace {

// One agent at rest on task 0 (utility r0) and far from task 1.
GameSnapshot one_agent_game(double r0, double r1) {
  Scenario s;
  s.agents = {agent(0, {0, 0})};
  s.tasks = {task(0, {0, 0}, r0, {1.0}), task(1, {0, 0}, r1, {1.0})};
  s.final_time = 1;
  return GameSnapshot::initial(fixtures::share(s));
}

double frequency(int samples, const std::function<bool()>& event) {
  int hits = 0;
  for (int k = 0; k < samples; ++k) hits += event() ? 1 : 0;
  return static_cast<double>(hits) / samples;
}

}  // namespace

TEST_CASE("protocol names") {
  CHECK(parse_protocol("grm") == Protocol::GRM);
  CHECK(parse_protocol("sap") == Protocol::SAP);
  CHECK(parse_protocol("br") == Protocol::BetterReply);
  CHECK(to_string(Protocol::SAP) == "sap");
  CHECK_THROWS_AS(parse_protocol("GRM"), std::invalid_argument);
}

TEST_CASE("parameter validation") {
  ProtocolParams p;
  CHECK_NOTHROW(validate(p));
  p.discount = 0;
  CHECK_THROWS(validate(p));
  p = {};
  p.inertia = 1;
  CHECK_THROWS(validate(p));
  p = {};
  p.temperature = nullptr;
  CHECK_THROWS(validate(p));
}

TEST_CASE("regret table") {
  RegretTable t;
  CHECK(t.value(Assignment::task(3)) == 0);
  t.set(Assignment::null(), -1);
  t.set(Assignment::task(3), 2);
  t.set(Assignment::task(5), 4);
  CHECK(t.size() == 3);
  const std::vector<Assignment> feasible{Assignment::null(), Assignment::task(3)};
  t.retain(feasible, Assignment::task(7));
  CHECK(t.size() == 2);
  CHECK_FALSE(t.contains(Assignment::task(5)));
  CHECK(t.value(Assignment::task(3)) == 2);
}

TEST_CASE("better reply leaves an equilibrium unchanged") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Scenario s = checks::small_random_scenario(seed, 4, 4);
    const GameSnapshot g = GameSnapshot::initial(fixtures::share(s));
    ProtocolParams params;
    params.protocol = Protocol::BetterReply;
    params.rng_seed = seed;
    Negotiator neg(params, s.num_agents());
    AssignmentProfile p = neg.random_feasible_profile(g);
    for (int k = 0; k < 50 && !exhaustive_nash_check(g, p); ++k) p = neg.stage_update(g, p);
    REQUIRE(exhaustive_nash_check(g, p));
    CHECK(neg.stage_update(g, p) == p);
  }
}

TEST_CASE("log-linear choice") {
  Rng rng(11);

  SUBCASE("Boltzmann probabilities") {
    const GameSnapshot g = one_agent_game(1.0, 0.0);
    // Utilities: null 0, task 0 1, task 1 0.
    const auto p = profile({-1});
    const TaskRoster roster(p, 2);
    const AgentView view(g, roster, p[0], 0);
    const double f = frequency(40000, [&] { return sap_step(view, 0.5, rng) == Assignment::task(0); });
    const double e2 = std::exp(2.0);
    CHECK(f == Approx(e2 / (e2 + 2.0)).epsilon(0.01));
  }
  SUBCASE("equal utilities give a uniform choice") {
    const GameSnapshot g = one_agent_game(0.0, 0.0);
    const auto p = profile({-1});
    const TaskRoster roster(p, 2);
    const AgentView view(g, roster, p[0], 0);
    const double f = frequency(30000, [&] { return sap_step(view, 0.5, rng) == Assignment::task(1); });
    CHECK(f == Approx(1.0 / 3.0).epsilon(0.03));
  }
  SUBCASE("large temperature approaches uniform") {
    const GameSnapshot g = one_agent_game(1.0, 0.0);
    const auto p = profile({-1});
    const TaskRoster roster(p, 2);
    const AgentView view(g, roster, p[0], 0);
    const double f = frequency(30000, [&] { return sap_step(view, 1e6, rng) == Assignment::task(0); });
    CHECK(f == Approx(1.0 / 3.0).epsilon(0.03));
  }
  SUBCASE("vanishing temperature selects the argmax") {
    const GameSnapshot g = one_agent_game(1.0, 0.5);
    const auto p = profile({1});
    const TaskRoster roster(p, 2);
    const AgentView view(g, roster, p[0], 0);
    for (double tau : {1e-6, 0.0, std::numeric_limits<double>::infinity()})
      CHECK(frequency(200, [&] { return sap_step(view, tau, rng) == Assignment::task(0); }) == 1.0);
  }
}

TEST_CASE("two-action log-linear probabilities") {
  // The range leaves {null, task 0} with utilities (0, 1).
  Scenario s;
  s.agents = {agent(0, {0, 0})};
  s.tasks = {task(0, {0, 0}, 1.0, {1.0}), task(1, {5, 5}, 1.0, {1.0})};
  s.final_time = 1;
  s.range = 1.0;
  const GameSnapshot g = GameSnapshot::initial(fixtures::share(s));
  const auto p = profile({-1});
  const TaskRoster roster(p, 2);
  const AgentView view(g, roster, p[0], 0);
  REQUIRE(view.actions().size() == 2);
  Rng rng(5);
  const double f = frequency(40000, [&] { return sap_step(view, 0.5, rng) == Assignment::task(0); });
  CHECK(f == Approx(0.881).epsilon(0.01));
}

TEST_CASE("regret matching") {
  Rng rng(3);
  ProtocolParams params;

  SUBCASE("non-positive regrets repeat the last assignment") {
    const GameSnapshot g = one_agent_game(1.0, 0.5);
    const auto p = profile({0});
    const TaskRoster roster(p, 2);
    const AgentView view(g, roster, p[0], 0);
    AgentMemory memory{p[0], {}, 0};
    for (int k = 0; k < 500; ++k) CHECK(grm_step(view, memory, params, rng) == Assignment::task(0));
    CHECK(memory.regrets.value(Assignment::null()) < 0);
  }
  SUBCASE("equal utilities: regrets decay and the action repeats") {
    const GameSnapshot g = one_agent_game(0.0, 0.0);
    const auto p = profile({1});
    const TaskRoster roster(p, 2);
    const AgentView view(g, roster, p[0], 0);
    AgentMemory memory{p[0], {}, 0};
    memory.regrets.set(Assignment::task(0), -0.5);
    for (int k = 0; k < 100; ++k) CHECK(grm_step(view, memory, params, rng) == Assignment::task(1));
    CHECK(std::abs(memory.regrets.value(Assignment::task(0))) < 1e-4);
  }
  SUBCASE("full discount stores instantaneous regrets") {
    params.discount = 1.0;
    const GameSnapshot g = one_agent_game(1.0, 0.25);
    const auto p = profile({1});
    const TaskRoster roster(p, 2);
    const AgentView view(g, roster, p[0], 0);
    AgentMemory memory{p[0], {}, 0};
    memory.regrets.set(Assignment::task(0), 42.0);
    grm_step(view, memory, params, rng);
    CHECK(memory.regrets.value(Assignment::null()) == Approx(-0.25));
    CHECK(memory.regrets.value(Assignment::task(0)) == Approx(0.75));
    CHECK(memory.regrets.value(Assignment::task(1)) == 0);
  }
  SUBCASE("a single dominant action is taken with the inertia probability") {
    params.discount = 1.0;
    const GameSnapshot g = one_agent_game(1.0, 0.0);
    const auto p = profile({-1});
    const TaskRoster roster(p, 2);
    const AgentView view(g, roster, p[0], 0);
    const double f = frequency(40000, [&] {
      AgentMemory memory{p[0], {}, 0};
      return grm_step(view, memory, params, rng) == Assignment::task(0);
    });
    CHECK(f == Approx(params.inertia).epsilon(0.02));
  }
}

TEST_CASE("negotiator determinism and feasibility") {
  const Scenario s = generate_scenario(12, 9, 2.0, 0.3, 77);
  const GameSnapshot g = GameSnapshot::initial(fixtures::share(s));
  for (Protocol protocol : {Protocol::GRM, Protocol::SAP, Protocol::BetterReply}) {
    ProtocolParams params;
    params.protocol = protocol;
    params.rng_seed = 123;
    Negotiator a(params, s.num_agents());
    Negotiator b(params, s.num_agents());
    AssignmentProfile pa = a.random_feasible_profile(g);
    AssignmentProfile pb = b.random_feasible_profile(g);
    CHECK(pa == pb);
    for (int k = 0; k < 60; ++k) {
      pa = a.stage_update(g, pa);
      pb = b.stage_update(g, pb);
      REQUIRE(pa == pb);
      for (int i = 0; i < s.num_agents(); ++i) {
        const auto& acts = g.action_set(i);
        CHECK(std::find(acts.begin(), acts.end(), pa[i]) != acts.end());
      }
    }
    CHECK(a.stage_index() == 60);
  }
}

TEST_CASE("agents only query their own utility") {
  const Scenario s = generate_scenario(10, 10, 5.0, std::nullopt, 9);
  const GameSnapshot g = GameSnapshot::initial(fixtures::share(s));
  for (Protocol protocol : {Protocol::GRM, Protocol::SAP, Protocol::BetterReply}) {
    ProtocolParams params;
    params.protocol = protocol;
    Negotiator neg(params, s.num_agents());
    AssignmentProfile p = neg.random_feasible_profile(g);
    QueryAudit audit;
    for (int k = 0; k < 20; ++k) p = neg.stage_update(g, p, &audit);
    CHECK(audit.queries > 0);
    CHECK(audit.cross_agent_queries == 0);
  }
}
