#include "fixtures.hpp"

#include "taskgame/engine.hpp"
#include "taskgame/harness.hpp"

#include <doctest.h>

#include <cmath>

using namespace taskgame;
using doctest::Approx;
using fixtures::agent;
using fixtures::task;

TEST_CASE("freeze boundary") {
  CHECK(freeze_boundary(10, 0.5, 0.1) == 96);
  CHECK(freeze_boundary(2, 0.1, 0.1) == 20);
  CHECK(freeze_boundary(5, 5, 0.1) == 1);
  CHECK(freeze_boundary(2, 0.1, 0.01) == 191);
}

TEST_CASE("default configuration") {
  const auto grm = default_config(Mode::DTA, Protocol::GRM, 10);
  CHECK(grm.dt == 0.1);
  CHECK(grm.epsilon == Approx(0.5));
  CHECK(grm.olta_rounds == 100);
  const auto sap = default_config(Mode::OLTA, Protocol::SAP, 2);
  CHECK(sap.dt == 0.01);
  CHECK(sap.olta_rounds == 1000);

  auto bad = grm;
  bad.dt = 0.3;
  CHECK_THROWS_AS(validate(bad, 10), std::invalid_argument);
  bad = grm;
  bad.epsilon = 11;
  CHECK_THROWS_AS(validate(bad, 10), std::invalid_argument);
}

TEST_CASE("a lone agent lands on its only task") {
  Scenario s;
  s.agents = {agent(0, {0.1, 0.2}, {0.05, -0.03})};
  s.tasks = {task(0, {0.6, 0.4}, 1.0, {0.9})};
  s.final_time = 2;
  for (Mode mode : {Mode::OLTA, Mode::DTA}) {
    for (Protocol protocol : {Protocol::GRM, Protocol::SAP, Protocol::BetterReply}) {
      CAPTURE(to_string(mode));
      CAPTURE(to_string(protocol));
      const auto trace = simulate(s, default_config(mode, protocol, s.final_time, 4));
      CHECK(trace.final_profile[0] == Assignment::task(0));
      const AgentState& end = trace.records.back().states[0];
      CHECK((end.position - s.tasks[0].target_position).norm() < 1e-6);
      CHECK(end.velocity.norm() < 1e-6);
    }
  }
}

TEST_CASE("agents resting on distinct tasks keep them at no cost") {
  Scenario s;
  s.agents = {agent(0, {0.1, 0.1}), agent(1, {0.8, 0.3}), agent(2, {0.4, 0.9})};
  s.tasks = {task(0, {0.1, 0.1}, 0.5, {1, 0, 0}), task(1, {0.8, 0.3}, 0.3, {0, 1, 0}),
             task(2, {0.4, 0.9}, 0.7, {0, 0, 1})};
  s.final_time = 2;
  for (Mode mode : {Mode::OLTA, Mode::DTA}) {
    const auto trace = simulate(s, default_config(mode, Protocol::BetterReply, s.final_time, 1));
    for (int i = 0; i < 3; ++i) CHECK(trace.final_profile[i] == Assignment::task(i));
    CHECK(trace.final_team_utility == Approx(1.5));
    for (const auto& r : trace.records)
      for (int i = 0; i < 3; ++i) {
        CHECK(r.states[i].position == s.agents[i].position);
        CHECK(r.states[i].velocity.norm() == 0);
      }
  }
}

TEST_CASE("costly tasks leave everyone unassigned") {
  Scenario s;
  s.agents = {agent(0, {0, 0}), agent(1, {0, 1})};
  s.tasks = {task(0, {1, 1}, 0.01, {1, 1}), task(1, {1, 0}, 0.01, {1, 1})};
  s.final_time = 1;
  for (Mode mode : {Mode::OLTA, Mode::DTA}) {
    const auto trace = simulate(s, default_config(mode, Protocol::GRM, s.final_time, 8));
    // Every action ties at zero, so the protocols need not move off the start.
    CHECK(trace.final_team_utility == 0);
    CHECK(exhaustive_nash_check(GameSnapshot::initial(fixtures::share(s)), trace.final_profile));
  }
}

TEST_CASE("trace shape") {
  const Scenario s = generate_scenario(10, 10, 2.0, std::nullopt, 3);
  for (Protocol protocol : {Protocol::GRM, Protocol::SAP}) {
    const auto config = default_config(Mode::DTA, protocol, s.final_time, 3);
    const auto trace = solve_dta(s, config);
    const int stages = static_cast<int>(std::lround(s.final_time / config.dt));
    REQUIRE(trace.records.size() == static_cast<std::size_t>(stages + 1));
    CHECK(trace.records.front().time == 0);
    CHECK(trace.records.back().time == s.final_time);
    for (std::size_t k = 1; k < trace.records.size(); ++k)
      CHECK(trace.records[k].time > trace.records[k - 1].time);
    CHECK(trace.freeze_stage == freeze_boundary(s.final_time, config.epsilon, config.dt));
  }
}

TEST_CASE("open-loop value is preserved by execution") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Scenario s = generate_scenario(15, 12, 5.0, 0.3, seed);
    const auto trace = solve_olta(s, default_config(Mode::OLTA, Protocol::GRM, s.final_time, seed));
    const GameSnapshot g0 = GameSnapshot::initial(fixtures::share(s));
    CHECK(trace.final_team_utility == Approx(team_utility(g0, trace.final_profile)).epsilon(1e-12));
    CHECK(trace.negotiation_utilities.size() == 100);
    for (const auto& r : trace.records) CHECK(r.profile == trace.final_profile);
  }
}

TEST_CASE("assigned agents land at the final time") {
  const Scenario s = generate_scenario(20, 20, 5.0, std::nullopt, 21);
  for (Mode mode : {Mode::OLTA, Mode::DTA}) {
    const auto trace = simulate(s, default_config(mode, Protocol::GRM, s.final_time, 21));
    const auto& end = trace.records.back().states;
    for (int i = 0; i < s.num_agents(); ++i) {
      const Assignment a = trace.final_profile[i];
      if (a.is_null()) continue;
      CHECK((end[i].position - s.tasks[a.task_id()].target_position).norm() < 1e-6);
      CHECK(end[i].velocity.norm() < 1e-6);
    }
  }
}

TEST_CASE("reruns are bit-identical") {
  const Scenario s = generate_scenario(12, 10, 2.0, 0.3, 5);
  for (Protocol protocol : {Protocol::GRM, Protocol::SAP}) {
    const auto config = default_config(Mode::DTA, protocol, s.final_time, 17);
    const auto a = solve_dta(s, config);
    const auto b = solve_dta(s, config);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t k = 0; k < a.records.size(); ++k) {
      CHECK(a.records[k].profile == b.records[k].profile);
      CHECK(a.records[k].team_utility == b.records[k].team_utility);
    }
  }
}

TEST_CASE("the frozen game is reused after the boundary") {
  const Scenario s = generate_scenario(10, 10, 10.0, std::nullopt, 2);
  auto config = default_config(Mode::DTA, Protocol::GRM, s.final_time, 2);
  const int K = freeze_boundary(s.final_time, config.epsilon, config.dt);
  const GameSnapshot* frozen = nullptr;
  int checked = 0;
  config.observer = [&](int stage, const GameSnapshot& game, const AssignmentProfile&) {
    if (stage == K) frozen = &game;
    if (stage > K) {
      CHECK(&game == frozen);
      ++checked;
    }
  };
  solve_dta(s, config);
  CHECK(checked == 100 - K - 1);
}
