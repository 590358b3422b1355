#include "fixtures.hpp"

#include <doctest.h>

using namespace taskgame;
using fixtures::agent;
using fixtures::task;

namespace {

Scenario line_scenario(std::optional<double> range) {
  Scenario s;
  s.agents = {agent(0, {0, 0})};
  s.tasks = {task(0, {0.2, 0}, 1, {1}), task(1, {0.9, 0}, 1, {1}), task(2, {1, 0}, 1, {1})};
  s.final_time = 2;
  s.range = range;
  return s;
}

}  // namespace

TEST_CASE("assignment ordering puts null first") {
  CHECK(Assignment::null() < Assignment::task(0));
  CHECK(Assignment::task(0) < Assignment::task(3));
  CHECK(Assignment::from_slot(0).is_null());
  CHECK(Assignment::from_slot(4) == Assignment::task(3));
  CHECK_THROWS_AS(Assignment::task(-2), std::invalid_argument);
}

TEST_CASE("action_set") {
  SUBCASE("unbounded range includes every task") {
    const Scenario s = line_scenario(std::nullopt);
    const auto acts = action_set(s, s.agents[0]);
    REQUIRE(acts.size() == 4);
    CHECK(acts[0].is_null());
    for (int j = 0; j < 3; ++j) CHECK(acts[j + 1] == Assignment::task(j));
  }
  SUBCASE("range excludes distant tasks") {
    const Scenario s = line_scenario(0.5);
    const auto acts = action_set(s, s.agents[0]);
    CHECK(acts == std::vector<Assignment>{Assignment::null(), Assignment::task(0)});
  }
  SUBCASE("velocity does not count toward distance") {
    Scenario s = line_scenario(0.5);
    s.agents[0].velocity = {10, 10};
    CHECK(action_set(s, s.agents[0]).size() == 2);
  }
}

TEST_CASE("assigned_agents") {
  Scenario s;
  s.agents = {agent(0, {0, 0}), agent(1, {0, 0}), agent(2, {0, 0})};
  s.tasks = {task(0, {0, 0}, 1, {1, 1, 1}), task(1, {0, 0}, 1, {1, 1, 1})};
  CHECK(assigned_agents(s, fixtures::profile({0, -1, 0}), 0) == std::vector<int>{0, 2});
  CHECK(assigned_agents(s, fixtures::profile({-1, -1, -1}), 0).empty());
  CHECK(assigned_agents(s, fixtures::profile({1, 0, -1}), 1) == std::vector<int>{0});
  CHECK_THROWS_AS(assigned_agents(s, fixtures::profile({1, 0, -1}), 2), std::out_of_range);
}

TEST_CASE("scenario validation") {
  Scenario s = line_scenario(std::nullopt);
  CHECK_NOTHROW(validate(s));
  s.final_time = 0;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s = line_scenario(std::nullopt);
  s.tasks[0].success_prob[0] = 1.5;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s = line_scenario(std::nullopt);
  CHECK_THROWS_AS(validate(s, fixtures::profile({5})), std::invalid_argument);
  CHECK_THROWS_AS(validate(s, fixtures::profile({0, 1})), std::invalid_argument);
}
