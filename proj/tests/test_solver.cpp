#include <catch2/catch_amalgamated.hpp>

#include "nightsched/json_io.hpp"
#include "nightsched/oracle.hpp"
#include "nightsched/solver.hpp"
#include "test_util.hpp"

using namespace nightsched;
using Catch::Matchers::WithinAbs;

TEST_CASE("stochastic solve on the counterexample") {
  SolveResult res = solve_stochastic(testutil::counterexample({0, 0, 1, 0}));
  CHECK(res.proven_optimal);
  CHECK_THAT(res.etg, WithinAbs(6.0, 1e-12));
  CHECK(validate_schedule(testutil::counterexample(), res.schedule).ok());

  SolveResult one = solve_stochastic(testutil::counterexample({0, 1, 0, 0}));
  CHECK_THAT(one.etg, WithinAbs(4.0, 1e-12));

  SolveResult none = solve_stochastic(testutil::counterexample({1, 0, 0, 0}));
  CHECK_THAT(none.etg, WithinAbs(0.0, 1e-12));
  CHECK(none.proven_optimal);

  SolveResult half =
      solve_stochastic(testutil::counterexample({0, 0.5, 0.5, 0}));
  CHECK_THAT(half.etg, WithinAbs(4.5, 1e-12));  // pinned via the oracle
}

TEST_CASE("empty instance yields the empty schedule") {
  Instance inst;
  inst.nights = 3;
  inst.probabilities = {0, 0, 0, 1};
  SolveResult res = solve_stochastic(inst);
  CHECK(res.proven_optimal);
  CHECK(res.etg == 0.0);
  CHECK(res.schedule.nights.size() == 3);
}

TEST_CASE("solver matches the oracle on small instances") {
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    Instance inst = testutil::small_random(seed);
    auto [expected, witness] = oracle::brute_force_etg(inst);
    SolveResult res = solve_stochastic(inst);
    INFO("seed " << seed << " instance " << instance_to_json(inst).dump());
    REQUIRE(res.proven_optimal);
    CHECK_THAT(res.etg, WithinAbs(expected, 1e-9));
    CHECK(validate_schedule(inst, res.schedule).ok());
    CHECK_THAT(expected_total_gain(inst, res.schedule),
               WithinAbs(res.etg, 1e-9));
  }
}

TEST_CASE("all redundant-constraint toggles return the same optimum") {
  for (std::uint64_t seed = 300; seed < 320; ++seed) {
    Instance inst = testutil::small_random(seed, 3, 6, 4);
    double reference = 0.0;
    for (int combo = 0; combo < 8; ++combo) {
      SolverConfig cfg;
      cfg.use_dg = combo & 1;
      cfg.use_bo = combo & 2;
      cfg.use_icg = combo & 4;
      SolveResult res = solve_stochastic(inst, cfg);
      REQUIRE(res.proven_optimal);
      if (combo == 0)
        reference = res.etg;
      else
        CHECK_THAT(res.etg, WithinAbs(reference, 1e-9));
    }
  }
}

TEST_CASE("solver rejects instances beyond the mask width") {
  Instance inst;
  inst.nights = 1;
  inst.probabilities = {0, 1};
  for (int j = 0; j < 129; ++j)
    inst.observations.push_back({"x" + std::to_string(j), 0, 2, 1, 1});
  CHECK_THROWS_AS(solve_stochastic(inst), std::invalid_argument);
}

TEST_CASE("solve is deterministic") {
  Instance inst = testutil::small_random(77);
  SolveResult a = solve_stochastic(inst);
  SolveResult b = solve_stochastic(inst);
  CHECK(a.etg == b.etg);
  CHECK(a.nodes_explored == b.nodes_explored);
  CHECK(schedule_to_json(a.schedule).dump() ==
        schedule_to_json(b.schedule).dump());
}

TEST_CASE("node limit yields best-found without proof") {
  Instance inst = testutil::small_random(9, 3, 6, 4);
  SolverConfig cfg;
  cfg.node_limit = 2;
  SolveResult res = solve_stochastic(inst, cfg);
  CHECK_FALSE(res.proven_optimal);
  CHECK(validate_schedule(inst, res.schedule).ok());
  CHECK(res.etg >= 0.0);
}

TEST_CASE("optimum is monotone under probability shifts toward more nights") {
  for (std::uint64_t seed = 500; seed < 520; ++seed) {
    Instance inst = testutil::small_random(seed, 3, 5, 4);
    if (inst.nights < 2) continue;
    SolveResult base = solve_stochastic(inst);
    // Move probability mass one night later; the optimum cannot drop.
    Instance shifted = inst;
    for (int m = inst.nights - 1; m >= 0; --m) {
      if (shifted.probabilities[m] > 0) {
        shifted.probabilities[m + 1] += shifted.probabilities[m];
        shifted.probabilities[m] = 0;
        break;
      }
    }
    SolveResult more = solve_stochastic(shifted);
    CHECK(more.etg >= base.etg - 1e-9);
  }
}

TEST_CASE("bound_max_obs follows the horizon rule") {
  CHECK(bound_max_obs(testutil::counterexample()) == 2);

  Instance single;
  single.nights = 1;
  single.probabilities = {0, 1};
  single.observations = {{"x", 0, 4, 4, 1}};
  CHECK(bound_max_obs(single) == 1);

  Instance units;
  units.nights = 1;
  units.probabilities = {0, 1};
  for (int j = 0; j < 5; ++j)
    units.observations.push_back(
        {"u" + std::to_string(j), 0, 6, 1, 1});
  CHECK(bound_max_obs(units) == 5);
}

TEST_CASE("check_decreasing_gain") {
  Instance inst = testutil::counterexample();
  Schedule greedy;
  greedy.nights.resize(3);
  greedy.nights[0].placements = {{"C", 0}, {"D", 1}};  // 4
  greedy.nights[1].placements = {{"A", 0}};            // 1
  greedy.nights[2].placements = {{"B", 1}};            // 1
  CHECK(check_decreasing_gain(greedy, inst));

  Schedule ties;
  ties.nights.resize(3);
  ties.nights[0].placements = {{"C", 0}, {"B", 1}};  // 3
  ties.nights[1].placements = {{"A", 0}, {"D", 2}};  // 3
  CHECK(check_decreasing_gain(ties, inst));

  Schedule rising;
  rising.nights.resize(2);
  rising.nights[0].placements = {{"A", 0}};            // 1
  rising.nights[1].placements = {{"C", 0}, {"D", 1}};  // 4
  CHECK_FALSE(check_decreasing_gain(rising, inst));
}

TEST_CASE("normalize_night_order sorts by gain and never loses ETG") {
  Instance inst;
  inst.nights = 2;
  inst.probabilities = {0, 0.5, 0.5};
  inst.observations = {{"a", 0, 1, 1, 1}, {"b", 0, 2, 1, 2}, {"c", 1, 2, 1, 1}};
  Schedule rising;
  rising.nights.resize(2);
  rising.nights[0].placements = {{"a", 0}};  // 1
  rising.nights[1].placements = {{"b", 0}};  // 2
  CHECK_THAT(expected_total_gain(inst, rising), WithinAbs(2.0, 1e-12));
  Schedule sorted = normalize_night_order(rising, inst);
  CHECK(check_decreasing_gain(sorted, inst));
  CHECK_THAT(expected_total_gain(inst, sorted), WithinAbs(2.5, 1e-12));

  // Idempotent on already-sorted schedules, stable on ties.
  Schedule again = normalize_night_order(sorted, inst);
  CHECK(schedule_to_json(again).dump() == schedule_to_json(sorted).dump());

  for (std::uint64_t seed = 700; seed < 730; ++seed) {
    Instance rnd = testutil::small_random(seed);
    SolveResult res = solve_stochastic(rnd);
    Schedule norm = normalize_night_order(res.schedule, rnd);
    CHECK(expected_total_gain(rnd, norm) >=
          expected_total_gain(rnd, res.schedule) - 1e-9);
  }
}

TEST_CASE("DG-enabled solve returns a decreasing-gain schedule") {
  for (std::uint64_t seed = 900; seed < 940; ++seed) {
    Instance inst = testutil::small_random(seed);
    SolveResult res = solve_stochastic(inst);
    REQUIRE(res.proven_optimal);
    CHECK(check_decreasing_gain(res.schedule, inst));
  }
}
