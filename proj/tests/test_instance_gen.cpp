#include <map>

#include <catch2/catch_amalgamated.hpp>

#include "nightsched/instance_gen.hpp"
#include "nightsched/json_io.hpp"

using namespace nightsched;
using Catch::Matchers::WithinAbs;

TEST_CASE("generation is a pure function of the seed") {
  GenParams params;
  params.nights = 4;
  params.observations = 20;
  params.len_night = 5;
  params.max_gain = 10;
  params.seed = 20240611;
  auto a = generate_instance(params);
  auto b = generate_instance(params);
  CHECK(instance_to_json(a.instance).dump() ==
        instance_to_json(b.instance).dump());

  params.seed += 1;
  auto c = generate_instance(params);
  CHECK(instance_to_json(a.instance).dump() !=
        instance_to_json(c.instance).dump());
}

TEST_CASE("generated instances satisfy the invariants") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    GenParams params;
    Rng pick(seed);
    params.nights = pick.uniform_int(1, 5);
    params.observations = pick.uniform_int(1, 25);
    params.len_night = pick.uniform_int(1, 8);
    params.max_gain = pick.uniform_int(1, 10);
    params.seed = seed;
    params.model = seed % 2 == 0 ? ProbabilityModel::uniform_normalized
                                 : ProbabilityModel::binomial;
    auto gen = generate_instance(params);
    INFO("seed " << seed);
    CHECK(validate_instance(gen.instance).ok());
    if (params.model == ProbabilityModel::binomial) {
      REQUIRE(gen.p_clear.has_value());
      CHECK(*gen.p_clear >= 0.0);
      CHECK(*gen.p_clear < 1.0);
    }
  }
}

TEST_CASE("len_night = 1 forces every field") {
  GenParams params;
  params.nights = 2;
  params.observations = 6;
  params.len_night = 1;
  params.max_gain = 1;
  params.seed = 3;
  auto gen = generate_instance(params);
  for (const auto& o : gen.instance.observations) {
    CHECK(o.release == 0);
    CHECK(o.deadline == 1);
    CHECK(o.processing == 1);
    CHECK(o.gain == 1);
  }
}

TEST_CASE("window pairs are uniform over the valid triangle") {
  GenParams params;
  params.nights = 1;
  params.observations = 10000;
  params.len_night = 5;
  params.max_gain = 10;
  params.seed = 424242;
  auto gen = generate_instance(params);

  std::map<std::pair<int, int>, int> counts;
  for (const auto& o : gen.instance.observations)
    counts[{o.release, o.deadline}]++;
  REQUIRE(counts.size() == 15);  // ordered pairs with r < d in [0,5]

  const double expected = 10000.0 / 15.0;
  double chi2 = 0.0;
  for (const auto& [pair, n] : counts)
    chi2 += (n - expected) * (n - expected) / expected;
  // 0.999 quantile of chi-square with 14 degrees of freedom.
  CHECK(chi2 < 36.1233);
}

TEST_CASE("uniform probability vectors are normalized and non-degenerate") {
  Rng rng(7);
  double variance_probe = 0.0;
  for (int round = 0; round < 2000; ++round) {
    auto pi = generate_probabilities_uniform(4, rng);
    REQUIRE(pi.size() == 5);
    double sum = 0.0;
    for (double v : pi) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-12);
      sum += v;
    }
    CHECK_THAT(sum, WithinAbs(1.0, 1e-12));
    variance_probe += (pi[2] - 0.2) * (pi[2] - 0.2);
  }
  CHECK(variance_probe > 0.0);

  auto tiny = generate_probabilities_uniform(1, rng);
  REQUIRE(tiny.size() == 2);
}

TEST_CASE("binomial probability draws") {
  Rng rng(11);
  auto [pi, p] = generate_probabilities_binomial(3, rng);
  CHECK(pi.size() == 4);
  CHECK(p >= 0.0);
  CHECK(p < 1.0);

  CHECK(binomial_pi(2, 0.5) == std::vector<double>{0.25, 0.5, 0.25});
  auto certain = binomial_pi(3, 1.0);
  CHECK(certain[3] == 1.0);
}

TEST_CASE("rejection sampling covers the whole support") {
  // Every valid (release, deadline, processing) combination at len_night 2
  // should appear across enough seeds.
  std::map<std::tuple<int, int, int>, int> seen;
  GenParams params;
  params.nights = 1;
  params.observations = 600;
  params.len_night = 2;
  params.max_gain = 2;
  params.seed = 99;
  auto gen = generate_instance(params);
  for (const auto& o : gen.instance.observations)
    seen[{o.release, o.deadline, o.processing}]++;
  // Valid combos: (0,1,1), (0,2,1), (0,2,2), (1,2,1).
  CHECK(seen.size() == 4);
}
