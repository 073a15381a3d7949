// Seeded random instance generation. The generator algorithm is pinned so
// that a seed reproduces the same instance on any platform or
// implementation: xoshiro256++ initialized from the seed via splitmix64,
// bounded integers by rejection, doubles from the top 53 bits.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nightsched/core.hpp"

namespace nightsched {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ by Blackman and Vigna.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64_next(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Unbiased integer in [0, n) by rejection on the top of the 64-bit range.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  double uniform01() {  // [0, 1), 53-bit resolution
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

enum class ProbabilityModel { uniform_normalized, binomial };

struct GenParams {
  int nights = 1;
  int observations = 1;
  int len_night = 1;
  int max_gain = 1;
  std::uint64_t seed = 0;
  ProbabilityModel model = ProbabilityModel::uniform_normalized;
  // When set, the binomial model uses this success probability instead of
  // drawing one.
  std::optional<double> fixed_p_clear;
};

struct GeneratedInstance {
  Instance instance;
  std::optional<double> p_clear;  // present for the binomial model
};

// Draw q_m uniform on [0,1) for m = 0..M, normalize, then recompute pi_0 as
// 1 minus the rest so the vector sums to 1 up to one rounding step.
inline std::vector<double> generate_probabilities_uniform(int M, Rng& rng) {
  std::vector<double> q(static_cast<std::size_t>(M) + 1);
  double sum = 0.0;
  do {
    sum = 0.0;
    for (auto& v : q) {
      v = rng.uniform01();
      sum += v;
    }
  } while (sum == 0.0);
  std::vector<double> pi(q.size());
  for (std::size_t m = 0; m < q.size(); ++m) pi[m] = q[m] / sum;
  double rest = 0.0;
  for (std::size_t m = 1; m < pi.size(); ++m) rest += pi[m];
  pi[0] = std::max(0.0, 1.0 - rest);
  return pi;
}

inline std::pair<std::vector<double>, double> generate_probabilities_binomial(
    int M, Rng& rng) {
  const double p_clear = rng.uniform01();
  return {binomial_pi(M, p_clear), p_clear};
}

inline std::string observation_id(int index, int count) {
  int width = 1;
  for (int c = count; c >= 10; c /= 10) ++width;
  std::string digits = std::to_string(index);
  return "o" + std::string(width - digits.size(), '0') + digits;
}

// Draw order, fixed for seed portability: for each observation j = 1..S,
// draw (release, deadline) by rejection until release < deadline, then
// processing, then gain; after all observations, the probability block.
inline GeneratedInstance generate_instance(const GenParams& params) {
  if (params.nights < 1 || params.observations < 1 || params.len_night < 1 ||
      params.max_gain < 1)
    throw std::invalid_argument("generate_instance: invalid meta-parameters");

  Rng rng(params.seed);
  GeneratedInstance out;
  out.instance.nights = params.nights;

  for (int j = 1; j <= params.observations; ++j) {
    int release = 0;
    int deadline = 0;
    do {
      release = rng.uniform_int(0, params.len_night);
      deadline = rng.uniform_int(0, params.len_night);
    } while (!(release < deadline));
    Observation obs;
    obs.id = observation_id(j, params.observations);
    obs.release = release;
    obs.deadline = deadline;
    obs.processing = rng.uniform_int(1, deadline - release);
    obs.gain = rng.uniform_int(1, params.max_gain);
    out.instance.observations.push_back(std::move(obs));
  }

  switch (params.model) {
    case ProbabilityModel::uniform_normalized:
      out.instance.probabilities =
          generate_probabilities_uniform(params.nights, rng);
      break;
    case ProbabilityModel::binomial: {
      if (params.fixed_p_clear) {
        out.p_clear = *params.fixed_p_clear;
        out.instance.probabilities =
            binomial_pi(params.nights, *params.fixed_p_clear);
      } else {
        auto [pi, p] = generate_probabilities_binomial(params.nights, rng);
        out.instance.probabilities = std::move(pi);
        out.p_clear = p;
      }
      break;
    }
  }
  return out;
}

}  // namespace nightsched
