// Brute-force reference implementations used by the test suites to certify
// the optimizing code paths. Everything here is deliberately exhaustive and
// shares nothing with the solvers beyond the core domain types.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nightsched/core.hpp"

namespace nightsched::oracle {

// Hard input-size guards keep the exponential enumerations predictable.
inline constexpr int kMaxObservations = 8;
inline constexpr int kMaxNights = 3;
inline constexpr int kMaxHorizon = 5;

inline void check_guards(std::size_t n_obs, int nights, int max_deadline) {
  if (static_cast<int>(n_obs) > kMaxObservations ||
      nights > kMaxNights || max_deadline > kMaxHorizon)
    throw std::invalid_argument("oracle guard: instance too large");
}

namespace detail {

// Exhaustive feasibility for one night: every permutation of the subset and,
// within a permutation, every integer start time is tried.
inline bool feasible_with_starts(const std::vector<Observation>& obs,
                                 const std::vector<std::size_t>& perm,
                                 std::size_t pos, int earliest,
                                 std::vector<int>& starts) {
  if (pos == perm.size()) return true;
  const Observation& o = obs[perm[pos]];
  for (int s = std::max(earliest, o.release); s + o.processing <= o.deadline;
       ++s) {
    starts[pos] = s;
    if (feasible_with_starts(obs, perm, pos + 1, s + o.processing, starts))
      return true;
  }
  return false;
}

inline bool night_feasible(const std::vector<Observation>& obs,
                           std::vector<std::size_t> subset,
                           std::vector<std::pair<std::size_t, int>>* out) {
  std::sort(subset.begin(), subset.end());
  std::vector<std::size_t> perm = subset;
  std::vector<int> starts(subset.size());
  do {
    if (feasible_with_starts(obs, perm, 0, 0, starts)) {
      if (out != nullptr) {
        out->clear();
        for (std::size_t k = 0; k < perm.size(); ++k)
          out->emplace_back(perm[k], starts[k]);
      }
      return true;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// Literal double sum: for each possible number of observable nights m,
// weight the cumulative gain of the first m nights by pi_m.
inline double etg_double_sum(const std::vector<double>& pi,
                             const std::vector<int>& night_gains) {
  double etg = 0.0;
  for (std::size_t m = 1; m < pi.size(); ++m) {
    int cumulative = 0;
    for (std::size_t i = 0; i < m && i < night_gains.size(); ++i)
      cumulative += night_gains[i];
    etg += pi[m] * cumulative;
  }
  return etg;
}

}  // namespace detail

// Enumerates every assignment of observations to {night 1..M, unscheduled},
// checks per-night feasibility exhaustively, and returns the maximum expected
// total gain together with the first maximizer in enumeration order.
inline std::pair<double, Schedule> brute_force_etg(const Instance& inst) {
  int max_deadline = 0;
  for (const auto& o : inst.observations)
    max_deadline = std::max(max_deadline, o.deadline);
  check_guards(inst.observations.size(), inst.nights, max_deadline);

  const std::size_t S = inst.observations.size();
  const int M = inst.nights;

  Schedule empty;
  empty.nights.assign(M, NightPlan{});
  if (S == 0) return {0.0, empty};

  // assignment[j] in [0, M]: 0 = unscheduled, i >= 1 = night i.
  std::vector<int> assignment(S, 0);
  std::map<std::vector<std::size_t>, bool> feasible_cache;

  double best = -1.0;
  std::vector<int> best_assignment;

  for (;;) {
    std::vector<std::vector<std::size_t>> nights(M);
    for (std::size_t j = 0; j < S; ++j)
      if (assignment[j] > 0) nights[assignment[j] - 1].push_back(j);

    bool ok = true;
    for (const auto& subset : nights) {
      auto key = subset;
      std::sort(key.begin(), key.end());
      auto it = feasible_cache.find(key);
      bool f;
      if (it != feasible_cache.end()) {
        f = it->second;
      } else {
        f = detail::night_feasible(inst.observations, key, nullptr);
        feasible_cache.emplace(std::move(key), f);
      }
      if (!f) {
        ok = false;
        break;
      }
    }

    if (ok) {
      std::vector<int> gains(M, 0);
      for (int i = 0; i < M; ++i)
        for (std::size_t j : nights[i]) gains[i] += inst.observations[j].gain;
      const double etg = detail::etg_double_sum(inst.probabilities, gains);
      if (etg > best) {
        best = etg;
        best_assignment = assignment;
      }
    }

    // Odometer step.
    std::size_t j = 0;
    while (j < S && assignment[j] == M) assignment[j++] = 0;
    if (j == S) break;
    ++assignment[j];
  }

  Schedule sched;
  sched.nights.assign(M, NightPlan{});
  for (int i = 0; i < M; ++i) {
    std::vector<std::size_t> subset;
    for (std::size_t j = 0; j < S; ++j)
      if (best_assignment[j] == i + 1) subset.push_back(j);
    std::vector<std::pair<std::size_t, int>> placed;
    detail::night_feasible(inst.observations, subset, &placed);
    std::sort(placed.begin(), placed.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    for (const auto& [idx, start] : placed)
      sched.nights[i].placements.push_back(
          {inst.observations[idx].id, start});
  }
  return {best, sched};
}

namespace detail {

// Binomial pmf from Pascal's triangle; kept separate from the library's
// binomial helper on purpose.
inline std::vector<double> binomial_pmf(int m, double p) {
  std::vector<std::vector<double>> pascal(m + 1);
  for (int n = 0; n <= m; ++n) {
    pascal[n].assign(n + 1, 1.0);
    for (int k = 1; k < n; ++k)
      pascal[n][k] = pascal[n - 1][k - 1] + pascal[n - 1][k];
  }
  std::vector<double> pmf(m + 1);
  for (int k = 0; k <= m; ++k) {
    double v = pascal[m][k];
    for (int t = 0; t < k; ++t) v *= p;
    for (int t = 0; t < m - k; ++t) v *= 1.0 - p;
    pmf[k] = v;
  }
  return pmf;
}

struct Candidate {
  int gain = 0;
  std::vector<std::string> sorted_ids;
  std::vector<std::size_t> subset;
};

// Candidate first-night subsets in canonical order: gain descending, then
// fewer observations, then lexicographically smallest sorted id sequence.
inline std::vector<Candidate> feasible_subsets_canonical(
    const std::vector<Observation>& obs) {
  std::vector<Candidate> out;
  const std::size_t n = obs.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<std::size_t> subset;
    for (std::size_t j = 0; j < n; ++j)
      if (mask & (1u << j)) subset.push_back(j);
    if (!night_feasible(obs, subset, nullptr)) continue;
    Candidate c;
    for (std::size_t j : subset) {
      c.gain += obs[j].gain;
      c.sorted_ids.push_back(obs[j].id);
    }
    std::sort(c.sorted_ids.begin(), c.sorted_ids.end());
    c.subset = std::move(subset);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.gain != b.gain) return a.gain > b.gain;
    if (a.subset.size() != b.subset.size())
      return a.subset.size() < b.subset.size();
    return a.sorted_ids < b.sorted_ids;
  });
  return out;
}

// Probability vector over m-1 remaining nights whose tails equal the tails
// of `pi` shifted by one night.
inline std::vector<double> shift_pi(const std::vector<double>& pi) {
  std::vector<double> out(pi.size() - 1);
  out[0] = pi[0] + pi[1];
  for (std::size_t k = 1; k < out.size(); ++k) out[k] = pi[k + 1];
  return out;
}

// The pending plan for a reactive node: among feasible first-night subsets
// that extend to an ETG-optimal schedule, the canonically smallest.
inline std::vector<std::size_t> canonical_first_night(
    const std::vector<Observation>& pool, int m, const std::vector<double>& pi) {
  Instance node;
  node.nights = m;
  node.observations = pool;
  node.probabilities = pi;
  const double v = brute_force_etg(node).first;

  double tail1 = 0.0;
  for (std::size_t k = 1; k < pi.size(); ++k) tail1 += pi[k];

  for (const auto& cand : feasible_subsets_canonical(pool)) {
    double rest = 0.0;
    if (m > 1) {
      Instance sub;
      sub.nights = m - 1;
      for (std::size_t j = 0; j < pool.size(); ++j)
        if (std::find(cand.subset.begin(), cand.subset.end(), j) ==
            cand.subset.end())
          sub.observations.push_back(pool[j]);
      sub.probabilities = shift_pi(pi);
      rest = brute_force_etg(sub).first;
    }
    if (cand.gain * tail1 + rest >= v - 1e-10) return cand.subset;
  }
  throw std::logic_error("canonical_first_night: no optimal subset found");
}

inline double reactive_walk(const std::vector<Observation>& pool, int m,
                            double p, const std::vector<std::size_t>* pending) {
  if (m == 0) return 0.0;
  std::vector<std::size_t> plan;
  if (pending == nullptr) {
    if (pool.empty())
      plan.clear();
    else
      plan = canonical_first_night(pool, m, binomial_pmf(m, p));
  } else {
    plan = *pending;
  }

  int plan_gain = 0;
  for (std::size_t j : plan) plan_gain += pool[j].gain;

  // Clear night: realize the plan, drop its observations, re-solve next.
  std::vector<Observation> remaining;
  for (std::size_t j = 0; j < pool.size(); ++j)
    if (std::find(plan.begin(), plan.end(), j) == plan.end())
      remaining.push_back(pool[j]);
  const double clear_value =
      plan_gain + reactive_walk(remaining, m - 1, p, nullptr);

  // Bad night: the pending plan is kept; no re-solve.
  const double bad_value = reactive_walk(pool, m - 1, p, &plan);

  return p * clear_value + (1.0 - p) * bad_value;
}

}  // namespace detail

// Independent replication of the reactive scenario tree: no memoization, no
// state shared with the reactive module, inner solves by brute_force_etg.
inline double brute_force_reactive(const std::vector<Observation>& observations,
                                   int M, double p_clear) {
  int max_deadline = 0;
  for (const auto& o : observations)
    max_deadline = std::max(max_deadline, o.deadline);
  check_guards(observations.size(), M, max_deadline);
  return detail::reactive_walk(observations, M, p_clear, nullptr);
}

}  // namespace nightsched::oracle
