// Rolling-horizon reactive strategy: after each realized night the remaining
// instance is re-solved under a binomial model of the remaining nights. The
// full binary scenario tree is enumerated, so expectations are exact.
#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nightsched/core.hpp"
#include "nightsched/single_night.hpp"
#include "nightsched/solver.hpp"
#include "nightsched/strategies.hpp"

namespace nightsched {

struct BinomialWeather {
  double p_clear = 0.0;  // probability that any single night is observable
};

struct ScenarioResult {
  std::vector<bool> outcome_mask;  // true = clear, per night in order
  double probability = 0.0;
  int total_gain = 0;
};

struct ReactiveResult {
  std::vector<ScenarioResult> scenarios;  // all 2^M leaves, clear-first order
  double expected_gain = 0.0;
  double static_etg = 0.0;  // root solve value = static stochastic ETG
  std::uint64_t solver_calls = 0;
  bool proven_optimal = true;
};

namespace detail {

// Probability vector over m-1 nights whose tails are the previous vector's
// tails shifted by one night; used to price "the rest of the schedule".
inline std::vector<double> shift_probabilities(const std::vector<double>& pi) {
  std::vector<double> out(pi.size() - 1);
  out[0] = pi[0] + pi[1];
  for (std::size_t k = 1; k < out.size(); ++k) out[k] = pi[k + 1];
  return out;
}

struct PendingPlan {
  std::vector<std::size_t> subset;  // indices into the node's pool
  NightPlan plan;
  int gain = 0;
};

// Walk state shared across the scenario tree exploration.
struct ReactiveWalk {
  const SolverConfig* cfg = nullptr;
  double p_clear = 0.0;
  ReactiveResult* result = nullptr;
  std::vector<bool> mask_prefix;

  // The pending plan is pinned canonically so that the choice among tied
  // optimal schedules is implementation-independent: among feasible
  // first-night subsets that extend to an ETG-optimal schedule, take the one
  // with maximum gain, then fewest observations, then lexicographically
  // smallest sorted id sequence.
  PendingPlan canonical_pending(const std::vector<Observation>& pool, int m,
                                double* node_value = nullptr) {
    PendingPlan pending;
    if (node_value != nullptr) *node_value = 0.0;
    if (pool.empty()) return pending;

    const std::vector<double> pi = binomial_pi(m, p_clear);
    Instance node;
    node.nights = m;
    node.observations = pool;
    node.probabilities = pi;
    ++result->solver_calls;
    SolveResult full = solve_stochastic(node, *cfg);
    result->proven_optimal =
        result->proven_optimal && full.proven_optimal;
    const double v = full.etg;
    if (node_value != nullptr) *node_value = v;

    double tail1 = 0.0;
    for (std::size_t k = 1; k < pi.size(); ++k) tail1 += pi[k];
    double tail2 = 0.0;
    for (std::size_t k = 2; k < pi.size(); ++k) tail2 += pi[k];

    struct Candidate {
      int gain = 0;
      std::vector<std::string> sorted_ids;
      std::vector<std::size_t> subset;
    };
    std::vector<Candidate> candidates;
    Sequencer seq(pool);
    std::vector<std::size_t> cur;
    auto enumerate = [&](auto&& self, std::size_t pos, int gain) -> void {
      if (pos == pool.size()) {
        Candidate c;
        c.gain = gain;
        c.subset = cur;
        for (std::size_t j : cur) c.sorted_ids.push_back(pool[j].id);
        std::sort(c.sorted_ids.begin(), c.sorted_ids.end());
        candidates.push_back(std::move(c));
        return;
      }
      cur.push_back(pos);
      if (seq.sequence(cur)) self(self, pos + 1, gain + pool[pos].gain);
      cur.pop_back();
      self(self, pos + 1, gain);
    };
    enumerate(enumerate, 0, 0);
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) {
                if (a.gain != b.gain) return a.gain > b.gain;
                if (a.subset.size() != b.subset.size())
                  return a.subset.size() < b.subset.size();
                return a.sorted_ids < b.sorted_ids;
              });

    int pool_gain = 0;
    for (const auto& o : pool) pool_gain += o.gain;

    const std::vector<double> rest_pi =
        m > 1 ? shift_probabilities(pi) : std::vector<double>{};
    for (const auto& cand : candidates) {
      // Cheap admissible bound on the rest; skips candidates that cannot
      // extend to an optimal schedule without spending a solve on them.
      if (cand.gain * tail1 + (pool_gain - cand.gain) * tail2 < v - 1e-10)
        continue;
      double rest = 0.0;
      if (m > 1) {
        Instance sub;
        sub.nights = m - 1;
        for (std::size_t j = 0; j < pool.size(); ++j)
          if (std::find(cand.subset.begin(), cand.subset.end(), j) ==
              cand.subset.end())
            sub.observations.push_back(pool[j]);
        sub.probabilities = rest_pi;
        SolveResult res = solve_stochastic(sub, *cfg);
        result->proven_optimal =
            result->proven_optimal && res.proven_optimal;
        rest = res.etg;
      }
      if (cand.gain * tail1 + rest >= v - 1e-10) {
        pending.subset = cand.subset;
        pending.gain = cand.gain;
        pending.plan =
            plan_from_placements(pool, *seq.sequence(cand.subset));
        return pending;
      }
    }
    throw std::logic_error("reactive: no optimal first night found");
  }

  void walk(const std::vector<Observation>& pool, int m,
            const PendingPlan& pending, double prob, int gain) {
    if (m == 0) {
      result->scenarios.push_back({mask_prefix, prob, gain});
      result->expected_gain += prob * gain;
      return;
    }

    // Clear night: the pending plan executes; re-solve for the next night.
    std::vector<Observation> remaining;
    remaining.reserve(pool.size());
    for (std::size_t j = 0; j < pool.size(); ++j)
      if (std::find(pending.subset.begin(), pending.subset.end(), j) ==
          pending.subset.end())
        remaining.push_back(pool[j]);
    mask_prefix.push_back(true);
    PendingPlan next;
    if (m - 1 > 0) next = canonical_pending(remaining, m - 1);
    walk(remaining, m - 1, next, prob * p_clear, gain + pending.gain);
    mask_prefix.pop_back();

    // Bad night: the plan is kept; the solver is not reused.
    mask_prefix.push_back(false);
    walk(pool, m - 1, pending, prob * (1.0 - p_clear), gain);
    mask_prefix.pop_back();
  }
};

}  // namespace detail

// Explores the 2^M binary tree of night outcomes under the reactive policy.
// The root solve is the static stochastic solution; after a clear night the
// remaining pool is re-solved, after a bad night the pending plan is kept.
inline ReactiveResult simulate_reactive(
    const std::vector<Observation>& observations, int M,
    BinomialWeather weather, const SolverConfig& cfg = {}) {
  if (M < 1) throw std::invalid_argument("simulate_reactive: M must be >= 1");
  ReactiveResult result;
  detail::ReactiveWalk walker;
  walker.cfg = &cfg;
  walker.p_clear = weather.p_clear;
  walker.result = &result;

  // The root solve value is the static stochastic ETG under the binomial
  // distribution over all M nights.
  detail::PendingPlan root =
      walker.canonical_pending(observations, M, &result.static_etg);

  walker.walk(observations, M, root, 1.0, 0);
  return result;
}

// (reactive expectation, static expectation) over the same binomial scenario
// distribution. Reactive never falls below static when all inner solves are
// proven optimal.
inline std::pair<double, double> reactive_vs_stochastic_expectation(
    const std::vector<Observation>& observations, int M,
    BinomialWeather weather, const SolverConfig& cfg = {}) {
  ReactiveResult res = simulate_reactive(observations, M, weather, cfg);
  return {res.expected_gain, res.static_etg};
}

struct SweepPoint {
  double p_clear = 0.0;
  double etg_stochastic = 0.0;
  double etg_reactive = 0.0;
  double upgrade = 0.0;
};

// Upgrade of reactive over static for each probability on the grid. Where
// the static expectation is zero (p = 0) the upgrade is 0 by convention.
inline std::vector<SweepPoint> sweep_binomial(
    const std::vector<Observation>& observations, int M,
    const std::vector<double>& p_grid, const SolverConfig& cfg = {}) {
  std::vector<SweepPoint> curve;
  curve.reserve(p_grid.size());
  for (double p : p_grid) {
    auto [reactive, stat] = reactive_vs_stochastic_expectation(
        observations, M, BinomialWeather{p}, cfg);
    SweepPoint pt;
    pt.p_clear = p;
    pt.etg_stochastic = stat;
    pt.etg_reactive = reactive;
    pt.upgrade = stat > 0.0 ? upgrade(reactive, stat) : 0.0;
    curve.push_back(pt);
  }
  return curve;
}

}  // namespace nightsched
