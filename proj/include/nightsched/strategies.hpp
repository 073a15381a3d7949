// The comparison algorithms: greedy night-by-night planning, the omniscient
// per-m optimum envelope, and the upgrade/improvement metrics between them.
#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "nightsched/core.hpp"
#include "nightsched/single_night.hpp"
#include "nightsched/solver.hpp"

namespace nightsched {

struct MetricUndefinedError : std::domain_error {
  using std::domain_error::domain_error;
};

struct StrategyOutcome {
  std::vector<int> per_night_gains;
  std::optional<Schedule> schedule;
  double etg = 0.0;
};

// Plans each night as if it were the last: night i is an optimal single
// night over the observations not scheduled before it. Per-night gains are
// non-increasing because the pool only shrinks.
inline StrategyOutcome greedy_schedule(const Instance& inst) {
  StrategyOutcome out;
  Schedule sched;
  std::vector<Observation> pool = inst.observations;
  for (int i = 0; i < inst.nights; ++i) {
    NightPlan plan = best_single_night(NightPool{pool});
    out.per_night_gains.push_back(night_gain(plan, inst));
    for (const auto& pl : plan.placements)
      std::erase_if(pool,
                    [&](const Observation& o) { return o.id == pl.id; });
    sched.nights.push_back(std::move(plan));
  }
  out.schedule = std::move(sched);
  out.etg = expected_total_gain(inst, *out.schedule);
  return out;
}

// values[m-1] is the optimal total gain when exactly m nights are certain.
// Deliberately not a schedule: the per-m optima need not be reachable by any
// single schedule.
struct OmniscientCurve {
  std::vector<double> values;
  bool proven_optimal = true;
  std::uint64_t nodes_explored = 0;
};

inline OmniscientCurve omniscient_curve(const Instance& inst,
                                        const SolverConfig& cfg = {}) {
  OmniscientCurve curve;
  for (int m = 1; m <= inst.nights; ++m) {
    Instance certain = inst;
    certain.probabilities.assign(inst.nights + 1, 0.0);
    certain.probabilities[m] = 1.0;
    SolveResult res = solve_stochastic(certain, cfg);
    curve.values.push_back(res.etg);
    curve.proven_optimal = curve.proven_optimal && res.proven_optimal;
    curve.nodes_explored += res.nodes_explored;
  }
  return curve;
}

// ETG of the omniscient envelope under the instance's probabilities.
inline double omniscient_etg(const OmniscientCurve& curve,
                             const std::vector<double>& pi) {
  double etg = 0.0;
  for (std::size_t m = 1; m < pi.size() && m <= curve.values.size(); ++m)
    etg += pi[m] * curve.values[m - 1];
  return etg;
}

// Relative gain of algorithm A1 over A2.
inline double upgrade(double etg_a1, double etg_a2) {
  if (etg_a2 <= 0.0)
    throw MetricUndefinedError("upgrade undefined: reference ETG is zero");
  return (etg_a1 - etg_a2) / etg_a2;
}

// Fraction of the gap to the omniscient envelope that A1 closes over A2.
inline double improvement(double etg_a1, double etg_a2,
                          double etg_omniscient) {
  if (etg_omniscient == etg_a2)
    throw MetricUndefinedError(
        "improvement undefined: the gap to the envelope is already closed");
  return (etg_a1 - etg_a2) / (etg_omniscient - etg_a2);
}

}  // namespace nightsched
