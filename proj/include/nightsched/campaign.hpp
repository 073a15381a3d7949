// Campaign runner: solves a batch of instances with a selected set of
// algorithms in a worker pool and aggregates gap/upgrade/improvement
// statistics per algorithm pair.
#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "nightsched/core.hpp"
#include "nightsched/instance_gen.hpp"
#include "nightsched/reactive.hpp"
#include "nightsched/solver.hpp"
#include "nightsched/strategies.hpp"

namespace nightsched {

struct AlgorithmSelection {
  bool greedy = true;
  bool stochastic = true;
  bool omniscient = true;
  bool reactive = false;
};

struct InstanceRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::optional<double> p_clear;
  std::optional<double> etg_greedy;
  std::optional<double> etg_stochastic;
  std::optional<double> etg_omniscient;
  std::optional<double> etg_reactive;
  std::uint64_t nodes_stochastic = 0;
  double elapsed_stochastic = 0.0;
  bool all_proven = true;
};

// Statistics for one (A1, A2) pair in the style of a campaign summary table.
// The gap is ETG[A1] - ETG[A2]; means are taken only over instances with a
// nonzero gap (and, for the upgrade, a positive reference ETG).
struct PairStats {
  std::string a1;
  std::string a2;
  int n_instances = 0;
  int n_nonzero_gap = 0;
  int n_upgrade_defined = 0;
  double mean_upgrade = 0.0;
  int n_improvement_defined = 0;
  double mean_improvement = 0.0;
};

struct CampaignStats {
  int n_instances = 0;
  std::vector<PairStats> pairs;
  std::vector<InstanceRecord> records;
};

inline int worker_count_from_env(std::size_t task_count) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("NIGHTSCHED_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = static_cast<unsigned>(v);
  }
  if (task_count < n) n = static_cast<unsigned>(task_count);
  return static_cast<int>(n == 0 ? 1 : n);
}

namespace detail {

inline InstanceRecord evaluate_instance(const GeneratedInstance& gen,
                                        std::uint64_t seed, std::size_t index,
                                        const AlgorithmSelection& algos,
                                        const SolverConfig& cfg) {
  InstanceRecord rec;
  rec.index = index;
  rec.seed = seed;
  rec.p_clear = gen.p_clear;
  const Instance& inst = gen.instance;

  if (algos.greedy) rec.etg_greedy = greedy_schedule(inst).etg;
  if (algos.stochastic) {
    SolveResult res = solve_stochastic(inst, cfg);
    rec.etg_stochastic = res.etg;
    rec.nodes_stochastic = res.nodes_explored;
    rec.elapsed_stochastic = res.elapsed_seconds;
    rec.all_proven = rec.all_proven && res.proven_optimal;
  }
  if (algos.omniscient) {
    OmniscientCurve curve = omniscient_curve(inst, cfg);
    rec.etg_omniscient = omniscient_etg(curve, inst.probabilities);
    rec.all_proven = rec.all_proven && curve.proven_optimal;
  }
  if (algos.reactive) {
    if (!gen.p_clear)
      throw std::invalid_argument(
          "campaign: reactive evaluation needs binomial instances "
          "(p_clear unknown)");
    ReactiveResult res = simulate_reactive(
        inst.observations, inst.nights, BinomialWeather{*gen.p_clear}, cfg);
    rec.etg_reactive = res.expected_gain;
    // With binomial probabilities the reactive static reference equals the
    // stochastic ETG; keep the solved value when stochastic was not selected.
    if (!rec.etg_stochastic) rec.etg_stochastic = res.static_etg;
    rec.all_proven = rec.all_proven && res.proven_optimal;
  }
  return rec;
}

inline void accumulate_pair(CampaignStats& stats, const std::string& a1,
                            const std::string& a2,
                            std::optional<double> InstanceRecord::*f1,
                            std::optional<double> InstanceRecord::*f2) {
  PairStats ps;
  ps.a1 = a1;
  ps.a2 = a2;
  double upgrade_sum = 0.0;
  double improvement_sum = 0.0;
  for (const auto& rec : stats.records) {
    const auto& v1 = rec.*f1;
    const auto& v2 = rec.*f2;
    if (!v1 || !v2) continue;
    ++ps.n_instances;
    const double gap = *v1 - *v2;
    if (gap <= kProbTol) continue;
    ++ps.n_nonzero_gap;
    if (*v2 > 0.0) {
      upgrade_sum += upgrade(*v1, *v2);
      ++ps.n_upgrade_defined;
    }
    if (rec.etg_omniscient && *rec.etg_omniscient - *v2 > kProbTol) {
      improvement_sum += improvement(*v1, *v2, *rec.etg_omniscient);
      ++ps.n_improvement_defined;
    }
  }
  if (ps.n_upgrade_defined > 0) ps.mean_upgrade = upgrade_sum / ps.n_upgrade_defined;
  if (ps.n_improvement_defined > 0)
    ps.mean_improvement = improvement_sum / ps.n_improvement_defined;
  if (ps.n_instances > 0) stats.pairs.push_back(std::move(ps));
}

}  // namespace detail

// Runs the selected algorithms on every instance. Instances are processed by
// a pool of workers (capped by NIGHTSCHED_THREADS); records are stored by
// index so the outcome does not depend on scheduling order.
inline CampaignStats run_campaign(const std::vector<GeneratedInstance>& instances,
                                  const std::vector<std::uint64_t>& seeds,
                                  const AlgorithmSelection& algos,
                                  const SolverConfig& cfg) {
  CampaignStats stats;
  stats.n_instances = static_cast<int>(instances.size());
  stats.records.resize(instances.size());

  const int workers = worker_count_from_env(instances.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= instances.size()) return;
      try {
        stats.records[i] = detail::evaluate_instance(
            instances[i], i < seeds.size() ? seeds[i] : 0, i, algos, cfg);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  detail::accumulate_pair(stats, "stochastic", "greedy",
                          &InstanceRecord::etg_stochastic,
                          &InstanceRecord::etg_greedy);
  detail::accumulate_pair(stats, "omniscient", "stochastic",
                          &InstanceRecord::etg_omniscient,
                          &InstanceRecord::etg_stochastic);
  detail::accumulate_pair(stats, "reactive", "stochastic",
                          &InstanceRecord::etg_reactive,
                          &InstanceRecord::etg_stochastic);
  detail::accumulate_pair(stats, "omniscient", "reactive",
                          &InstanceRecord::etg_omniscient,
                          &InstanceRecord::etg_reactive);
  return stats;
}

}  // namespace nightsched
