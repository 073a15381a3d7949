// Exact branch-and-bound solver for the full stochastic problem: maximize the
// expected total gain over all M-night schedules. Search is night by night,
// enumerating feasible subsets per night, with the redundant constraints
// (decreasing gain, bounded observations, increasing cumulative gain) exposed
// as toggleable pruning rules.
#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "nightsched/core.hpp"
#include "nightsched/single_night.hpp"

namespace nightsched {

struct SolverConfig {
  double time_limit = 0.0;  // seconds; 0 = unlimited
  bool use_dg = true;       // decreasing night gain (dominance)
  bool use_bo = true;       // per-night cardinality bound
  bool use_icg = true;      // increasing cumulative gain (incumbent assertion)
  std::optional<std::uint64_t> node_limit;
};

struct SolveResult {
  Schedule schedule;
  double etg = 0.0;
  bool proven_optimal = false;
  std::uint64_t nodes_explored = 0;
  double elapsed_seconds = 0.0;
};

// Cardinality bound for one night: the largest k such that the k smallest
// processing times fit into the horizon (latest deadline minus earliest
// release over all observations).
inline int bound_max_obs(const Instance& inst) {
  if (inst.observations.empty())
    throw std::invalid_argument("bound_max_obs: empty instance");
  int min_r = std::numeric_limits<int>::max();
  int max_d = std::numeric_limits<int>::min();
  std::vector<int> times;
  times.reserve(inst.observations.size());
  for (const auto& o : inst.observations) {
    min_r = std::min(min_r, o.release);
    max_d = std::max(max_d, o.deadline);
    times.push_back(o.processing);
  }
  std::sort(times.begin(), times.end());
  const int horizon = max_d - min_r;
  int k = 0;
  long long acc = 0;
  for (int t : times) {
    acc += t;
    if (acc > horizon) break;
    ++k;
  }
  return k;
}

inline bool check_decreasing_gain(const Schedule& sched, const Instance& inst) {
  int prev = std::numeric_limits<int>::max();
  for (const auto& plan : sched.nights) {
    const int g = night_gain(plan, inst);
    if (g > prev) return false;
    prev = g;
  }
  return true;
}

// Stable sort of nights by non-increasing gain. Never decreases the ETG
// because tail probabilities are non-increasing in the night index.
inline Schedule normalize_night_order(const Schedule& sched,
                                      const Instance& inst) {
  std::vector<std::pair<int, std::size_t>> keyed;
  keyed.reserve(sched.nights.size());
  for (std::size_t i = 0; i < sched.nights.size(); ++i)
    keyed.emplace_back(night_gain(sched.nights[i], inst), i);
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  Schedule out;
  out.nights.reserve(sched.nights.size());
  for (const auto& [gain, idx] : keyed) out.nights.push_back(sched.nights[idx]);
  return out;
}

namespace detail {

// Observation subset as a 128-bit mask; supports instances up to 128
// observations, well past the sizes the solver can handle anyway.
struct ObsMask {
  std::uint64_t w0 = 0;
  std::uint64_t w1 = 0;

  void set(std::size_t i) {
    if (i < 64)
      w0 |= std::uint64_t{1} << i;
    else
      w1 |= std::uint64_t{1} << (i - 64);
  }
  bool test(std::size_t i) const {
    return i < 64 ? (w0 >> i) & 1 : (w1 >> (i - 64)) & 1;
  }
  bool empty() const { return w0 == 0 && w1 == 0; }
  friend bool operator==(const ObsMask&, const ObsMask&) = default;
  friend bool operator>(const ObsMask& a, const ObsMask& b) {
    return a.w1 != b.w1 ? a.w1 > b.w1 : a.w0 > b.w0;
  }
};

struct ObsMaskHash {
  std::size_t operator()(const ObsMask& m) const {
    std::uint64_t h = m.w0 * 0x9e3779b97f4a7c15ULL;
    h ^= m.w1 + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

class StochasticSearch {
 public:
  StochasticSearch(const Instance& inst, const SolverConfig& cfg)
      : inst_(inst),
        cfg_(cfg),
        sequencer_(inst.observations),
        M_(inst.nights),
        S_(inst.observations.size()) {
    if (S_ > 128)
      throw std::invalid_argument("solver supports at most 128 observations");
    tails_ = tail_probabilities(inst.probabilities);
    suffix_tail_.assign(M_ + 1, 0.0);
    for (int i = M_ - 1; i >= 0; --i)
      suffix_tail_[i] = suffix_tail_[i + 1] + tails_[i];

    int min_r = std::numeric_limits<int>::max();
    int max_d = std::numeric_limits<int>::min();
    for (const auto& o : inst.observations) {
      min_r = std::min(min_r, o.release);
      max_d = std::max(max_d, o.deadline);
    }
    horizon_ = S_ > 0 ? max_d - min_r : 0;
    bound_obs_ = S_ > 0 ? bound_max_obs(inst) : 0;

    order_.resize(S_);
    for (std::size_t i = 0; i < S_; ++i) order_[i] = i;
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      const auto& oa = inst.observations[a];
      const auto& ob = inst.observations[b];
      const double da = static_cast<double>(oa.gain) / oa.processing;
      const double db = static_cast<double>(ob.gain) / ob.processing;
      if (da != db) return da > db;
      return oa.id < ob.id;
    });

    avail_.assign(S_, true);
    night_subsets_.resize(M_);
    night_gains_.resize(M_, 0);
  }

  SolveResult run() {
    start_ = std::chrono::steady_clock::now();
    // The all-empty schedule is always valid, so a best-found schedule
    // exists even when a limit fires immediately.
    incumbent_.nights.assign(M_, NightPlan{});
    incumbent_etg_ = 0.0;

    if (S_ > 0) search_night(0, std::numeric_limits<int>::max(), ObsMask{}, 0.0);

    SolveResult res;
    res.schedule = incumbent_;
    res.etg = expected_total_gain(inst_, incumbent_);
    res.proven_optimal = !aborted_;
    res.nodes_explored = nodes_;
    res.elapsed_seconds = elapsed();
    return res;
  }

 private:
  static constexpr double kPruneEps = 1e-10;

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

  bool limits_hit() {
    if (cfg_.node_limit && nodes_ >= *cfg_.node_limit) return true;
    if (cfg_.time_limit > 0.0 && (nodes_ & 1023) == 0 &&
        elapsed() > cfg_.time_limit)
      return true;
    return false;
  }

  bool night_feasible(const ObsMask& mask,
                      const std::vector<std::size_t>& subset) {
    auto it = feas_cache_.find(mask);
    if (it != feas_cache_.end()) return it->second;
    const bool ok = sequencer_.sequence(subset).has_value();
    feas_cache_.emplace(mask, ok);
    return ok;
  }

  void search_night(int i, int prev_gain, const ObsMask& prev_mask,
                    double etg_so_far) {
    if (aborted_) return;
    if (i == M_) {
      if (etg_so_far > incumbent_etg_) {
        if (cfg_.use_icg) assert_increasing_cumulative();
        incumbent_etg_ = etg_so_far;
        rebuild_incumbent();
      }
      return;
    }
    std::vector<std::size_t> subset;
    extend(i, 0, subset, 0, 0, ObsMask{}, etg_so_far, prev_gain, prev_mask);
  }

  // Enumerates night i's subset over positions `pos..S` of the density order;
  // completed subsets recurse into the next night.
  void extend(int i, std::size_t pos, std::vector<std::size_t>& cur,
              int cur_gain, int cur_proc, ObsMask mask, double etg_so_far,
              int prev_gain, const ObsMask& prev_mask) {
    if (aborted_) return;
    while (pos < S_ && !avail_[order_[pos]]) ++pos;

    ++nodes_;
    if (limits_hit()) {
      aborted_ = true;
      return;
    }
    if (upper_bound(i, pos, cur_gain, cur_proc, mask, etg_so_far, prev_gain) <=
        incumbent_etg_ + kPruneEps)
      return;

    if (pos == S_) {
      // Dominance among equal-gain nights: keep one canonical order.
      if (cfg_.use_dg && i > 0 && cur_gain == prev_gain &&
          !(mask.empty() && prev_mask.empty()) && !(mask > prev_mask))
        return;
      night_subsets_[i] = cur;
      night_gains_[i] = cur_gain;
      for (std::size_t idx : cur) avail_[idx] = false;
      search_night(i + 1, cur_gain, mask, etg_so_far + cur_gain * tails_[i]);
      for (std::size_t idx : cur) avail_[idx] = true;
      return;
    }

    const std::size_t j = order_[pos];
    const auto& o = inst_.observations[j];

    bool can_include = cur_proc + o.processing <= horizon_;
    if (can_include && cfg_.use_dg && i > 0 && cur_gain + o.gain > prev_gain)
      can_include = false;
    if (can_include && cfg_.use_bo &&
        static_cast<int>(cur.size()) + 1 > bound_obs_)
      can_include = false;
    if (can_include) {
      ObsMask with = mask;
      with.set(j);
      cur.push_back(j);
      if (night_feasible(with, cur))
        extend(i, pos + 1, cur, cur_gain + o.gain, cur_proc + o.processing,
               with, etg_so_far, prev_gain, prev_mask);
      cur.pop_back();
    }
    extend(i, pos + 1, cur, cur_gain, cur_proc, mask, etg_so_far, prev_gain,
           prev_mask);
  }

  // Admissible bound on the best completion of the current node: the minimum
  // of a per-item tail bound and a fractional packing relaxation over the
  // remaining night capacities, plus the decreasing-gain cap when active.
  double upper_bound(int i, std::size_t pos, int cur_gain, int cur_proc,
                     const ObsMask& mask, double etg_so_far, int prev_gain) {
    const double tail_i = tails_[i];
    const double tail_next = i + 1 < M_ ? tails_[i + 1] : 0.0;
    double weak = etg_so_far + cur_gain * tail_i;
    double cap = etg_so_far + cur_gain * tail_i;

    int slot = i;
    double slot_cap = horizon_ - cur_proc;
    for (std::size_t t = 0; t < S_; ++t) {
      const std::size_t j = order_[t];
      if (!avail_[j] || mask.test(j)) continue;
      const auto& o = inst_.observations[j];
      weak += o.gain * (t >= pos ? tail_i : tail_next);
      double remaining = o.processing;
      const double density = static_cast<double>(o.gain) / o.processing;
      while (remaining > 0.0 && slot < M_ && tails_[slot] > 0.0) {
        if (slot_cap <= 0.0) {
          ++slot;
          slot_cap = horizon_;
          continue;
        }
        const double take = std::min(remaining, slot_cap);
        cap += take * density * tails_[slot];
        slot_cap -= take;
        remaining -= take;
      }
    }
    double ub = std::min(weak, cap);
    if (cfg_.use_dg && i > 0)
      ub = std::min(ub, etg_so_far + prev_gain * suffix_tail_[i]);
    return ub;
  }

  void rebuild_incumbent() {
    Schedule sched;
    sched.nights.resize(M_);
    for (int i = 0; i < M_; ++i) {
      auto placed = sequencer_.sequence(night_subsets_[i]);
      if (!placed)
        throw std::logic_error("incumbent night lost feasibility");
      sched.nights[i] = plan_from_placements(inst_.observations, *placed);
    }
    incumbent_ = std::move(sched);
  }

  void assert_increasing_cumulative() const {
    long long cumul = 0;
    long long prev = 0;
    for (int i = 0; i < M_; ++i) {
      cumul += night_gains_[i];
      if (cumul < prev)
        throw std::logic_error("cumulative gain decreased on an incumbent");
      prev = cumul;
    }
  }

  const Instance& inst_;
  SolverConfig cfg_;
  Sequencer sequencer_;
  int M_;
  std::size_t S_;
  std::vector<double> tails_;
  std::vector<double> suffix_tail_;
  int horizon_ = 0;
  int bound_obs_ = 0;
  std::vector<std::size_t> order_;

  std::vector<bool> avail_;
  std::vector<std::vector<std::size_t>> night_subsets_;
  std::vector<int> night_gains_;
  std::unordered_map<ObsMask, bool, ObsMaskHash> feas_cache_;

  Schedule incumbent_;
  double incumbent_etg_ = 0.0;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// Exact when run to completion (proven_optimal); under a time or node limit
// the best schedule found so far is returned with proven_optimal = false.
// Deterministic for a fixed instance and config.
inline SolveResult solve_stochastic(const Instance& inst,
                                    const SolverConfig& cfg = {}) {
  detail::StochasticSearch search(inst, cfg);
  return search.run();
}

}  // namespace nightsched
