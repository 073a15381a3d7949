// Exact solver for the one-night subproblem: select and sequence a
// maximum-gain feasible subset of observations within a single night.
#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "nightsched/core.hpp"

namespace nightsched {

struct NightPool {
  std::vector<Observation> candidates;
};

namespace detail {

// Index-based sequencing engine. Candidates are held sorted by
// (deadline, release, id); feasibility search is depth-first over that order,
// placing each chosen observation at the earliest start after the previous
// placement's end and its own release. The first feasible permutation found
// defines the canonical plan.
class Sequencer {
 public:
  explicit Sequencer(const std::vector<Observation>& observations) {
    order_.resize(observations.size());
    for (std::size_t i = 0; i < observations.size(); ++i) order_[i] = i;
    std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      const Observation& oa = observations[a];
      const Observation& ob = observations[b];
      if (oa.deadline != ob.deadline) return oa.deadline < ob.deadline;
      if (oa.release != ob.release) return oa.release < ob.release;
      return oa.id < ob.id;
    });
    obs_ = &observations;
  }

  // `subset` holds indices into the observation vector given at construction.
  // Returns (index, start) pairs in execution order, or nullopt.
  std::optional<std::vector<std::pair<std::size_t, int>>> sequence(
      const std::vector<std::size_t>& subset) const {
    std::vector<std::size_t> items;
    for (std::size_t idx : order_)
      if (std::find(subset.begin(), subset.end(), idx) != subset.end())
        items.push_back(idx);
    std::vector<std::pair<std::size_t, int>> placed;
    placed.reserve(items.size());
    std::vector<bool> used(items.size(), false);
    if (dfs(items, used, 0, placed)) return placed;
    return std::nullopt;
  }

 private:
  bool dfs(const std::vector<std::size_t>& items, std::vector<bool>& used,
           int time, std::vector<std::pair<std::size_t, int>>& placed) const {
    if (placed.size() == items.size()) return true;
    for (std::size_t k = 0; k < items.size(); ++k) {
      if (used[k]) continue;
      const Observation& o = (*obs_)[items[k]];
      const int start = std::max(time, o.release);
      if (start + o.processing > o.deadline) continue;
      used[k] = true;
      placed.emplace_back(items[k], start);
      if (dfs(items, used, start + o.processing, placed)) return true;
      placed.pop_back();
      used[k] = false;
    }
    return false;
  }

  const std::vector<Observation>* obs_ = nullptr;
  std::vector<std::size_t> order_;
};

inline NightPlan plan_from_placements(
    const std::vector<Observation>& observations,
    const std::vector<std::pair<std::size_t, int>>& placed) {
  NightPlan plan;
  for (const auto& [idx, start] : placed)
    plan.placements.push_back({observations[idx].id, start});
  std::sort(plan.placements.begin(), plan.placements.end(),
            [](const PlacedObservation& a, const PlacedObservation& b) {
              return a.start < b.start;
            });
  return plan;
}

}  // namespace detail

// Finds a valid non-overlapping placement of every observation in `subset`,
// or nullopt if no ordering fits. Deterministic: the canonical plan is the
// one produced by the earliest-deadline-first depth-first search.
inline std::optional<NightPlan> sequence_feasible(
    const std::vector<Observation>& subset) {
  detail::Sequencer seq(subset);
  std::vector<std::size_t> all(subset.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto placed = seq.sequence(all);
  if (!placed) return std::nullopt;
  return detail::plan_from_placements(subset, *placed);
}

namespace detail {

// Tie-break among equal-gain feasible subsets: fewer observations first,
// then lexicographically smallest sorted id sequence.
struct SubsetChoice {
  int gain = -1;
  std::vector<std::size_t> subset;
  std::vector<std::string> sorted_ids;

  bool beats(const SubsetChoice& other) const {
    if (other.gain < 0) return true;
    if (gain != other.gain) return gain > other.gain;
    if (subset.size() != other.subset.size())
      return subset.size() < other.subset.size();
    return sorted_ids < other.sorted_ids;
  }
};

inline std::vector<std::string> sorted_ids_of(
    const std::vector<Observation>& obs, const std::vector<std::size_t>& subset) {
  std::vector<std::string> ids;
  ids.reserve(subset.size());
  for (std::size_t idx : subset) ids.push_back(obs[idx].id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace detail

// Maximum-gain feasible night over all subsets of the pool. Exact: branch and
// bound over inclusion decisions with the sequencing check as the feasibility
// oracle (supersets of an infeasible subset are pruned, feasibility being
// monotone under removal).
inline NightPlan best_single_night(const NightPool& pool) {
  const std::vector<Observation>& obs = pool.candidates;
  detail::Sequencer seq(obs);

  // Branch in non-increasing gain density so strong incumbents appear early.
  std::vector<std::size_t> order(obs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double da = static_cast<double>(obs[a].gain) / obs[a].processing;
    const double db = static_cast<double>(obs[b].gain) / obs[b].processing;
    if (da != db) return da > db;
    return obs[a].id < obs[b].id;
  });

  std::vector<int> suffix_gain(order.size() + 1, 0);
  for (std::size_t i = order.size(); i-- > 0;)
    suffix_gain[i] = suffix_gain[i + 1] + obs[order[i]].gain;

  detail::SubsetChoice best;
  best.gain = -1;
  std::vector<std::size_t> current;

  auto consider = [&](int gain) {
    if (gain < best.gain) return;
    detail::SubsetChoice cand;
    cand.gain = gain;
    cand.subset = current;
    cand.sorted_ids = detail::sorted_ids_of(obs, current);
    if (cand.beats(best)) best = std::move(cand);
  };

  // DFS over positions; include branch first. Prune only when the remaining
  // gain cannot reach the incumbent (ties must still be explored so the
  // tie-break rule sees every maximum-gain subset).
  auto dfs = [&](auto&& self, std::size_t pos, int gain) -> void {
    if (gain + suffix_gain[pos] < best.gain) return;
    if (pos == order.size()) {
      consider(gain);
      return;
    }
    current.push_back(order[pos]);
    if (seq.sequence(current)) self(self, pos + 1, gain + obs[order[pos]].gain);
    current.pop_back();
    self(self, pos + 1, gain);
  };
  dfs(dfs, 0, 0);

  auto placed = seq.sequence(best.subset);
  return detail::plan_from_placements(obs, *placed);
}

}  // namespace nightsched
