// Core domain model for scheduling observations over identical nights with a
// stochastic number of observable nights: instance/schedule types, validation,
// and expected-total-gain evaluation.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nightsched {

inline constexpr const char* kVersion = "0.1.0";

// Tolerance used for all probability and ETG comparisons.
inline constexpr double kProbTol = 1e-9;

// One schedulable target. Times are integers on a shared per-night grid
// starting at 0; an observation must start at or after `release` and
// complete (start + processing) at or before `deadline`.
struct Observation {
  std::string id;
  int release = 0;
  int deadline = 0;
  int processing = 0;
  int gain = 0;
};

// probabilities[m] is the probability that exactly m nights are observable,
// m = 0..nights. It is not the probability that night m is clear.
struct Instance {
  int nights = 0;
  std::vector<Observation> observations;
  std::vector<double> probabilities;
};

struct PlacedObservation {
  std::string id;
  int start = 0;
};

// Placements sorted by start, pairwise non-overlapping.
struct NightPlan {
  std::vector<PlacedObservation> placements;

  bool empty() const { return placements.empty(); }
};

// Exactly M night plans; empty nights are legal. Each observation appears in
// at most one night.
struct Schedule {
  std::vector<NightPlan> nights;
};

enum class IssueKind {
  release_before_deadline,
  processing_out_of_range,
  gain_out_of_range,
  duplicate_observation_id,
  nights_out_of_range,
  probability_length_mismatch,
  probability_out_of_range,
  probability_sum,
  unknown_observation_id,
  placement_outside_window,
  placements_overlap,
  observation_in_multiple_nights,
  night_count_mismatch,
};

struct Issue {
  IssueKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Issue> issues;

  bool ok() const { return issues.empty(); }
};

inline const Observation* find_observation(const Instance& inst,
                                           const std::string& id) {
  for (const auto& o : inst.observations)
    if (o.id == id) return &o;
  return nullptr;
}

// Reports every violated invariant; never aborts.
inline ValidationReport validate_instance(const Instance& inst) {
  ValidationReport rep;
  auto add = [&rep](IssueKind k, std::string msg) {
    rep.issues.push_back({k, std::move(msg)});
  };

  if (inst.nights < 1)
    add(IssueKind::nights_out_of_range,
        "nights must be >= 1, got " + std::to_string(inst.nights));

  for (const auto& o : inst.observations) {
    if (!(o.release < o.deadline))
      add(IssueKind::release_before_deadline,
          "observation " + o.id + ": release < deadline violated (" +
              std::to_string(o.release) + " >= " + std::to_string(o.deadline) +
              ")");
    else if (o.processing < 1 || o.processing > o.deadline - o.release)
      add(IssueKind::processing_out_of_range,
          "observation " + o.id + ": processing must lie in [1, deadline - release]");
    if (o.gain < 1)
      add(IssueKind::gain_out_of_range,
          "observation " + o.id + ": gain must be >= 1");
  }

  for (std::size_t a = 0; a < inst.observations.size(); ++a)
    for (std::size_t b = a + 1; b < inst.observations.size(); ++b)
      if (inst.observations[a].id == inst.observations[b].id)
        add(IssueKind::duplicate_observation_id,
            "duplicate observation id " + inst.observations[a].id);

  if (static_cast<int>(inst.probabilities.size()) != inst.nights + 1) {
    add(IssueKind::probability_length_mismatch,
        "probabilities must have nights + 1 entries, got " +
            std::to_string(inst.probabilities.size()));
  } else {
    double sum = 0.0;
    for (std::size_t m = 0; m < inst.probabilities.size(); ++m) {
      double pi = inst.probabilities[m];
      if (pi < -kProbTol || pi > 1.0 + kProbTol)
        add(IssueKind::probability_out_of_range,
            "pi_" + std::to_string(m) + " outside [0, 1]");
      sum += pi;
    }
    if (std::fabs(sum - 1.0) > kProbTol)
      add(IssueKind::probability_sum,
          "probabilities sum to " + std::to_string(sum) + ", expected 1");
  }
  return rep;
}

// Success iff all plan/schedule invariants hold and every placed id exists.
inline ValidationReport validate_schedule(const Instance& inst,
                                          const Schedule& sched) {
  ValidationReport rep;
  auto add = [&rep](IssueKind k, std::string msg) {
    rep.issues.push_back({k, std::move(msg)});
  };

  if (static_cast<int>(sched.nights.size()) != inst.nights)
    add(IssueKind::night_count_mismatch,
        "schedule has " + std::to_string(sched.nights.size()) +
            " nights, instance declares " + std::to_string(inst.nights));

  std::vector<std::string> seen;
  for (std::size_t i = 0; i < sched.nights.size(); ++i) {
    const auto& plan = sched.nights[i];
    const std::string night = "night " + std::to_string(i + 1);
    int prev_end = 0;
    bool first = true;
    for (const auto& pl : plan.placements) {
      const Observation* obs = find_observation(inst, pl.id);
      if (obs == nullptr) {
        add(IssueKind::unknown_observation_id,
            night + ": unknown observation id " + pl.id);
        continue;
      }
      if (pl.start < obs->release || pl.start + obs->processing > obs->deadline)
        add(IssueKind::placement_outside_window,
            night + ": " + pl.id + " placed at " + std::to_string(pl.start) +
                " outside window [" + std::to_string(obs->release) + ", " +
                std::to_string(obs->deadline) + "]");
      if (!first && pl.start < prev_end)
        add(IssueKind::placements_overlap,
            night + ": " + pl.id + " overlaps the previous placement");
      prev_end = pl.start + obs->processing;
      first = false;
      if (std::find(seen.begin(), seen.end(), pl.id) != seen.end())
        add(IssueKind::observation_in_multiple_nights,
            pl.id + " scheduled more than once");
      else
        seen.push_back(pl.id);
    }
  }
  return rep;
}

// Sum of gains of the placed observations; 0 for the empty plan.
inline int night_gain(const NightPlan& plan, const Instance& inst) {
  int total = 0;
  for (const auto& pl : plan.placements) {
    const Observation* obs = find_observation(inst, pl.id);
    if (obs != nullptr) total += obs->gain;
  }
  return total;
}

inline std::vector<int> per_night_gains(const Instance& inst,
                                        const Schedule& sched) {
  std::vector<int> gains;
  gains.reserve(sched.nights.size());
  for (const auto& plan : sched.nights) gains.push_back(night_gain(plan, inst));
  return gains;
}

// tail(i) = sum of pi_m for m >= i, i = 1..M. Non-increasing by construction.
inline std::vector<double> tail_probabilities(const std::vector<double>& pi) {
  if (pi.size() <= 1) return {};
  std::vector<double> tails(pi.size() - 1, 0.0);
  double acc = 0.0;
  for (std::size_t i = pi.size() - 1; i >= 1; --i) {
    acc += pi[i];
    tails[i - 1] = acc;
  }
  return tails;
}

// Expected total gain of a valid schedule: the probability-weighted sum of
// cumulative night gains, evaluated as sum_i gain_i * tail(i).
inline double expected_total_gain(const Instance& inst,
                                  const Schedule& sched) {
  const std::vector<double> tails = tail_probabilities(inst.probabilities);
  double etg = 0.0;
  const std::size_t n = std::min(sched.nights.size(), tails.size());
  for (std::size_t i = 0; i < n; ++i)
    etg += static_cast<double>(night_gain(sched.nights[i], inst)) * tails[i];
  return etg;
}

// Step curve of cumulative gain against the number of observable nights.
// cumulative[m] = G_m for m = 0..M with G_0 = 0; widths[m] = pi_m.
// The weighted area sum_m pi_m * G_m equals the expected total gain.
struct GainCurve {
  std::vector<double> cumulative;
  std::vector<double> widths;

  double area() const {
    double a = 0.0;
    for (std::size_t m = 0; m < cumulative.size() && m < widths.size(); ++m)
      a += widths[m] * cumulative[m];
    return a;
  }
};

inline GainCurve gain_curve(const Instance& inst,
                            const std::vector<int>& per_night) {
  GainCurve curve;
  curve.cumulative.reserve(per_night.size() + 1);
  curve.cumulative.push_back(0.0);
  double acc = 0.0;
  for (int g : per_night) {
    acc += g;
    curve.cumulative.push_back(acc);
  }
  curve.widths = inst.probabilities;
  return curve;
}

// Binomial distribution over the number of observable nights: pi_k =
// C(m, k) p^k (1-p)^(m-k) for k = 0..m.
inline std::vector<double> binomial_pi(int m, double p_clear) {
  std::vector<double> pi(static_cast<std::size_t>(m) + 1, 0.0);
  // Running binomial coefficient; exact in double for the m we handle.
  double coeff = 1.0;
  for (int k = 0; k <= m; ++k) {
    if (k > 0) coeff = coeff * static_cast<double>(m - k + 1) / k;
    pi[k] = coeff * std::pow(p_clear, k) * std::pow(1.0 - p_clear, m - k);
  }
  return pi;
}

}  // namespace nightsched
