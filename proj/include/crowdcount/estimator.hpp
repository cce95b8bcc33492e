#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "crowdcount/renewal.hpp"

namespace crowdcount {

// Log-probability floor for gaps the candidate model deems impossible
// (outside the table or zero mass); keeps every log-likelihood finite.
inline constexpr double kLogFloorProb = 1e-12;

// Observed inter-event times, in steps, each >= max(1, t_min).
struct ObservedGaps {
  std::vector<int> gaps;
  int t_min = 0;     // steps; minimum identifiable gap
  double dt_s = 0.0; // seconds per step
  // Optional gap end-times in seconds, aligned with `gaps` and strictly
  // increasing; empty when unavailable.
  std::vector<double> timestamps;

  bool has_timestamps() const { return !timestamps.empty(); }
  void validate() const;
};

// Log-likelihood table over candidate counts and its (smallest) argmax.
struct EstimateResult {
  int n_hat = 0;
  std::vector<double> loglik;  // loglik[m-1] = LL(m) for m = 1..m_max
  int n_observations = 0;
};

// Sum of log pmf values over the observed gaps, with the probability floor
// applied to out-of-support gaps. The pmf must carry the same effective
// truncation as the gaps.
double log_likelihood(const ObservedGaps& gaps, const CountPmf& pmf);

// ML count estimate: builds the truncated PMF family for 1..m_max and
// returns the smallest maximizer of the log-likelihood.
EstimateResult estimate_count(const ObservedGaps& gaps,
                              const InterEventCcdf& ccdf, int m_max);

// Running estimate at multiples of checkpoint_s (final checkpoint covers the
// last gap): estimate_count on the prefix of gaps observed by each time.
// Checkpoints with no observed gaps are omitted. Requires timestamps.
std::vector<std::pair<double, int>> estimate_over_time(
    const ObservedGaps& gaps, const InterEventCcdf& ccdf, int m_max,
    double checkpoint_s);

// Event-sequence mode: gaps are successive differences of event steps, with
// events closer than t_min to the previous kept event dropped as
// unidentifiable. Timestamps are the kept events' times in seconds.
ObservedGaps gaps_from_events(const std::vector<std::int64_t>& event_steps,
                              int t_min_steps, double dt_s);

}  // namespace crowdcount
