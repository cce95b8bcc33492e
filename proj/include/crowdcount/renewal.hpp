#pragma once

#include <vector>

#include "crowdcount/motion.hpp"

namespace crowdcount {

// Tail distribution P(Z >= z) of the superposed backward recurrence time
// (the minimum over the walkers' individual recurrence times).
struct SuperposedRecurrenceCcdf {
  int n_people = 0;
  std::vector<double> tail;  // index z = 0..z_max; tail[0] = 1

  int z_max() const { return static_cast<int>(tail.size()) - 1; }
  double at(int z) const { return (z >= 0 && z <= z_max()) ? tail[z] : 0.0; }
};

// Inter-event time distribution of the merged crossing stream for a
// candidate walker count, optionally conditioned on gaps >= t_min.
struct CountPmf {
  int n_people = 0;
  std::vector<double> probs;  // index z = 0..z_max; probs[0] = 0
  int t_min = 0;              // steps; 0 when untruncated
  double norm_const = 0.0;    // total normalizing constant actually applied

  int z_max() const { return static_cast<int>(probs.size()) - 1; }
  double at(int z) const { return (z >= 0 && z <= z_max()) ? probs[z] : 0.0; }
  double sum() const;
  double mean() const;
};

// Tabulated P(Z >= z) = [sum_{m>=z} w(m)]^n where w is the per-step event-age
// weight p_c * F_c(m), rescaled so the z = 1 tail is exactly 1 (the renewal
// identity holds only approximately for truncated empirical tables).
SuperposedRecurrenceCcdf superposed_recurrence_ccdf(const InterEventCcdf& ccdf,
                                                    int n_people);

// Inter-event PMF of the merged stream: second difference of the powered
// recurrence tail, oriented non-negative and normalized over z = 1..z_max.
CountPmf superposed_interevent_pmf(const InterEventCcdf& ccdf, int n_people);

// Conditional law given gaps >= t_min: mass below t_min is zeroed and the
// rest renormalized. t_min of 0 or 1 is the identity.
CountPmf truncated_pmf(const CountPmf& pmf, int t_min);

// Truncated PMFs for every candidate count 1..m_max. Errors from an inner
// build are rethrown with the offending count attached.
std::vector<CountPmf> pmf_family(const InterEventCcdf& ccdf, int t_min,
                                 int m_max);

}  // namespace crowdcount
