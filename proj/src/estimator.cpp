#include "crowdcount/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crowdcount {

void ObservedGaps::validate() const {
  int floor_gap = std::max(1, t_min);
  for (int g : gaps)
    if (g < floor_gap)
      throw std::invalid_argument("gap below the identifiable minimum");
  if (!timestamps.empty()) {
    if (timestamps.size() != gaps.size())
      throw std::invalid_argument("timestamps must align with gaps");
    for (std::size_t i = 1; i < timestamps.size(); ++i)
      if (!(timestamps[i] > timestamps[i - 1]))
        throw std::invalid_argument("timestamps must be strictly increasing");
  }
}

double log_likelihood(const ObservedGaps& gaps, const CountPmf& pmf) {
  if (gaps.gaps.empty()) throw std::runtime_error("no observations");
  gaps.validate();
  if (std::max(1, gaps.t_min) != std::max(1, pmf.t_min))
    throw std::invalid_argument("pmf truncation does not match gaps");
  double total = 0.0;
  for (int g : gaps.gaps)
    total += std::log(std::max(pmf.at(g), kLogFloorProb));
  return total;
}

EstimateResult estimate_count(const ObservedGaps& gaps,
                              const InterEventCcdf& ccdf, int m_max) {
  if (m_max < 1) throw std::invalid_argument("m_max must be positive");
  if (gaps.gaps.empty()) throw std::runtime_error("no observations");
  gaps.validate();
  auto family = pmf_family(ccdf, gaps.t_min, m_max);

  EstimateResult out;
  out.n_observations = static_cast<int>(gaps.gaps.size());
  out.loglik.reserve(family.size());
  for (const auto& pmf : family) out.loglik.push_back(log_likelihood(gaps, pmf));
  out.n_hat = 1 + static_cast<int>(std::max_element(out.loglik.begin(),
                                                    out.loglik.end()) -
                                   out.loglik.begin());
  return out;
}

std::vector<std::pair<double, int>> estimate_over_time(
    const ObservedGaps& gaps, const InterEventCcdf& ccdf, int m_max,
    double checkpoint_s) {
  if (m_max < 1) throw std::invalid_argument("m_max must be positive");
  if (!(checkpoint_s > 0.0))
    throw std::invalid_argument("checkpoint interval must be positive");
  if (gaps.gaps.empty()) throw std::runtime_error("no observations");
  if (!gaps.has_timestamps()) throw std::runtime_error("timestamps required");
  gaps.validate();

  auto family = pmf_family(ccdf, gaps.t_min, m_max);
  const std::size_t n = gaps.gaps.size();
  const std::size_t m = family.size();

  // Per-gap log terms; prefix log-likelihoods are running sums of these.
  std::vector<std::vector<double>> terms(m, std::vector<double>(n));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i)
      terms[j][i] =
          std::log(std::max(family[j].at(gaps.gaps[i]), kLogFloorProb));

  double last = gaps.timestamps.back();
  int n_checkpoints = static_cast<int>(std::ceil(last / checkpoint_s - 1e-12));
  n_checkpoints = std::max(n_checkpoints, 1);

  std::vector<std::pair<double, int>> out;
  std::vector<double> running(m, 0.0);
  std::size_t next_gap = 0;
  for (int c = 1; c <= n_checkpoints; ++c) {
    double t = c * checkpoint_s;
    while (next_gap < n && gaps.timestamps[next_gap] <= t) {
      for (std::size_t j = 0; j < m; ++j) running[j] += terms[j][next_gap];
      ++next_gap;
    }
    if (next_gap == 0) continue;  // nothing observed yet
    int best = 1 + static_cast<int>(
                       std::max_element(running.begin(), running.end()) -
                       running.begin());
    out.emplace_back(t, best);
  }
  return out;
}

ObservedGaps gaps_from_events(const std::vector<std::int64_t>& event_steps,
                              int t_min_steps, double dt_s) {
  if (event_steps.size() < 2) throw std::runtime_error("insufficient events");
  for (std::size_t i = 1; i < event_steps.size(); ++i)
    if (event_steps[i] <= event_steps[i - 1])
      throw std::invalid_argument("event steps must be strictly increasing");

  ObservedGaps out;
  out.t_min = std::max(0, t_min_steps);
  out.dt_s = dt_s;
  std::int64_t prev_kept = event_steps.front();
  for (std::size_t i = 1; i < event_steps.size(); ++i) {
    std::int64_t gap = event_steps[i] - prev_kept;
    if (gap < std::max<std::int64_t>(1, t_min_steps)) continue;
    out.gaps.push_back(static_cast<int>(gap));
    out.timestamps.push_back(static_cast<double>(event_steps[i]) * dt_s);
    prev_kept = event_steps[i];
  }
  if (out.gaps.empty()) throw std::runtime_error("insufficient events");
  return out;
}

}  // namespace crowdcount
