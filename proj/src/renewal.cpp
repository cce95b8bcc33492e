#include "crowdcount/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace crowdcount {

namespace {

struct KahanSum {
  double total = 0.0;
  double carry = 0.0;
  void add(double v) {
    double y = v - carry;
    double t = total + y;
    carry = (t - total) - y;
    total = t;
  }
};

// Recurrence-tail table: tails[z] = sum_{m=z}^{z_max} w(m) for z = 1..z_max+1
// (tails[z_max+1] = 0, tails[0] unused), with w(m) proportional to
// p_c * F_c(m) and rescaled to unit total mass. The crossing probability
// cancels under the rescaling, so only the CCDF shape enters.
std::vector<double> recurrence_tails(const InterEventCcdf& ccdf) {
  ccdf.validate();
  const int zmax = ccdf.z_max();
  std::vector<double> tails(static_cast<std::size_t>(zmax) + 2, 0.0);
  long double acc = 0.0L;
  for (int z = zmax; z >= 1; --z) {
    acc += ccdf.tail[z];
    tails[z] = static_cast<double>(acc);
  }
  double total = tails[1];
  if (!(total > 0.0)) throw std::runtime_error("degenerate PMF");
  for (int z = 1; z <= zmax; ++z) tails[z] /= total;
  return tails;
}

// powered[z] must hold tails[z]^n. Forms the recurrence-time PMF by first
// difference, takes the second difference, orients it non-negative, and
// normalizes over z = 1..z_max.
CountPmf pmf_from_powered(const std::vector<double>& powered, int n_people,
                          int zmax) {
  std::vector<double> age(static_cast<std::size_t>(zmax) + 2, 0.0);
  for (int z = 1; z <= zmax; ++z)
    age[z] = powered[z] - (z + 1 <= zmax ? powered[z + 1] : 0.0);

  CountPmf out;
  out.n_people = n_people;
  out.probs.assign(static_cast<std::size_t>(zmax) + 1, 0.0);
  KahanSum total;
  for (int z = 1; z <= zmax; ++z) {
    double mass = age[z] - age[z + 1];
    if (mass < 0.0) mass = 0.0;  // floating-point crumbs only
    out.probs[z] = mass;
    total.add(mass);
  }
  // A table with no decay parks all its mass in the terminal bin (an
  // artifact of the truncation convention); treat that as inconsistent
  // input rather than a distribution.
  if (!(total.total > 0.0) ||
      (zmax > 1 && !(total.total - out.probs[zmax] > 1e-12 * total.total)))
    throw std::runtime_error("degenerate PMF");
  for (int z = 1; z <= zmax; ++z) out.probs[z] /= total.total;
  out.norm_const = 1.0 / total.total;
  out.t_min = 0;
  return out;
}

}  // namespace

double CountPmf::sum() const {
  KahanSum acc;
  for (double p : probs) acc.add(p);
  return acc.total;
}

double CountPmf::mean() const {
  KahanSum acc;
  for (int z = 1; z <= z_max(); ++z) acc.add(z * probs[z]);
  return acc.total;
}

SuperposedRecurrenceCcdf superposed_recurrence_ccdf(const InterEventCcdf& ccdf,
                                                    int n_people) {
  if (n_people < 1) throw std::invalid_argument("count must be positive");
  auto tails = recurrence_tails(ccdf);
  const int zmax = ccdf.z_max();
  std::vector<double> powered(tails.begin(), tails.end());
  for (int i = 1; i < n_people; ++i)
    for (int z = 1; z <= zmax; ++z) powered[z] *= tails[z];

  SuperposedRecurrenceCcdf out;
  out.n_people = n_people;
  out.tail.assign(static_cast<std::size_t>(zmax) + 1, 0.0);
  out.tail[0] = 1.0;
  for (int z = 1; z <= zmax; ++z) out.tail[z] = powered[z];
  return out;
}

CountPmf superposed_interevent_pmf(const InterEventCcdf& ccdf, int n_people) {
  if (n_people < 1) throw std::invalid_argument("count must be positive");
  auto tails = recurrence_tails(ccdf);
  const int zmax = ccdf.z_max();
  std::vector<double> powered(tails.begin(), tails.end());
  for (int i = 1; i < n_people; ++i)
    for (int z = 1; z <= zmax; ++z) powered[z] *= tails[z];
  return pmf_from_powered(powered, n_people, zmax);
}

CountPmf truncated_pmf(const CountPmf& pmf, int t_min) {
  CountPmf out = pmf;
  out.t_min = std::max(0, t_min);
  if (t_min <= 1) return out;

  KahanSum kept;
  for (int z = t_min; z <= pmf.z_max(); ++z) kept.add(pmf.probs[z]);
  if (!(kept.total > 0.0))
    throw std::runtime_error("truncation removes all support");
  for (int z = 1; z <= out.z_max(); ++z) {
    if (z < t_min)
      out.probs[z] = 0.0;
    else if (std::abs(kept.total - 1.0) > 1e-12)
      out.probs[z] /= kept.total;
  }
  if (std::abs(kept.total - 1.0) > 1e-12) out.norm_const /= kept.total;
  return out;
}

std::vector<CountPmf> pmf_family(const InterEventCcdf& ccdf, int t_min,
                                 int m_max) {
  if (m_max < 1) throw std::invalid_argument("m_max must be positive");
  auto tails = recurrence_tails(ccdf);
  const int zmax = ccdf.z_max();
  std::vector<double> powered(tails.begin(), tails.end());

  std::vector<CountPmf> family;
  family.reserve(m_max);
  for (int n = 1; n <= m_max; ++n) {
    if (n > 1)
      for (int z = 1; z <= zmax; ++z) powered[z] *= tails[z];
    try {
      family.push_back(truncated_pmf(pmf_from_powered(powered, n, zmax), t_min));
    } catch (const std::exception& e) {
      throw std::runtime_error("N=" + std::to_string(n) + ": " + e.what());
    }
  }
  return family;
}

}  // namespace crowdcount
