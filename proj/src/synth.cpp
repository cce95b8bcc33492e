#include "crowdcount/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crowdcount {

namespace {

// Sub-stream tags for the per-command seed.
constexpr std::uint64_t kRippleStream = 0x52495050ull;  // ripple noise
constexpr std::uint64_t kRenderStream = 0x44495053ull;  // dip shapes
constexpr std::uint64_t kWalkerStreamBase = 1;          // walker j uses 1 + j

// One-pole low-pass filter coefficient; at 20 samples/s this gives a ripple
// correlation time of a few tenths of a second.
constexpr double kRippleFilter = 0.25;

// Ripple amplitude as a fraction of the clip bound. Chosen so a few tenths
// of a percent of samples reach the bound: the 99.9th-percentile excursion
// then sits at the bound itself, which the calibration rule needs.
constexpr double kRippleSigmaFactor = 1.0 / 2.8;

std::vector<double> ripple_samples(const SynthConfig& cfg, std::size_t n) {
  Rng rng(derive_seed(cfg.seed, kRippleStream));
  double sigma_x = 1.0;
  // Stationary sigma of y[i] = (1-b) y[i-1] + b x[i].
  double sigma_y = sigma_x * std::sqrt(kRippleFilter / (2.0 - kRippleFilter));
  double scale = cfg.ripple_db * kRippleSigmaFactor / sigma_y;

  std::vector<double> out(n);
  double y = 0.0;
  for (int i = 0; i < 200; ++i)  // reach stationarity before t = 0
    y += kRippleFilter * (rng.normal() - y);
  for (std::size_t i = 0; i < n; ++i) {
    y += kRippleFilter * (rng.normal() - y);
    out[i] = std::clamp(y * scale, -cfg.ripple_db, cfg.ripple_db);
  }
  return out;
}

// Flat-topped dip profile with raised-cosine edges; u in [0, 1].
double dip_profile(double u) {
  constexpr double kRamp = 0.25;
  if (u <= 0.0 || u >= 1.0) return 0.0;
  if (u < kRamp) return 0.5 * (1.0 - std::cos(kPi * u / kRamp));
  if (u > 1.0 - kRamp) return 0.5 * (1.0 - std::cos(kPi * (1.0 - u) / kRamp));
  return 1.0;
}

}  // namespace

void SynthConfig::validate() const {
  if (!(dip_depth_min_db > ripple_db))
    throw std::invalid_argument(
        "minimum dip depth must exceed the ripple bound");
  if (!(dip_depth_max_db >= dip_depth_min_db))
    throw std::invalid_argument("dip depth range is inverted");
  if (!(dip_width_s > 0.0)) throw std::invalid_argument("dip width must be positive");
  if (!(sample_rate > 0.0))
    throw std::invalid_argument("sample rate must be positive");
  if (!(duration_s > 0.0))
    throw std::invalid_argument("duration must be positive");
  if (n_people < 0) throw std::invalid_argument("n_people must be >= 0");
  if (!(ripple_db > 0.0)) throw std::invalid_argument("ripple must be positive");
}

RssiTrace render_trace(const SynthConfig& cfg,
                       const std::vector<double>& crossings_s) {
  cfg.validate();
  const std::size_t n =
      static_cast<std::size_t>(std::lround(cfg.duration_s * cfg.sample_rate));

  RssiTrace trace;
  trace.sample_rate = cfg.sample_rate;
  trace.t_s.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    trace.t_s[i] = static_cast<double>(i) / cfg.sample_rate;

  // Depression below the clean level; overlapping dips take the deeper value.
  std::vector<double> depression(n, 0.0);
  Rng render_rng(derive_seed(cfg.seed, kRenderStream));
  for (double start : crossings_s) {
    double depth = render_rng.uniform(cfg.dip_depth_min_db, cfg.dip_depth_max_db);
    double width = cfg.dip_width_s * render_rng.uniform(0.8, 1.2);
    auto first = static_cast<std::int64_t>(std::ceil(start * cfg.sample_rate));
    auto last =
        static_cast<std::int64_t>(std::floor((start + width) * cfg.sample_rate));
    first = std::max<std::int64_t>(first, 0);
    last = std::min<std::int64_t>(last, static_cast<std::int64_t>(n) - 1);
    for (std::int64_t i = first; i <= last; ++i) {
      double u = (trace.t_s[static_cast<std::size_t>(i)] - start) / width;
      depression[static_cast<std::size_t>(i)] =
          std::max(depression[static_cast<std::size_t>(i)], depth * dip_profile(u));
    }
  }

  auto ripple = ripple_samples(cfg, n);
  trace.rssi_db.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // A blocked line mutes multipath; fade the ripple out inside deep dips,
    // so the rendered trough depth is exactly the drawn dip depth.
    double mute = std::clamp(1.0 - depression[i] / cfg.dip_depth_min_db, 0.0, 1.0);
    trace.rssi_db[i] = cfg.base_dbm - depression[i] + ripple[i] * mute;
  }
  return trace;
}

LabeledTrace synthesize(const SynthConfig& cfg) {
  cfg.validate();
  const auto steps =
      static_cast<std::int64_t>(std::lround(cfg.duration_s / cfg.motion.dt_s));

  std::vector<std::int64_t> merged_steps;
  for (int j = 0; j < cfg.n_people; ++j) {
    auto events = simulate_person(cfg.motion, steps,
                                  derive_seed(cfg.seed, kWalkerStreamBase + j));
    merged_steps.insert(merged_steps.end(), events.event_steps.begin(),
                        events.event_steps.end());
  }
  std::sort(merged_steps.begin(), merged_steps.end());
  merged_steps.erase(std::unique(merged_steps.begin(), merged_steps.end()),
                     merged_steps.end());

  LabeledTrace out;
  out.n_true = cfg.n_people;
  out.true_crossings_s.reserve(merged_steps.size());
  for (std::int64_t k : merged_steps)
    out.true_crossings_s.push_back(static_cast<double>(k) * cfg.motion.dt_s);
  out.trace = render_trace(cfg, out.true_crossings_s);
  return out;
}

RssiTrace multipath_only(const SynthConfig& cfg) {
  return render_trace(cfg, {});
}

}  // namespace crowdcount
