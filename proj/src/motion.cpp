#include "crowdcount/motion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace crowdcount {

MotionConfig::MotionConfig(double width, double depth, double speed, double dt,
                           double keep, double heading_step)
    : width_m(width),
      depth_m(depth),
      speed_mps(speed),
      dt_s(dt),
      keep_prob(keep),
      heading_step_rad(heading_step) {
  if (!(width_m > 0.0) || !(depth_m > 0.0))
    throw std::invalid_argument("workspace dimensions must be positive");
  if (!(speed_mps > 0.0) || !(dt_s > 0.0))
    throw std::invalid_argument("speed and time step must be positive");
  if (!(keep_prob >= 0.0 && keep_prob <= 1.0))
    throw std::invalid_argument("keep_prob must lie in [0, 1]");
  if (!(heading_step_rad > 0.0))
    throw std::invalid_argument("heading step must be positive");
  double count = kTwoPi / heading_step_rad;
  long long n = std::llround(count);
  if (n < 1 || std::abs(count - static_cast<double>(n)) > 1e-9)
    throw std::invalid_argument("heading step must divide 2*pi evenly");
  heading_count_ = static_cast<int>(n);
  if (!(step_len_m() < width_m / 2.0))
    throw std::invalid_argument("step length must be below half the width");
}

std::vector<std::int64_t> EventSequence::gaps() const {
  std::vector<std::int64_t> out;
  if (event_steps.size() < 2) return out;
  out.reserve(event_steps.size() - 1);
  for (std::size_t i = 1; i < event_steps.size(); ++i)
    out.push_back(event_steps[i] - event_steps[i - 1]);
  return out;
}

double InterEventCcdf::renewal_sum() const {
  long double acc = 0.0L;
  for (int z = 1; z <= z_max(); ++z) acc += tail[z];
  return static_cast<double>(acc * crossing_prob);
}

void InterEventCcdf::validate() const {
  if (tail.size() < 2)
    throw std::invalid_argument("ccdf table needs entries for z = 0 and 1");
  if (std::abs(tail[0] - 1.0) > 1e-12 || std::abs(tail[1] - 1.0) > 1e-12)
    throw std::invalid_argument("ccdf must start with tail[0] = tail[1] = 1");
  for (std::size_t z = 0; z < tail.size(); ++z) {
    if (!(tail[z] >= 0.0 && tail[z] <= 1.0 + 1e-12))
      throw std::invalid_argument("ccdf values must lie in [0, 1]");
    if (z > 0 && tail[z] > tail[z - 1] + 1e-12)
      throw std::invalid_argument("ccdf must be non-increasing");
  }
}

double step_heading(const PersonState& state, const MotionConfig& cfg,
                    Rng& rng) {
  if (rng.uniform() < cfg.keep_prob) return state.heading_rad;
  return cfg.heading_step_rad *
         static_cast<double>(rng.uniform_int(cfg.heading_count()));
}

namespace {

// Snap a (possibly reflected) heading back onto the grid and into [0, 2*pi).
double canonical_heading(double heading, const MotionConfig& cfg) {
  long long k = std::llround(heading / cfg.heading_step_rad);
  long long n = cfg.heading_count();
  k = ((k % n) + n) % n;
  return cfg.heading_step_rad * static_cast<double>(k);
}

}  // namespace

PersonState step_position(const PersonState& state, const MotionConfig& cfg) {
  double x = state.x_m + cfg.step_len_m() * std::cos(state.heading_rad);
  double y = state.y_m + cfg.step_len_m() * std::sin(state.heading_rad);
  bool flip_x = false;
  bool flip_y = false;
  while (x < 0.0 || x > cfg.width_m) {
    x = (x < 0.0) ? -x : 2.0 * cfg.width_m - x;
    flip_x = !flip_x;
  }
  while (y < 0.0 || y > cfg.depth_m) {
    y = (y < 0.0) ? -y : 2.0 * cfg.depth_m - y;
    flip_y = !flip_y;
  }
  double heading = state.heading_rad;
  if (flip_x) heading = kPi - heading;
  if (flip_y) heading = -heading;
  if (flip_x || flip_y) heading = canonical_heading(heading, cfg);
  return {x, y, heading};
}

bool detect_crossing(double x_prev, double x_next, const MotionConfig& cfg) {
  double mid = cfg.line_x();
  return (x_prev - mid) * (x_next - mid) <= 0.0;
}

PersonState random_state(const MotionConfig& cfg, Rng& rng) {
  return {rng.uniform(0.0, cfg.width_m), rng.uniform(0.0, cfg.depth_m),
          cfg.heading_step_rad *
              static_cast<double>(rng.uniform_int(cfg.heading_count()))};
}

EventSequence simulate_events(const MotionConfig& cfg, std::int64_t steps,
                              PersonState initial, Rng& rng) {
  if (steps < 1) throw std::invalid_argument("steps must be at least 1");
  PersonState s = initial;
  CrossingDetector detector(cfg.line_x(), s.x_m);
  EventSequence out;
  out.horizon = steps;
  for (std::int64_t k = 1; k < steps; ++k) {
    s.heading_rad = step_heading(s, cfg, rng);
    s = step_position(s, cfg);
    if (detector.step(s.x_m)) out.event_steps.push_back(k);
  }
  return out;
}

EventSequence simulate_person(const MotionConfig& cfg, std::int64_t steps,
                              std::uint64_t seed) {
  Rng rng(seed);
  PersonState s = random_state(cfg, rng);
  for (int i = 0; i < kBurnInSteps; ++i) {
    s.heading_rad = step_heading(s, cfg, rng);
    s = step_position(s, cfg);
  }
  return simulate_events(cfg, steps, s, rng);
}

InterEventCcdf empirical_interevent_ccdf(const EventSequence& events,
                                         int z_max) {
  if (events.event_steps.size() < 2)
    throw std::runtime_error("insufficient events for CCDF");
  auto gaps = events.gaps();
  std::sort(gaps.begin(), gaps.end());
  const std::size_t n = gaps.size();

  if (z_max <= 0) {
    // Smallest z with #(T >= z)/n below tolerance: z = (k-th smallest
    // gap) + 1 where k is the least count of gaps that must lie below z.
    double threshold = kCcdfTailTolerance * static_cast<double>(n);
    double k_real = std::floor(static_cast<double>(n) - threshold) + 1.0;
    std::size_t k = static_cast<std::size_t>(std::max(1.0, k_real));
    if (k > n) k = n;
    std::int64_t z = gaps[k - 1] + 1;
    z_max = static_cast<int>(std::min<std::int64_t>(z, kCcdfMaxZ));
    z_max = std::max(z_max, 2);
  }

  InterEventCcdf out;
  out.tail.assign(static_cast<std::size_t>(z_max) + 1, 0.0);
  // tail[z] = #(gaps >= z) / n, via a single sweep over the sorted gaps.
  std::size_t i = 0;
  for (int z = 0; z <= z_max; ++z) {
    while (i < n && gaps[i] < z) ++i;
    out.tail[z] = static_cast<double>(n - i) / static_cast<double>(n);
  }
  out.crossing_prob = static_cast<double>(events.event_steps.size()) /
                      static_cast<double>(events.horizon);
  return out;
}

double crossing_probability(const MotionConfig& cfg) {
  return 2.0 * cfg.speed_mps * cfg.dt_s / (cfg.width_m * kPi);
}

}  // namespace crowdcount
