#pragma once

#include <cstdint>
#include <vector>

#include "crowdcount/rng.hpp"

namespace crowdcount {

// Steps of walking discarded before events are recorded, so that recorded
// runs start from (approximately) the stationary position/heading law.
inline constexpr int kBurnInSteps = 1000;

// Automatic CCDF truncation: table ends at the first z whose empirical tail
// falls below this tolerance, capped at kCcdfMaxZ steps.
inline constexpr double kCcdfTailTolerance = 1e-4;
inline constexpr int kCcdfMaxZ = 4000;

// Workspace geometry and walk dynamics for a single walker. The monitored
// sightline runs across the workspace at x = width/2; walkers reflect off
// the walls like light rays.
struct MotionConfig {
  double width_m;           // extent along x (m)
  double depth_m;           // extent along y (m)
  double speed_mps;         // walking speed (m/s)
  double dt_s;              // simulation time step (s)
  double keep_prob;         // probability of keeping the current heading each step
  double heading_step_rad;  // heading grid spacing; must divide 2*pi evenly

  // Validates all invariants (positive dimensions, keep_prob in [0,1],
  // integral heading count, step length below half the width).
  MotionConfig(double width, double depth, double speed, double dt,
               double keep, double heading_step);

  int heading_count() const { return heading_count_; }
  double step_len_m() const { return speed_mps * dt_s; }
  double line_x() const { return width_m / 2.0; }

 private:
  int heading_count_;
};

struct PersonState {
  double x_m;
  double y_m;
  double heading_rad;  // member of the heading grid {0, step, ..., 2*pi - step}
};

// Time-step indices at which a walker crossed the monitored line.
struct EventSequence {
  std::vector<std::int64_t> event_steps;  // strictly increasing, < horizon
  std::int64_t horizon = 0;               // total simulated steps

  // Inter-event times (successive differences), all >= 1.
  std::vector<std::int64_t> gaps() const;
};

// Tabulated tail distribution P(T >= z) of single-walker inter-event times,
// plus the per-step crossing probability.
struct InterEventCcdf {
  std::vector<double> tail;    // index z = 0..z_max; tail[0] = tail[1] = 1
  double crossing_prob = 0.0;  // per-step probability of a crossing

  int z_max() const { return static_cast<int>(tail.size()) - 1; }
  double at(int z) const {
    return (z >= 0 && z <= z_max()) ? tail[z] : 0.0;
  }
  // Sum_{m>=1} crossing_prob * tail[m]; equals 1 when the table and the
  // crossing probability come from the same run (renewal identity).
  double renewal_sum() const;
  // Throws std::invalid_argument when a table invariant is broken.
  void validate() const;
};

// Next heading: kept with probability keep_prob, otherwise redrawn uniformly
// from the heading grid (the redraw may land on the old heading).
double step_heading(const PersonState& state, const MotionConfig& cfg, Rng& rng);

// Advances one step along the current heading; segments leaving the
// workspace are mirror-reflected off the violated wall (x-walls flip the
// heading's cosine, y-walls its sine) until the point is inside.
PersonState step_position(const PersonState& state, const MotionConfig& cfg);

// Raw segment predicate: true iff [x_prev, x_next] straddles or touches the
// monitored line. Sequence-level tie-breaking for steps that land exactly on
// the line lives in CrossingDetector.
bool detect_crossing(double x_prev, double x_next, const MotionConfig& cfg);

// Streaming crossing extractor. One event per arrival at or across the line:
// a step landing exactly on the line counts once; staying on the line or
// stepping off it afterwards does not re-count the same transit.
class CrossingDetector {
 public:
  CrossingDetector(double line_x, double x0)
      : line_(line_x), off_side_(side(x0)) {}

  // Feed the position after one step; returns true iff it is a crossing.
  bool step(double x) {
    int s = side(x);
    if (s == 0) {
      if (on_line_) return false;
      on_line_ = true;
      return true;
    }
    bool was_on_line = on_line_;
    on_line_ = false;
    int prev = off_side_;
    off_side_ = s;
    if (was_on_line) return false;  // transit was counted on arrival
    return prev != 0 && s == -prev;
  }

 private:
  int side(double x) const { return x < line_ ? -1 : (x > line_ ? 1 : 0); }

  double line_;
  int off_side_;         // side of the most recent off-line position
  bool on_line_ = false;
};

// Initial state drawn uniformly over positions and the heading grid.
PersonState random_state(const MotionConfig& cfg, Rng& rng);

// Core walk loop: records crossings over `steps` positions starting from
// `initial` (no burn-in). Event step k refers to the k-th recorded step.
EventSequence simulate_events(const MotionConfig& cfg, std::int64_t steps,
                              PersonState initial, Rng& rng);

// Uniform random start, kBurnInSteps of warm-up, then simulate_events.
// Deterministic for a fixed seed.
EventSequence simulate_person(const MotionConfig& cfg, std::int64_t steps,
                              std::uint64_t seed);

// Empirical CCDF of inter-event times: tail[z] = #(T_i >= z) / n, with
// crossing_prob = (#events) / horizon. z_max <= 0 selects the automatic
// truncation rule. Throws when fewer than two events are present.
InterEventCcdf empirical_interevent_ccdf(const EventSequence& events,
                                         int z_max = 0);

// Analytic per-step crossing probability 2*v*dt / (B*pi).
double crossing_probability(const MotionConfig& cfg);

}  // namespace crowdcount
