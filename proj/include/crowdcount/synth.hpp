#pragma once

#include <cstdint>
#include <vector>

#include "crowdcount/motion.hpp"
#include "crowdcount/trace.hpp"

namespace crowdcount {

// Generator parameters for labeled synthetic RSSI traces: a clean level,
// bounded multipath ripple, and blockage dips at the crossing times of
// simulated walkers. Dip depths must clear the ripple bound so the two
// effects are separable by thresholding.
struct SynthConfig {
  double base_dbm = -40.0;       // clean signal level
  double ripple_db = 3.8;        // hard bound on multipath excursions
  double dip_depth_min_db = 7.0; // dip depth drawn uniformly from this range
  double dip_depth_max_db = 10.0;
  double dip_width_s = 1.0;      // mean dip duration; actual widths +/- 20%
  double sample_rate = 20.0;     // samples per second
  double duration_s = 300.0;     // trace length
  int n_people = 0;
  MotionConfig motion;
  std::uint64_t seed = 0;

  void validate() const;
};

// A synthetic trace with its ground truth.
struct LabeledTrace {
  RssiTrace trace;
  std::vector<double> true_crossings_s;  // sorted, coincident steps collapsed
  int n_true = 0;
};

// Renders blockage dips for the given crossing times onto a rippled
// baseline. Exposed separately so scripted walks can drive the renderer.
RssiTrace render_trace(const SynthConfig& cfg,
                       const std::vector<double>& crossings_s);

// Simulates n_people independent walkers, collapses coincident crossings,
// and renders the result. Deterministic per seed.
LabeledTrace synthesize(const SynthConfig& cfg);

// Ripple-only trace (no crossings), for threshold calibration.
RssiTrace multipath_only(const SynthConfig& cfg);

}  // namespace crowdcount
