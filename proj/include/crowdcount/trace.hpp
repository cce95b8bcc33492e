#pragma once

#include <iosfwd>
#include <vector>

#include "crowdcount/estimator.hpp"

namespace crowdcount {

// Uniformly sampled received-power series in dB.
struct RssiTrace {
  std::vector<double> t_s;      // strictly increasing timestamps (s)
  std::vector<double> rssi_db;  // received power per sample (dB)
  double sample_rate = 0.0;     // samples per second

  std::size_t size() const { return t_s.size(); }
  double duration_s() const { return t_s.empty() ? 0.0 : t_s.back(); }
};

// One blockage dip: maximal run of samples below the detection level.
struct DipEvent {
  double start_s = 0.0;
  double end_s = 0.0;
  double depth_db = 0.0;  // below baseline, positive
};

struct CalibrationResult {
  double t_los_db = 0.0;             // detection threshold
  double max_multipath_dip_db = 0.0; // deepest excursion in the input
};

enum class BaselineMethod {
  kMedian,         // robust default
  kMeanUpperHalf,  // mean of the samples at or above the median
};

enum class GapMode {
  kStartToStart,  // default: gaps between successive dip onsets
  kEndToStart,    // alternative: gap from a dip's end to the next onset
};

// Parses a CSV byte stream with header `t_s,rssi_dbm`. Rejects non-numeric
// rows, non-increasing or non-uniform timestamps, and traces shorter than
// 100 samples. The sample rate is inferred from the median spacing.
RssiTrace load_trace(std::istream& in);

// Reference level of the unobstructed signal.
double baseline(const RssiTrace& trace,
                BaselineMethod method = BaselineMethod::kMedian);

// Maximal runs of samples below base - t_los become one DipEvent each; runs
// separated by fewer than 2 above-threshold samples are merged.
std::vector<DipEvent> detect_dips(const RssiTrace& trace, double base,
                                  double t_los);

// Inter-event times from dip onsets, in steps of dt_s. Dips closer than
// t_min_s to the previous kept dip are dropped as unidentifiable.
ObservedGaps gaps_from_dips(const std::vector<DipEvent>& dips, double t_min_s,
                            double dt_s, GapMode mode = GapMode::kStartToStart);

// Detection threshold from a trace known to contain no line crossings:
// 99.9th percentile of per-sample excursion depth below baseline, plus a
// 1 dB margin, rounded up to the nearest 0.5 dB.
CalibrationResult calibrate_threshold(const RssiTrace& multipath_trace);

}  // namespace crowdcount
