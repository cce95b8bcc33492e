#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crowdcount/estimator.hpp"
#include "crowdcount/synth.hpp"
#include "crowdcount/trace.hpp"

namespace crowdcount::io {

// Profile documents are flat JSON objects; the motion keys
// {"B","L","v","dt","p_keep","dtheta"} are required, everything else is
// optional and falls back to the defaults in SynthConfig.
MotionConfig load_motion_config(const std::string& path);
SynthConfig load_synth_config(const std::string& path, int n_people,
                              std::uint64_t seed);

// Optional scalar lookups from a profile (t_min_s, t_los_db, ...).
double profile_value(const std::string& path, const std::string& key,
                     double fallback);

// Event CSV, header `step_index`.
void save_events_csv(const std::string& path, const EventSequence& events);

// CCDF CSV, header `z,ccdf`.
void save_ccdf_csv(const std::string& path, const InterEventCcdf& ccdf);
// The crossing probability is not stored in the CSV; the loaded table gets
// the renewal-consistent value 1 / sum(F_c).
InterEventCcdf load_ccdf_csv(const std::string& path);

// PMF CSV, header `z,probability`.
void save_pmf_csv(const std::string& path, const CountPmf& pmf);

// PMF family as one JSON document keyed by the candidate count.
std::string family_to_json(const std::vector<CountPmf>& family);
void save_family_json(const std::string& path,
                      const std::vector<CountPmf>& family);

// Trace CSV, header `t_s,rssi_dbm`.
void save_trace_csv(const std::string& path, const RssiTrace& trace);
RssiTrace load_trace_csv(const std::string& path);

// Crossing labels CSV, header `t_s`.
void save_labels_csv(const std::string& path,
                     const std::vector<double>& crossings_s);

// Dip list CSV, header `start_s,end_s,depth_db`.
void save_dips_csv(const std::string& path, const std::vector<DipEvent>& dips);

// Observed gaps CSV, header `t_s,gap_steps`; a `gap_steps`-only file (no
// timestamps) is also accepted on load.
void save_gaps_csv(const std::string& path, const ObservedGaps& gaps);
ObservedGaps load_gaps_csv(const std::string& path, int t_min_steps,
                           double dt_s);

// EstimateResult JSON: {"n_hat", "loglik": [[M, LL]...], "n_observations"}.
void save_estimate_json(const std::string& path, const EstimateResult& result);

// Estimate-vs-time CSV, header `t_s,n_hat`.
void save_estimate_over_time_csv(
    const std::string& path, const std::vector<std::pair<double, int>>& series);

void save_calibration_json(const std::string& path,
                           const CalibrationResult& result);
CalibrationResult load_calibration_json(const std::string& path);

// Crossing-probability diagnostics for a simulation run.
void save_crossing_prob_json(const std::string& path,
                             const InterEventCcdf& ccdf, double analytic,
                             std::size_t n_events, std::int64_t horizon);

// Run manifest; written after every listed output exists.
struct RunManifest {
  std::string command;
  std::vector<std::string> config_paths;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
};
void save_manifest(const std::string& path, const RunManifest& manifest);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace crowdcount::io
