// Command-line front end: simulate, calibrate, synth, estimate, sweep.
//
// Exit codes: 0 success, 2 usage error, 3 data error. All randomness flows
// from the per-command --seed; sub-streams are derived with a fixed
// splitting rule, so reruns and parallel runs produce identical artifacts.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "crowdcount/estimator.hpp"
#include "crowdcount/io.hpp"
#include "crowdcount/motion.hpp"
#include "crowdcount/renewal.hpp"
#include "crowdcount/synth.hpp"
#include "crowdcount/trace.hpp"

namespace fs = std::filesystem;
using namespace crowdcount;

namespace {

// Sweep protocol: error aggregated over these walker counts per seed.
const std::vector<int> kSweepCounts = {1, 3, 5, 7, 9};

// Sub-stream tags for per-command seeds.
constexpr std::uint64_t kCcdfStream = 0xFC;
constexpr std::uint64_t kTraceStream = 0x7;

int worker_count(std::size_t jobs) {
  unsigned n = std::thread::hardware_concurrency();
  if (const char* env = std::getenv("CROWDCOUNT_WORKERS")) {
    long v = std::atol(env);
    if (v >= 1) n = static_cast<unsigned>(v);
  }
  if (n < 1) n = 1;
  return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs fn(i) for i in [0, jobs) on a small pool; results are written to
// pre-sized slots so the merge never depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t jobs, Fn&& fn) {
  int workers = worker_count(jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

std::string out_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

// Writes the manifest last and verifies every listed output exists.
void finish(io::RunManifest manifest, const std::string& out_dir) {
  for (const auto& f : manifest.outputs)
    if (!fs::exists(f)) throw std::runtime_error("missing output " + f);
  manifest.outputs.push_back(out_path(out_dir, "manifest.json"));
  io::save_manifest(out_path(out_dir, "manifest.json"), manifest);
}

std::vector<double> parse_range(const std::string& text) {
  double lo = 0.0, hi = 0.0, step = 0.0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 ||
      !(step > 0.0) || hi < lo)
    throw std::invalid_argument("range must be lo:hi:step with step > 0");
  std::vector<double> values;
  for (double v = lo; v <= hi + step / 2.0; v += step) values.push_back(v);
  if (values.empty()) throw std::invalid_argument("range is empty");
  return values;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    std::string tok = text.substr(pos, comma - pos);
    if (!tok.empty()) {
      try {
        seeds.push_back(std::stoull(tok));
      } catch (const std::exception&) {
        throw std::invalid_argument("bad seed: " + tok);
      }
    }
    pos = comma + 1;
  }
  if (seeds.empty()) throw std::invalid_argument("seeds list is empty");
  return seeds;
}

struct SimulateArgs {
  std::string config;
  std::string out_dir = ".";
  std::int64_t steps = 1000000;
  std::uint64_t seed = 1;
};

int run_simulate(const SimulateArgs& args) {
  auto cfg = io::load_motion_config(args.config);
  fs::create_directories(args.out_dir);
  auto events = simulate_person(cfg, args.steps, args.seed);
  auto ccdf = empirical_interevent_ccdf(events, 0);

  auto events_csv = out_path(args.out_dir, "events.csv");
  auto fc_csv = out_path(args.out_dir, "fc.csv");
  auto pc_json = out_path(args.out_dir, "pc.json");
  io::save_events_csv(events_csv, events);
  io::save_ccdf_csv(fc_csv, ccdf);
  io::save_crossing_prob_json(pc_json, ccdf, crossing_probability(cfg),
                              events.event_steps.size(), events.horizon);
  finish({"simulate", {args.config}, args.seed, {events_csv, fc_csv, pc_json}},
         args.out_dir);
  return 0;
}

struct CalibrateArgs {
  std::string trace;
  std::string out_dir = ".";
};

int run_calibrate(const CalibrateArgs& args) {
  auto trace = io::load_trace_csv(args.trace);
  auto calib = calibrate_threshold(trace);
  if (calib.t_los_db > 10.0)
    std::cerr << "warning: calibrated threshold " << calib.t_los_db
              << " dB is implausibly large; the input may contain line"
                 " crossings\n";
  fs::create_directories(args.out_dir);
  auto calib_json = out_path(args.out_dir, "calibration.json");
  io::save_calibration_json(calib_json, calib);
  finish({"calibrate", {args.trace}, 0, {calib_json}}, args.out_dir);
  return 0;
}

struct SynthArgs {
  std::string config;
  std::string out_dir = ".";
  int n_people = 0;
  std::uint64_t seed = 1;
  double duration_s = 0.0;  // 0: take the profile value
  bool multipath = false;
};

int run_synth(const SynthArgs& args) {
  auto cfg = io::load_synth_config(args.config, args.n_people, args.seed);
  if (args.duration_s > 0.0) cfg.duration_s = args.duration_s;
  fs::create_directories(args.out_dir);
  auto trace_csv = out_path(args.out_dir, "trace.csv");
  std::vector<std::string> outputs{trace_csv};
  if (args.multipath) {
    io::save_trace_csv(trace_csv, multipath_only(cfg));
  } else {
    auto labeled = synthesize(cfg);
    auto labels_csv = out_path(args.out_dir, "labels.csv");
    io::save_trace_csv(trace_csv, labeled.trace);
    io::save_labels_csv(labels_csv, labeled.true_crossings_s);
    outputs.push_back(labels_csv);
  }
  finish({"synth", {args.config}, args.seed, outputs}, args.out_dir);
  return 0;
}

struct EstimateArgs {
  std::string trace;
  std::string gaps;
  std::string ccdf;
  std::string calibration;
  std::string out_dir = ".";
  std::string baseline_method = "median";
  double t_min_s = 1.0;
  double dt_s = 0.05;
  double t_los_db = 5.0;
  double checkpoint_s = 100.0;
  int m_max = 30;
};

int run_estimate(const EstimateArgs& args) {
  if (args.trace.empty() && args.gaps.empty())
    throw std::invalid_argument("one of --trace or --gaps is required");
  auto ccdf = io::load_ccdf_csv(args.ccdf);
  fs::create_directories(args.out_dir);
  io::RunManifest manifest{"estimate", {args.ccdf}, 0, {}};

  ObservedGaps gaps;
  if (!args.trace.empty()) {
    manifest.config_paths.push_back(args.trace);
    auto trace = io::load_trace_csv(args.trace);
    double t_los = args.t_los_db;
    if (!args.calibration.empty()) {
      manifest.config_paths.push_back(args.calibration);
      t_los = io::load_calibration_json(args.calibration).t_los_db;
    }
    auto method = args.baseline_method == "mean-upper-half"
                      ? BaselineMethod::kMeanUpperHalf
                      : BaselineMethod::kMedian;
    auto dips = detect_dips(trace, baseline(trace, method), t_los);
    auto dips_csv = out_path(args.out_dir, "dips.csv");
    io::save_dips_csv(dips_csv, dips);
    manifest.outputs.push_back(dips_csv);
    gaps = gaps_from_dips(dips, args.t_min_s, args.dt_s);
  } else {
    manifest.config_paths.push_back(args.gaps);
    gaps = io::load_gaps_csv(
        args.gaps, static_cast<int>(std::lround(args.t_min_s / args.dt_s)),
        args.dt_s);
  }

  auto result = estimate_count(gaps, ccdf, args.m_max);
  auto estimate_json = out_path(args.out_dir, "estimate.json");
  io::save_estimate_json(estimate_json, result);
  manifest.outputs.push_back(estimate_json);

  if (gaps.has_timestamps()) {
    auto series = estimate_over_time(gaps, ccdf, args.m_max, args.checkpoint_s);
    auto series_csv = out_path(args.out_dir, "estimate_over_time.csv");
    io::save_estimate_over_time_csv(series_csv, series);
    manifest.outputs.push_back(series_csv);
  }
  finish(std::move(manifest), args.out_dir);
  std::cout << "n_hat " << result.n_hat << " from " << result.n_observations
            << " gaps\n";
  return 0;
}

struct SweepArgs {
  std::string kind;
  std::string range;
  std::string config;
  std::string seeds;
  std::string out_dir = ".";
  double t_min_s = 1.0;
  double t_los_db = 5.0;
  double duration_s = 0.0;
  int m_max = 30;
  std::int64_t fc_steps = 1000000;
};

int run_sweep(const SweepArgs& args) {
  auto params = parse_range(args.range);
  auto seeds = parse_seeds(args.seeds);
  auto base_cfg = io::load_synth_config(args.config, 0, 0);
  if (args.duration_s > 0.0) base_cfg.duration_s = args.duration_s;
  const double dt = base_cfg.motion.dt_s;
  const bool speed_kind = args.kind == "speed";

  // Shared synthetic experiments: one labeled trace per (count, seed) pair,
  // reused at every swept parameter value.
  struct Cell {
    int n_true = 0;
    std::vector<DipEvent> dips;  // at the base threshold
    RssiTrace trace;
  };
  std::vector<Cell> cells(kSweepCounts.size() * seeds.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    int n = kSweepCounts[i / seeds.size()];
    std::uint64_t seed = seeds[i % seeds.size()];
    auto cfg = base_cfg;
    cfg.n_people = n;
    cfg.seed = derive_seed(seed, kTraceStream + n);
    auto labeled = synthesize(cfg);
    cells[i].n_true = n;
    cells[i].trace = std::move(labeled.trace);
    cells[i].dips = detect_dips(cells[i].trace, baseline(cells[i].trace),
                                args.t_los_db);
  });

  // Model tables: one per assumed speed, or a single shared one for the
  // threshold sweep.
  std::vector<InterEventCcdf> tables(speed_kind ? params.size() : 1);
  parallel_for(tables.size(), [&](std::size_t i) {
    auto motion = base_cfg.motion;
    if (speed_kind)
      motion = MotionConfig(motion.width_m, motion.depth_m, params[i],
                            motion.dt_s, motion.keep_prob,
                            motion.heading_step_rad);
    tables[i] = empirical_interevent_ccdf(
        simulate_person(motion, args.fc_steps, derive_seed(0, kCcdfStream + i)),
        0);
  });

  std::vector<std::vector<double>> errors(params.size());
  for (auto& e : errors) e.assign(cells.size(), 0.0);
  parallel_for(params.size() * cells.size(), [&](std::size_t job) {
    std::size_t p = job / cells.size();
    std::size_t c = job % cells.size();
    const auto& cell = cells[c];
    const auto& table = tables[speed_kind ? p : 0];
    const auto* dips = &cell.dips;
    std::vector<DipEvent> redetected;
    if (!speed_kind) {
      redetected = detect_dips(cell.trace, baseline(cell.trace), params[p]);
      dips = &redetected;
    }
    double err = cell.n_true;  // nothing usable detected: everyone missed
    try {
      auto gaps = gaps_from_dips(*dips, args.t_min_s, dt);
      err = std::abs(estimate_count(gaps, table, args.m_max).n_hat -
                     cell.n_true);
    } catch (const std::runtime_error&) {
    }
    errors[p][c] = err;
  });

  fs::create_directories(args.out_dir);
  std::string text = "param_value,mean_abs_error\n";
  char buf[64];
  for (std::size_t p = 0; p < params.size(); ++p) {
    double mae = 0.0;
    for (double e : errors[p]) mae += e;
    mae /= static_cast<double>(cells.size());
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g\n", params[p], mae);
    text += buf;
  }
  auto sweep_csv = out_path(args.out_dir, "sweep.csv");
  {
    std::ofstream out(sweep_csv, std::ios::binary);
    out << text;
  }
  finish({"sweep", {args.config}, seeds.front(), {sweep_csv}}, args.out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Occupancy counting from line-of-sight blockage dip timing"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand(
      "simulate", "Single-walker simulation: event times and inter-event CCDF");
  simulate_cmd->add_option("--config", sim.config, "motion profile JSON")
      ->required()
      ->check(CLI::ExistingFile);
  simulate_cmd->add_option("--steps", sim.steps, "steps to simulate")
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", sim.seed, "random seed");
  simulate_cmd->add_option("--out-dir", sim.out_dir, "output directory");

  CalibrateArgs cal;
  auto* calibrate_cmd = app.add_subcommand(
      "calibrate", "Detection threshold from a crossing-free trace");
  calibrate_cmd->add_option("--trace", cal.trace, "multipath-only trace CSV")
      ->required()
      ->check(CLI::ExistingFile);
  calibrate_cmd->add_option("--out-dir", cal.out_dir, "output directory");

  SynthArgs syn;
  auto* synth_cmd = app.add_subcommand(
      "synth", "Labeled synthetic RSSI trace for a walker count");
  synth_cmd->add_option("--config", syn.config, "profile JSON")
      ->required()
      ->check(CLI::ExistingFile);
  synth_cmd->add_option("--n-people", syn.n_people, "walker count")
      ->required()
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--seed", syn.seed, "random seed");
  synth_cmd->add_option("--duration-s", syn.duration_s, "trace length (s)");
  synth_cmd->add_flag("--multipath-only", syn.multipath,
                      "render ripple only (no crossings), for calibration");
  synth_cmd->add_option("--out-dir", syn.out_dir, "output directory");

  EstimateArgs est;
  auto* estimate_cmd = app.add_subcommand(
      "estimate", "Count estimate from a trace or extracted gaps");
  auto* trace_opt =
      estimate_cmd->add_option("--trace", est.trace, "RSSI trace CSV")
          ->check(CLI::ExistingFile);
  estimate_cmd->add_option("--gaps", est.gaps, "observed gaps CSV")
      ->check(CLI::ExistingFile)
      ->excludes(trace_opt);
  estimate_cmd->add_option("--ccdf", est.ccdf, "single-walker CCDF CSV")
      ->required()
      ->check(CLI::ExistingFile);
  estimate_cmd->add_option("--calibration", est.calibration,
                           "calibration JSON (overrides --t-los)")
      ->check(CLI::ExistingFile);
  estimate_cmd->add_option("--t-los", est.t_los_db, "dip threshold (dB)");
  estimate_cmd->add_option("--t-min-s", est.t_min_s,
                           "minimum identifiable gap (s)");
  estimate_cmd->add_option("--dt", est.dt_s, "model step size (s)");
  estimate_cmd->add_option("--m-max", est.m_max, "largest candidate count")
      ->check(CLI::PositiveNumber);
  estimate_cmd->add_option("--checkpoint-s", est.checkpoint_s,
                           "estimate-over-time checkpoint spacing (s)");
  estimate_cmd->add_option("--baseline", est.baseline_method, "baseline method")
      ->check(CLI::IsMember({"median", "mean-upper-half"}));
  estimate_cmd->add_option("--out-dir", est.out_dir, "output directory");

  SweepArgs swp;
  auto* sweep_cmd = app.add_subcommand(
      "sweep",
      "Sensitivity sweep over assumed speed or threshold; worker count "
      "taken from CROWDCOUNT_WORKERS");
  sweep_cmd->add_option("--kind", swp.kind, "sweep kind")
      ->required()
      ->check(CLI::IsMember({"speed", "threshold"}));
  sweep_cmd->add_option("--range", swp.range, "lo:hi:step")->required();
  sweep_cmd->add_option("--config", swp.config, "profile JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--seeds", swp.seeds, "comma-separated seed list")
      ->required();
  sweep_cmd->add_option("--t-min-s", swp.t_min_s,
                        "minimum identifiable gap (s)");
  sweep_cmd->add_option("--t-los", swp.t_los_db,
                        "detection threshold for the speed sweep (dB)");
  sweep_cmd->add_option("--duration-s", swp.duration_s, "trace length (s)");
  sweep_cmd->add_option("--m-max", swp.m_max, "largest candidate count")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--fc-steps", swp.fc_steps,
                        "steps for each model-table simulation")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out-dir", swp.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate_cmd->parsed()) return run_simulate(sim);
    if (calibrate_cmd->parsed()) return run_calibrate(cal);
    if (synth_cmd->parsed()) return run_synth(syn);
    if (estimate_cmd->parsed()) return run_estimate(est);
    if (sweep_cmd->parsed()) return run_sweep(swp);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
