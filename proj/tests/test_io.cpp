#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "crowdcount/io.hpp"
#include "testutil.hpp"

using namespace crowdcount;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("crowdcount_io_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("motion config loads from a profile document") {
  TempDir tmp;
  write_file(tmp.file("area.json"),
             R"({"B": 7.8, "L": 6.3, "v": 1.0, "dt": 0.05,
                 "p_keep": 0.9, "dtheta": 0.39269908169872414,
                 "t_min_s": 1.0, "t_los_db": 5.0})");
  auto cfg = io::load_motion_config(tmp.file("area.json"));
  CHECK(cfg.width_m == 7.8);
  CHECK(cfg.depth_m == 6.3);
  CHECK(cfg.heading_count() == 16);
  CHECK(io::profile_value(tmp.file("area.json"), "t_min_s", 0.0) == 1.0);
  CHECK(io::profile_value(tmp.file("area.json"), "missing", 2.5) == 2.5);

  write_file(tmp.file("bad.json"), R"({"B": 7.8})");
  CHECK_THROWS_AS(io::load_motion_config(tmp.file("bad.json")),
                  std::runtime_error);
}

TEST_CASE("synth config falls back to defaults for optional keys") {
  TempDir tmp;
  write_file(tmp.file("area.json"),
             R"({"B": 7.8, "L": 6.3, "v": 1.0, "dt": 0.05,
                 "p_keep": 0.9, "dtheta": 0.39269908169872414,
                 "ripple_db": 3.5})");
  auto cfg = io::load_synth_config(tmp.file("area.json"), 4, 99);
  CHECK(cfg.n_people == 4);
  CHECK(cfg.seed == 99);
  CHECK(cfg.ripple_db == 3.5);
  CHECK(cfg.base_dbm == -40.0);
  CHECK(cfg.duration_s == 300.0);
}

TEST_CASE("ccdf table round-trips through CSV") {
  auto cfg = testutil::area1_motion();
  auto cc = empirical_interevent_ccdf(simulate_person(cfg, 100000, 51), 0);
  TempDir tmp;
  io::save_ccdf_csv(tmp.file("fc.csv"), cc);
  auto back = io::load_ccdf_csv(tmp.file("fc.csv"));
  REQUIRE(back.z_max() == cc.z_max());
  for (int z = 0; z <= cc.z_max(); ++z)
    CHECK(back.tail[z] == doctest::Approx(cc.tail[z]).epsilon(1e-9));
  // the loader backfills the renewal-consistent crossing probability
  CHECK(back.renewal_sum() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("events and gaps round-trip through CSV") {
  TempDir tmp;
  EventSequence ev;
  ev.event_steps = {3, 50, 1200};
  ev.horizon = 6000;
  io::save_events_csv(tmp.file("events.csv"), ev);
  std::ifstream in(tmp.file("events.csv"));
  std::string header;
  std::getline(in, header);
  CHECK(header == "step_index");

  ObservedGaps gaps;
  gaps.gaps = {25, 60, 21};
  gaps.t_min = 20;
  gaps.dt_s = 0.05;
  gaps.timestamps = {2.0, 5.0, 6.05};
  io::save_gaps_csv(tmp.file("gaps.csv"), gaps);
  auto back = io::load_gaps_csv(tmp.file("gaps.csv"), 20, 0.05);
  CHECK(back.gaps == gaps.gaps);
  CHECK(back.timestamps == gaps.timestamps);

  // timestamp-free flavor
  gaps.timestamps.clear();
  io::save_gaps_csv(tmp.file("bare.csv"), gaps);
  auto bare = io::load_gaps_csv(tmp.file("bare.csv"), 20, 0.05);
  CHECK(bare.gaps == gaps.gaps);
  CHECK_FALSE(bare.has_timestamps());

  write_file(tmp.file("broken.csv"), "t_s,gap_steps\n1.0,not_a_gap\n");
  CHECK_THROWS_AS(io::load_gaps_csv(tmp.file("broken.csv"), 20, 0.05),
                  std::runtime_error);
}

TEST_CASE("trace CSV round-trips through the strict loader") {
  auto cfg = SynthConfig{.duration_s = 10.0,
                         .n_people = 0,
                         .motion = testutil::area1_motion(),
                         .seed = 52};
  auto trace = multipath_only(cfg);
  TempDir tmp;
  io::save_trace_csv(tmp.file("trace.csv"), trace);
  auto back = io::load_trace_csv(tmp.file("trace.csv"));
  REQUIRE(back.size() == trace.size());
  CHECK(back.sample_rate == doctest::Approx(trace.sample_rate));
  for (std::size_t i = 0; i < trace.size(); ++i)
    CHECK(back.rssi_db[i] == doctest::Approx(trace.rssi_db[i]).epsilon(1e-9));
}

TEST_CASE("family JSON is keyed by the candidate count") {
  auto cfg = testutil::area1_motion();
  auto cc = empirical_interevent_ccdf(simulate_person(cfg, 100000, 53), 0);
  auto family = pmf_family(cc, 20, 3);
  auto text = io::family_to_json(family);
  CHECK(text.find("\"1\"") != std::string::npos);
  CHECK(text.find("\"3\"") != std::string::npos);
  CHECK(text.find("\"probabilities\"") != std::string::npos);
  CHECK(text.find("\"t_min\"") != std::string::npos);
}

TEST_CASE("estimate and calibration JSON artifacts") {
  TempDir tmp;
  EstimateResult result;
  result.n_hat = 4;
  result.loglik = {-10.0, -8.0, -9.0};
  result.n_observations = 17;
  io::save_estimate_json(tmp.file("estimate.json"), result);
  std::ifstream in(tmp.file("estimate.json"));
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("\"n_hat\": 4") != std::string::npos);
  CHECK(text.find("\"n_observations\": 17") != std::string::npos);

  io::save_calibration_json(tmp.file("calib.json"), {5.0, 3.7});
  auto calib = io::load_calibration_json(tmp.file("calib.json"));
  CHECK(calib.t_los_db == 5.0);
  CHECK(calib.max_multipath_dip_db == 3.7);
}

TEST_CASE("manifest lists outputs and the tool version") {
  TempDir tmp;
  io::RunManifest manifest;
  manifest.command = "simulate";
  manifest.config_paths = {"area1.json"};
  manifest.seed = 7;
  manifest.outputs = {"events.csv", "fc.csv"};
  io::save_manifest(tmp.file("manifest.json"), manifest);
  std::ifstream in(tmp.file("manifest.json"));
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("\"command\": \"simulate\"") != std::string::npos);
  CHECK(text.find(io::kToolVersion) != std::string::npos);
  CHECK(text.find("events.csv") != std::string::npos);
}
