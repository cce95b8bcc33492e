#include "crowdcount/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace crowdcount::io {

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return doc;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("short write to " + path);
}

double require_number(const json& doc, const char* key,
                      const std::string& path) {
  if (!doc.contains(key) || !doc[key].is_number())
    throw std::runtime_error(path + ": missing numeric key \"" + key + "\"");
  return doc[key].get<double>();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

}  // namespace

MotionConfig load_motion_config(const std::string& path) {
  json doc = load_json(path);
  return MotionConfig(require_number(doc, "B", path),
                      require_number(doc, "L", path),
                      require_number(doc, "v", path),
                      require_number(doc, "dt", path),
                      require_number(doc, "p_keep", path),
                      require_number(doc, "dtheta", path));
}

SynthConfig load_synth_config(const std::string& path, int n_people,
                              std::uint64_t seed) {
  json doc = load_json(path);
  SynthConfig cfg{.n_people = n_people,
                  .motion = load_motion_config(path),
                  .seed = seed};
  auto opt = [&](const char* key, double fallback) {
    return doc.contains(key) ? require_number(doc, key, path) : fallback;
  };
  cfg.base_dbm = opt("base_dbm", cfg.base_dbm);
  cfg.ripple_db = opt("ripple_db", cfg.ripple_db);
  cfg.dip_depth_min_db = opt("dip_depth_min_db", cfg.dip_depth_min_db);
  cfg.dip_depth_max_db = opt("dip_depth_max_db", cfg.dip_depth_max_db);
  cfg.dip_width_s = opt("dip_width_s", cfg.dip_width_s);
  cfg.sample_rate = opt("sample_rate", cfg.sample_rate);
  cfg.duration_s = opt("duration_s", cfg.duration_s);
  cfg.validate();
  return cfg;
}

double profile_value(const std::string& path, const std::string& key,
                     double fallback) {
  json doc = load_json(path);
  if (!doc.contains(key)) return fallback;
  return require_number(doc, key.c_str(), path);
}

void save_events_csv(const std::string& path, const EventSequence& events) {
  std::string text = "step_index\n";
  for (auto s : events.event_steps) text += std::to_string(s) + "\n";
  write_text(path, text);
}

void save_ccdf_csv(const std::string& path, const InterEventCcdf& ccdf) {
  std::string text = "z,ccdf\n";
  for (int z = 0; z <= ccdf.z_max(); ++z)
    text += std::to_string(z) + "," + fmt(ccdf.tail[z]) + "\n";
  write_text(path, text);
}

InterEventCcdf load_ccdf_csv(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || line.substr(0, 2) != "z,")
    throw std::runtime_error(path + ": bad ccdf header");
  InterEventCcdf ccdf;
  int expected_z = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error(path + ": malformed ccdf row");
    int z = std::stoi(line.substr(0, comma));
    if (z != expected_z++)
      throw std::runtime_error(path + ": ccdf rows must start at z=0 and be contiguous");
    ccdf.tail.push_back(std::stod(line.substr(comma + 1)));
  }
  if (ccdf.tail.size() < 2) throw std::runtime_error(path + ": ccdf too short");
  long double total = 0.0L;
  for (std::size_t z = 1; z < ccdf.tail.size(); ++z) total += ccdf.tail[z];
  if (!(total > 0.0L)) throw std::runtime_error(path + ": ccdf has no mass");
  ccdf.crossing_prob = static_cast<double>(1.0L / total);
  ccdf.validate();
  return ccdf;
}

void save_pmf_csv(const std::string& path, const CountPmf& pmf) {
  std::string text = "z,probability\n";
  for (int z = 1; z <= pmf.z_max(); ++z)
    text += std::to_string(z) + "," + fmt(pmf.probs[z]) + "\n";
  write_text(path, text);
}

std::string family_to_json(const std::vector<CountPmf>& family) {
  json doc = json::object();
  for (const auto& pmf : family) {
    json probs = json::array();
    for (int z = 1; z <= pmf.z_max(); ++z) probs.push_back(pmf.probs[z]);
    doc[std::to_string(pmf.n_people)] = {{"t_min", pmf.t_min},
                                         {"norm_const", pmf.norm_const},
                                         {"z_offset", 1},
                                         {"probabilities", probs}};
  }
  return doc.dump(2) + "\n";
}

void save_family_json(const std::string& path,
                      const std::vector<CountPmf>& family) {
  write_text(path, family_to_json(family));
}

void save_trace_csv(const std::string& path, const RssiTrace& trace) {
  std::string text = "t_s,rssi_dbm\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    text += fmt(trace.t_s[i]) + "," + fmt(trace.rssi_db[i]) + "\n";
  write_text(path, text);
}

RssiTrace load_trace_csv(const std::string& path) {
  auto in = open_input(path);
  return load_trace(in);
}

void save_labels_csv(const std::string& path,
                     const std::vector<double>& crossings_s) {
  std::string text = "t_s\n";
  for (double t : crossings_s) text += fmt(t) + "\n";
  write_text(path, text);
}

void save_dips_csv(const std::string& path,
                   const std::vector<DipEvent>& dips) {
  std::string text = "start_s,end_s,depth_db\n";
  for (const auto& d : dips)
    text += fmt(d.start_s) + "," + fmt(d.end_s) + "," + fmt(d.depth_db) + "\n";
  write_text(path, text);
}

void save_gaps_csv(const std::string& path, const ObservedGaps& gaps) {
  std::string text;
  if (gaps.has_timestamps()) {
    text = "t_s,gap_steps\n";
    for (std::size_t i = 0; i < gaps.gaps.size(); ++i)
      text += fmt(gaps.timestamps[i]) + "," + std::to_string(gaps.gaps[i]) + "\n";
  } else {
    text = "gap_steps\n";
    for (int g : gaps.gaps) text += std::to_string(g) + "\n";
  }
  write_text(path, text);
}

ObservedGaps load_gaps_csv(const std::string& path, int t_min_steps,
                           double dt_s) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": empty gaps file");
  bool with_time;
  if (line == "t_s,gap_steps")
    with_time = true;
  else if (line == "gap_steps")
    with_time = false;
  else
    throw std::runtime_error(path + ": bad gaps header");

  ObservedGaps gaps;
  gaps.t_min = t_min_steps;
  gaps.dt_s = dt_s;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      if (with_time) {
        auto comma = line.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("no comma");
        gaps.timestamps.push_back(std::stod(line.substr(0, comma)));
        gaps.gaps.push_back(std::stoi(line.substr(comma + 1)));
      } else {
        gaps.gaps.push_back(std::stoi(line));
      }
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": malformed gaps row: " + line);
    }
  }
  if (!gaps.timestamps.empty() && gaps.timestamps.size() != gaps.gaps.size())
    throw std::runtime_error(path + ": timestamps must cover all rows or none");
  gaps.validate();
  return gaps;
}

void save_estimate_json(const std::string& path,
                        const EstimateResult& result) {
  json loglik = json::array();
  for (std::size_t i = 0; i < result.loglik.size(); ++i)
    loglik.push_back({static_cast<int>(i) + 1, result.loglik[i]});
  json doc = {{"n_hat", result.n_hat},
              {"loglik", loglik},
              {"n_observations", result.n_observations}};
  write_text(path, doc.dump(2) + "\n");
}

void save_estimate_over_time_csv(
    const std::string& path,
    const std::vector<std::pair<double, int>>& series) {
  std::string text = "t_s,n_hat\n";
  for (const auto& [t, n] : series)
    text += fmt(t) + "," + std::to_string(n) + "\n";
  write_text(path, text);
}

void save_calibration_json(const std::string& path,
                           const CalibrationResult& result) {
  json doc = {{"t_los_db", result.t_los_db},
              {"max_multipath_dip_db", result.max_multipath_dip_db}};
  write_text(path, doc.dump(2) + "\n");
}

CalibrationResult load_calibration_json(const std::string& path) {
  json doc = load_json(path);
  return {require_number(doc, "t_los_db", path),
          require_number(doc, "max_multipath_dip_db", path)};
}

void save_crossing_prob_json(const std::string& path,
                             const InterEventCcdf& ccdf, double analytic,
                             std::size_t n_events, std::int64_t horizon) {
  json doc = {{"p_c", ccdf.crossing_prob},
              {"p_c_analytic", analytic},
              {"n_events", n_events},
              {"horizon", horizon},
              {"z_max", ccdf.z_max()},
              {"renewal_sum", ccdf.renewal_sum()}};
  write_text(path, doc.dump(2) + "\n");
}

void save_manifest(const std::string& path, const RunManifest& manifest) {
  json doc = {{"command", manifest.command},
              {"config_paths", manifest.config_paths},
              {"seed", manifest.seed},
              {"outputs", manifest.outputs},
              {"tool_version", kToolVersion}};
  write_text(path, doc.dump(2) + "\n");
}

}  // namespace crowdcount::io
