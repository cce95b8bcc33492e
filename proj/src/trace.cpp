#include "crowdcount/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <stdexcept>
#include <string>

namespace crowdcount {

namespace {

double parse_field(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(),
                                   value);
  if (ec != std::errc{} || ptr != field.data() + field.size() ||
      !std::isfinite(value))
    throw std::runtime_error("non-numeric value at line " +
                             std::to_string(line_no));
  return value;
}

double nearest_rank(std::vector<double>& values, double quantile) {
  std::sort(values.begin(), values.end());
  std::size_t idx = static_cast<std::size_t>(
      std::ceil(quantile * static_cast<double>(values.size())));
  if (idx > 0) --idx;
  if (idx >= values.size()) idx = values.size() - 1;
  return values[idx];
}

}  // namespace

RssiTrace load_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trace input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t_s,rssi_dbm")
    throw std::runtime_error("bad header: expected t_s,rssi_dbm");

  RssiTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("non-numeric value at line " +
                               std::to_string(line_no));
    trace.t_s.push_back(parse_field({line.data(), comma}, line_no));
    trace.rssi_db.push_back(
        parse_field({line.data() + comma + 1, line.size() - comma - 1},
                    line_no));
  }

  if (trace.size() < 100)
    throw std::runtime_error("trace too short: " +
                             std::to_string(trace.size()) +
                             " samples (need at least 100)");
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (!(trace.t_s[i] > trace.t_s[i - 1]))
      throw std::runtime_error("timestamps not increasing");

  std::vector<double> spacing(trace.size() - 1);
  for (std::size_t i = 1; i < trace.size(); ++i)
    spacing[i - 1] = trace.t_s[i] - trace.t_s[i - 1];
  std::vector<double> sorted = spacing;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                   sorted.end());
  double median = sorted[sorted.size() / 2];
  for (double d : spacing)
    if (std::abs(d - median) > 0.01 * median)
      throw std::runtime_error("non-uniform sample spacing");
  trace.sample_rate = 1.0 / median;
  return trace;
}

double baseline(const RssiTrace& trace, BaselineMethod method) {
  if (trace.rssi_db.empty())
    throw std::invalid_argument("baseline of an empty trace");
  std::vector<double> sorted = trace.rssi_db;
  std::size_t mid = sorted.size() / 2;
  std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
  double median = sorted[mid];
  if (method == BaselineMethod::kMedian) return median;

  double total = 0.0;
  std::size_t count = 0;
  for (double v : trace.rssi_db)
    if (v >= median) {
      total += v;
      ++count;
    }
  return total / static_cast<double>(count);
}

std::vector<DipEvent> detect_dips(const RssiTrace& trace, double base,
                                  double t_los) {
  if (!(t_los > 0.0)) throw std::invalid_argument("t_los must be positive");
  const double level = base - t_los;

  // Below-threshold runs as [first, last] sample indices.
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  bool in_run = false;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace.rssi_db[i] < level) {
      if (!in_run) runs.emplace_back(i, i);
      runs.back().second = i;
      in_run = true;
    } else {
      in_run = false;
    }
  }

  // Debounce: runs separated by a single above-threshold sample are one dip.
  std::vector<std::pair<std::size_t, std::size_t>> merged;
  for (const auto& run : runs) {
    if (!merged.empty() && run.first - merged.back().second - 1 < 2)
      merged.back().second = run.second;
    else
      merged.push_back(run);
  }

  std::vector<DipEvent> dips;
  dips.reserve(merged.size());
  for (const auto& [first, last] : merged) {
    double trough = trace.rssi_db[first];
    for (std::size_t i = first; i <= last; ++i)
      trough = std::min(trough, trace.rssi_db[i]);
    dips.push_back({trace.t_s[first], trace.t_s[last], base - trough});
  }
  return dips;
}

ObservedGaps gaps_from_dips(const std::vector<DipEvent>& dips, double t_min_s,
                            double dt_s, GapMode mode) {
  if (dips.size() < 2) throw std::runtime_error("insufficient dips");
  if (!(dt_s > 0.0)) throw std::invalid_argument("dt must be positive");
  for (std::size_t i = 1; i < dips.size(); ++i)
    if (!(dips[i].start_s >= dips[i - 1].end_s))
      throw std::invalid_argument("dips must be time-ordered");

  ObservedGaps out;
  out.t_min = static_cast<int>(std::lround(t_min_s / dt_s));
  out.dt_s = dt_s;
  const DipEvent* prev_kept = &dips.front();
  for (std::size_t i = 1; i < dips.size(); ++i) {
    double gap_s = (mode == GapMode::kStartToStart)
                       ? dips[i].start_s - prev_kept->start_s
                       : dips[i].start_s - prev_kept->end_s;
    // convert first, then compare in steps: the boundary case must not
    // depend on float rounding of the timestamp difference
    int gap_steps = static_cast<int>(std::lround(gap_s / dt_s));
    if (gap_steps < std::max(1, out.t_min)) continue;  // unidentifiable
    out.gaps.push_back(gap_steps);
    out.timestamps.push_back(dips[i].start_s);
    prev_kept = &dips[i];
  }
  if (out.gaps.empty()) throw std::runtime_error("insufficient dips");
  return out;
}

CalibrationResult calibrate_threshold(const RssiTrace& multipath_trace) {
  double base = baseline(multipath_trace);
  std::vector<double> depths;
  depths.reserve(multipath_trace.size());
  double deepest = 0.0;
  for (double v : multipath_trace.rssi_db) {
    double depth = std::max(0.0, base - v);
    deepest = std::max(deepest, depth);
    depths.push_back(depth);
  }
  double p999 = nearest_rank(depths, 0.999);
  double t_los = std::ceil((p999 + 1.0) * 2.0 - 1e-9) / 2.0;
  return {t_los, deepest};
}

}  // namespace crowdcount
