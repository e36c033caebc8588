#include "harvest/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <istream>
#include <numeric>
#include <string>
#include <string_view>

#include "harvest/error.hpp"

namespace harvest {

namespace {

double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  for (auto& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
  }
  return out;
}

bool to_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

double mean_efficiency(std::span<const TrayRecord> trays) {
  if (trays.empty()) throw InsufficientData("efficiency of an empty tray set");
  double sum = 0.0;
  for (const auto& t : trays) {
    if (!(t.productive > 0.0) || t.non_productive < 0.0) {
      throw ConfigError("tray " + std::to_string(t.tray_id) + " has invalid intervals");
    }
    sum += t.productive / (t.productive + t.non_productive);
  }
  return sum / static_cast<double>(trays.size());
}

double trays_per_hour(std::size_t tray_count, double harvest_duration_s) {
  if (!(harvest_duration_s > 0.0)) throw ConfigError("harvest duration must be > 0");
  return static_cast<double>(tray_count) / (harvest_duration_s / 3600.0);
}

double relative_precision(std::span<const double> run_means) {
  if (run_means.size() < 2) throw InsufficientData("relative precision needs at least two runs");
  const double m = mean_of(run_means);
  if (m == 0.0) throw InsufficientData("relative precision is undefined for a zero mean");
  return sample_sd(run_means) / std::sqrt(static_cast<double>(run_means.size())) / std::abs(m);
}

double plateau_estimate(double mean_distance, double robot_speed, double load_time) {
  if (!(robot_speed > 0.0)) throw ConfigError("robot speed must be > 0");
  return mean_distance / robot_speed + load_time;
}

std::vector<CartLogRow> parse_cart_log(std::istream& in) {
  std::vector<CartLogRow> rows;
  std::string line;
  int lineno = 0;
  bool header_checked = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = split(line);
    if (!header_checked) {
      header_checked = true;
      double probe = 0.0;
      if (!to_double(f[0], probe)) {
        if (f.size() != 5 || f[0] != "timestamp_s" || f[3] != "mass_g") {
          throw ParseError("expected header timestamp_s,x_m,y_m,mass_g,button", lineno);
        }
        continue;
      }
    }
    if (f.size() != 5) throw ParseError("expected 5 fields, got " + std::to_string(f.size()), lineno);
    CartLogRow r;
    double button = 0.0;
    if (!to_double(f[0], r.t) || !to_double(f[1], r.x) || !to_double(f[2], r.y) || !to_double(f[3], r.mass) ||
        !to_double(f[4], button)) {
      throw ParseError("non-numeric field", lineno);
    }
    if (button != 0.0 && button != 1.0) throw ParseError("button must be 0 or 1", lineno);
    r.button = static_cast<int>(button);
    if (!rows.empty() && r.t < rows.back().t) throw ParseError("timestamps must not decrease", lineno);
    rows.push_back(r);
  }
  if (rows.empty()) throw ParseError("cart log has no samples", lineno);
  return rows;
}

std::vector<TrayRecord> extract_tray_intervals(std::span<const CartLogRow> log, const ExtractionSettings& s) {
  std::vector<TrayRecord> out;
  for (std::size_t i = 1; i < log.size(); ++i) {
    if (log[i].t < log[i - 1].t) throw ParseError("timestamps must not decrease", static_cast<int>(i + 1));
  }
  if (log.empty()) return out;
  bool armed = false;
  bool awaiting_start = false;
  double tray_start = log.front().t;
  TrayRecord pending;
  int next_id = 0;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const double m = log[i].mass;
    if (awaiting_start) {
      if (m >= s.band_low && m <= s.band_high) {
        pending.non_productive = log[i].t - pending.t_end;
        out.push_back(pending);
        tray_start = log[i].t;
        awaiting_start = false;
      }
      continue;
    }
    if (m > s.full_mass) armed = true;
    if (armed && i + 1 < log.size() && m - log[i + 1].mass >= s.drop) {
      pending = {};
      pending.tray_id = next_id++;
      pending.t_start = tray_start;
      pending.t_end = log[i].t;
      pending.productive = pending.t_end - pending.t_start;
      armed = false;
      awaiting_start = true;
    }
  }
  if (awaiting_start) {
    pending.partial = true;
    out.push_back(pending);
  } else if (armed) {
    TrayRecord t;
    t.tray_id = next_id;
    t.t_start = tray_start;
    t.t_end = log.back().t;
    t.productive = t.t_end - t.t_start;
    t.partial = true;
    out.push_back(t);
  }
  return out;
}

std::vector<CartLogRow> cart_log_of(const HarvestTrace& trace, int picker) {
  if (picker < 0 || static_cast<std::size_t>(picker) >= trace.cart_logs.size()) {
    throw ConfigError("no cart log recorded for picker " + std::to_string(picker));
  }
  std::vector<CartLogRow> rows;
  for (const auto& s : trace.cart_logs[static_cast<std::size_t>(picker)]) rows.push_back({s.t, s.x, s.y, s.mass, s.button});
  return rows;
}

std::vector<TrayRecord> tray_records(const HarvestTrace& trace) {
  std::vector<TrayRecord> out;
  for (const auto& t : trace.complete_trays()) {
    TrayRecord r;
    r.tray_id = t.tray_id;
    r.picker_id = t.picker_id;
    r.t_start = t.t_start;
    r.t_end = t.t_end;
    r.productive = t.t_end - t.t_start;
    r.non_productive = t.t_resume - t.t_end;
    r.wait = t.wait;
    r.served_by = t.served_by;
    out.push_back(r);
  }
  return out;
}

RunMetrics summarize_run(const HarvestTrace& trace, std::uint64_t seed) {
  RunMetrics m;
  m.seed = seed;
  m.duration = trace.duration;
  m.rejections = trace.rejection_count;
  const auto records = tray_records(trace);
  const auto trays = trace.complete_trays();
  m.trays = records.size();
  double wait = 0.0;
  double fe = 0.0;
  double dist = 0.0;
  double dist_all = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    fe += records[i].non_productive;
    dist_all += trays[i].distance;
    if (records[i].served_by >= 0) {
      ++m.robot_served;
      wait += records[i].wait;
      dist += trays[i].distance;
    } else {
      ++m.self_served;
    }
  }
  if (m.robot_served > 0) {
    m.mean_wait = wait / static_cast<double>(m.robot_served);
    m.mean_distance = dist / static_cast<double>(m.robot_served);
  } else if (!records.empty()) {
    m.mean_distance = dist_all / static_cast<double>(records.size());
  }
  if (!records.empty()) {
    m.mean_non_productive = fe / static_cast<double>(records.size());
    m.efficiency = mean_efficiency(records);
  }
  if (trace.duration > 0.0) m.trays_per_hour = trays_per_hour(m.trays, trace.duration);
  return m;
}

StatSummary summarize(std::span<const double> values) {
  StatSummary s;
  s.n = values.size();
  s.mean = mean_of(values);
  s.degenerate = values.size() < 2;
  if (s.degenerate) return s;
  s.sd = sample_sd(values);
  s.se = s.sd / std::sqrt(static_cast<double>(values.size()));
  s.ci95 = 1.96 * s.se;
  s.relative_precision = s.mean != 0.0 ? s.se / std::abs(s.mean) : 0.0;
  return s;
}

PooledStats pool(std::span<const RunMetrics> runs) {
  PooledStats p;
  p.runs = runs.size();
  auto column = [&](double RunMetrics::*field) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const auto& r : runs) v.push_back(r.*field);
    return summarize(v);
  };
  p.wait = column(&RunMetrics::mean_wait);
  p.non_productive = column(&RunMetrics::mean_non_productive);
  p.efficiency = column(&RunMetrics::efficiency);
  p.trays_per_hour = column(&RunMetrics::trays_per_hour);
  p.distance = column(&RunMetrics::mean_distance);
  return p;
}

namespace {

MonteCarloResult run_all(const HarvestSetup& setup, std::size_t run_count, std::uint64_t base_seed,
                         const RunOptions& options, bool keep_traces, bool parallel) {
  if (run_count < 1) throw ConfigError("experiment.run_count must be >= 1");
  setup.validate();
  MonteCarloResult res;
  res.runs.resize(run_count);
  if (keep_traces) res.traces.resize(run_count);
  std::vector<std::exception_ptr> errors(run_count);
  const auto n = static_cast<std::ptrdiff_t>(run_count);

  auto one = [&](std::ptrdiff_t i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      HarvestSetup s = setup;
      s.sim.rng_seed = base_seed + idx;
      auto trace = run_harvest(s, options);
      res.runs[idx] = summarize_run(trace, s.sim.rng_seed);
      if (keep_traces) res.traces[idx] = std::move(trace);
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  };

  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) one(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) one(i);
  }

  for (std::size_t i = 0; i < run_count; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw SimulationFault("run with seed " + std::to_string(base_seed + i) + " failed: " + e.what());
    }
  }
  res.pooled = pool(res.runs);
  return res;
}

}  // namespace

MonteCarloResult monte_carlo(const HarvestSetup& setup, std::size_t run_count, std::uint64_t base_seed,
                             const RunOptions& options, bool keep_traces) {
  return run_all(setup, run_count, base_seed, options, keep_traces, true);
}

MonteCarloResult monte_carlo_serial(const HarvestSetup& setup, std::size_t run_count, std::uint64_t base_seed,
                                    const RunOptions& options, bool keep_traces) {
  return run_all(setup, run_count, base_seed, options, keep_traces, false);
}

}  // namespace harvest
