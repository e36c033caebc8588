#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "harvest/sim.hpp"

namespace harvest {

/// Productive and non-productive interval of one tray.
struct TrayRecord {
  int tray_id = 0;
  int picker_id = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  double productive = 0.0;
  double non_productive = 0.0;
  double wait = 0.0;
  int served_by = -1;
  bool partial = false;
};

double mean_efficiency(std::span<const TrayRecord> trays);
double trays_per_hour(std::size_t tray_count, double harvest_duration_s);

/// Standard error of the mean of the run means over their mean.
double relative_precision(std::span<const double> run_means);

double plateau_estimate(double mean_distance, double robot_speed, double load_time);

struct CartLogRow {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double mass = 0.0;
  int button = 0;
};

struct ExtractionSettings {
  double full_mass = 4000.0;  // g, arms drop detection
  double drop = 3000.0;       // g, between consecutive samples
  double band_low = 400.0;    // g, empty tray on the cart
  double band_high = 600.0;
};

/// CSV with header timestamp_s,x_m,y_m,mass_g,button. Throws ParseError
/// naming the line on malformed rows or decreasing timestamps.
std::vector<CartLogRow> parse_cart_log(std::istream& in);

std::vector<TrayRecord> extract_tray_intervals(std::span<const CartLogRow> log, const ExtractionSettings& s = {});

/// Cart log of picker `picker` as recorded by the simulator.
std::vector<CartLogRow> cart_log_of(const HarvestTrace& trace, int picker);

std::vector<TrayRecord> tray_records(const HarvestTrace& trace);

struct RunMetrics {
  std::uint64_t seed = 0;
  std::size_t trays = 0;
  std::size_t robot_served = 0;
  std::size_t self_served = 0;
  double mean_wait = 0.0;            // robot-served trays
  double mean_non_productive = 0.0;  // all trays
  double efficiency = 0.0;
  double trays_per_hour = 0.0;
  double mean_distance = 0.0;        // station to full location, robot-served trays
  double duration = 0.0;
  int rejections = 0;
};

RunMetrics summarize_run(const HarvestTrace& trace, std::uint64_t seed);

struct StatSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;              // sample sd of run values
  double se = 0.0;              // sd / sqrt(n)
  double relative_precision = 0.0;
  double ci95 = 0.0;            // half-width, 1.96 se
  bool degenerate = true;       // fewer than two runs
};

StatSummary summarize(std::span<const double> values);

struct PooledStats {
  std::size_t runs = 0;
  StatSummary wait;
  StatSummary non_productive;
  StatSummary efficiency;
  StatSummary trays_per_hour;
  StatSummary distance;
};

PooledStats pool(std::span<const RunMetrics> runs);

struct MonteCarloResult {
  std::vector<RunMetrics> runs;
  PooledStats pooled;
  std::vector<HarvestTrace> traces;  // filled when requested
};

/// Runs seeds base_seed .. base_seed + run_count - 1. A failing run aborts
/// with a SimulationFault naming the lowest failing seed. Results do not
/// depend on thread count.
MonteCarloResult monte_carlo(const HarvestSetup& setup, std::size_t run_count, std::uint64_t base_seed,
                             const RunOptions& options = {}, bool keep_traces = false);
MonteCarloResult monte_carlo_serial(const HarvestSetup& setup, std::size_t run_count, std::uint64_t base_seed,
                                    const RunOptions& options = {}, bool keep_traces = false);

}  // namespace harvest
