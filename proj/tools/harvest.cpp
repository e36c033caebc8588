#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"

#include "harvest/config.hpp"
#include "harvest/error.hpp"
#include "harvest/instance_io.hpp"
#include "harvest/metrics.hpp"
#include "harvest/request.hpp"
#include "harvest/trace_io.hpp"

namespace fs = std::filesystem;
using namespace harvest;

namespace {

enum Exit { kOk = 0, kInput = 2, kRuntime = 3, kCap = 4 };

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  std::string output_dir;
  bool trace = false;
  std::vector<std::string> overrides;
};

nlohmann::json effective_config(const Globals& g) {
  if (g.config.empty()) throw ConfigError("--config is required");
  auto doc = load_json_file(g.config);
  for (const auto& o : g.overrides) apply_override(doc, o);
  if (g.seed) doc["experiment"]["base_seed"] = *g.seed;
  if (!g.output_dir.empty()) doc["experiment"]["output_dir"] = g.output_dir;
  return doc;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << content;
}

int cmd_simulate(const Globals& g) {
  const auto doc = effective_config(g);
  const RunConfig rc = parse_run_config(doc);
  const fs::path dir = rc.experiment.output_dir;
  fs::create_directories(dir);
  RunOptions opts;
  opts.record_events = g.trace;
  opts.record_cart = g.trace;
  const auto result = monte_carlo(rc.setup, rc.experiment.run_count, rc.experiment.base_seed, opts, true);

  write_file(dir / "metrics.json", metrics_json(config_digest(doc), result).dump(2) + "\n");
  std::ostringstream tray_metrics;
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const auto seed = result.runs[i].seed;
    const auto& trace = result.traces[i];
    std::ostringstream trays;
    write_trays_csv(trays, trace);
    write_file(dir / ("trays_" + std::to_string(seed) + ".csv"), trays.str());
    write_tray_metrics_csv(tray_metrics, seed, tray_records(trace), i == 0);
    if (g.trace) {
      std::ostringstream ev;
      write_events_jsonl(ev, trace);
      write_file(dir / ("trace_" + std::to_string(seed) + ".jsonl"), ev.str());
      for (std::size_t p = 0; p < trace.cart_logs.size(); ++p) {
        std::ostringstream cart;
        write_cart_log_csv(cart, cart_log_of(trace, static_cast<int>(p)));
        write_file(dir / ("cart_" + std::to_string(seed) + "_picker" + std::to_string(p) + ".csv"), cart.str());
      }
    }
  }
  write_file(dir / "tray_metrics.csv", tray_metrics.str());

  const auto& p = result.pooled;
  std::printf("runs %zu\n", p.runs);
  std::printf("mean_wait_s %.3f\n", p.wait.mean);
  std::printf("mean_non_productive_s %.3f\n", p.non_productive.mean);
  std::printf("efficiency %.4f\n", p.efficiency.mean);
  std::printf("trays_per_hour %.3f\n", p.trays_per_hour.mean);
  std::printf("output %s\n", dir.string().c_str());
  return kOk;
}

int cmd_threshold(const Globals& g) {
  const RunConfig rc = parse_run_config(effective_config(g));
  const auto& s = rc.setup;
  const double mean_pick = s.dists.pick_time.mean();
  std::printf("fr_threshold %.2f\n", fr_threshold(s.sim.speed_profile, s.field, mean_pick));
  std::printf("max_one_way_s %.3f\n", max_one_way_time(s.field, s.sim.speed_profile));
  std::printf("mean_pick_time_s %.3f\n", mean_pick);
  return kOk;
}

int cmd_analyze_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read cart log " + path);
  const auto rows = parse_cart_log(in);
  const auto trays = extract_tray_intervals(rows);
  std::printf("tray,t_start,t_end,productive_s,non_productive_s,efficiency,partial\n");
  std::vector<TrayRecord> complete;
  for (const auto& t : trays) {
    const double eff = t.partial ? 0.0 : t.productive / (t.productive + t.non_productive);
    std::printf("%d,%.3f,%.3f,%.3f,%.3f,%.4f,%d\n", t.tray_id, t.t_start, t.t_end, t.productive, t.non_productive,
                eff, t.partial ? 1 : 0);
    if (!t.partial) complete.push_back(t);
  }
  std::printf("trays %zu\n", complete.size());
  if (!complete.empty()) std::printf("mean_efficiency %.4f\n", mean_efficiency(complete));
  return kOk;
}

SolverInstance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read instance " + path);
  return parse_instance(in);
}

ScenarioSettings scenario_settings(const SolverInstance& inst) {
  ScenarioSettings s;
  s.now = inst.now;
  s.availability.assign(static_cast<std::size_t>(inst.robots), 0.0);
  s.load_time = inst.load_time;
  s.unload_time = inst.unload_time;
  return s;
}

int cmd_solve(const std::string& path, const std::string& algo) {
  const auto inst = read_instance(path);
  if (algo == "msa-exact" || algo == "srlpt") {
    if (!inst.has_scenario_columns) {
      throw ParseError("--algo " + algo + " needs self_transport_s,fill_s,fill_sd_s columns");
    }
    Scenario scn;
    for (const auto& r : inst.scenario) scn.requests.push_back({r.id, r.fill.mean, r.one_way, r.self_transport, r.full_y});
    const auto s = scenario_settings(inst);
    print_scenario_solution(std::cout, inst, algo == "srlpt" ? solve_scenario_srlpt(scn, s) : solve_scenario_exact(scn, s));
    return kOk;
  }
  if (inst.robots < 1) throw ParseError("M must be >= 1 for " + algo);
  Schedule s;
  if (algo == "bab") {
    s = schedule_bab(inst.problem);
  } else if (algo == "srpt-convert") {
    s = schedule_srpt_convert(inst.problem);
  } else if (algo == "brute") {
    s = brute_force_schedule(inst.problem);
  } else {
    throw ConfigError("--algo must be one of bab, srpt-convert, brute, msa-exact, srlpt");
  }
  print_schedule(std::cout, inst, s);
  return kOk;
}

int cmd_schedule_msa(const std::string& path, std::size_t scenarios, const std::string& algo, std::uint64_t seed) {
  const auto inst = read_instance(path);
  if (!inst.has_scenario_columns) throw ParseError("scenario instances need self_transport_s,fill_s,fill_sd_s columns");
  if (algo != "exact" && algo != "srlpt") throw ConfigError("--algo must be exact or srlpt");
  Rng rng(seed);
  const auto samples = get_samples(inst.scenario, scenarios, rng);
  const auto solutions = solve_scenarios(samples, scenario_settings(inst), algo == "exact");
  std::vector<double> expected_full;
  for (const auto& r : inst.scenario) expected_full.push_back(inst.now + r.fill.mean);
  print_consensus(std::cout, inst, consensus(solutions, expected_full), scenarios);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harvest-aid robot scheduling and simulation"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON run configuration");
  app.add_option("--seed", g.seed, "Base seed (overrides experiment.base_seed)");
  app.add_option("--jobs", g.jobs, "Worker threads for Monte-Carlo runs")->check(CLI::NonNegativeNumber);
  app.add_option("--output-dir", g.output_dir, "Output directory (overrides experiment.output_dir)");
  app.add_flag("--trace", g.trace, "Write JSON-lines event traces");
  app.add_option("--set", g.overrides, "Config override section.key=value (repeatable)");

  auto* simulate = app.add_subcommand("simulate", "Run the configured Monte-Carlo experiment")->fallthrough();
  auto* threshold = app.add_subcommand("threshold", "Print the fill-ratio threshold")->fallthrough();

  std::string log_path;
  auto* analyze = app.add_subcommand("analyze-log", "Extract tray intervals from a cart log")->fallthrough();
  analyze->add_option("log", log_path, "Cart log CSV")->required();

  std::string instance_path;
  std::string algo = "bab";
  auto* solve = app.add_subcommand("solve", "Solve a scheduling instance")->fallthrough();
  solve->add_option("instance", instance_path, "Instance CSV")->required();
  solve->add_option("--algo", algo, "bab, srpt-convert, brute, msa-exact or srlpt");

  std::size_t scenarios = 50;
  std::string msa_algo = "exact";
  auto* msa = app.add_subcommand("schedule-msa", "Consensus plan over sampled scenarios")->fallthrough();
  msa->add_option("instance", instance_path, "Scenario instance CSV")->required();
  msa->add_option("--scenarios", scenarios, "Scenario count")->check(CLI::PositiveNumber);
  msa->add_option("--algo", msa_algo, "exact or srlpt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (g.jobs > 0) omp_set_num_threads(g.jobs);
    if (simulate->parsed()) return cmd_simulate(g);
    if (threshold->parsed()) return cmd_threshold(g);
    if (analyze->parsed()) return cmd_analyze_log(log_path);
    if (solve->parsed()) return cmd_solve(instance_path, algo);
    if (msa->parsed()) return cmd_schedule_msa(instance_path, scenarios, msa_algo, g.seed.value_or(1));
  } catch (const SizeCapError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kCap;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInput;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntime;
  }
  return kInput;
}
