#include "harvest/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <vector>

#include "harvest/error.hpp"

namespace harvest {

using nlohmann::json;

namespace {

class Section {
 public:
  Section(const json& doc, std::string name, bool required) : name_(std::move(name)) {
    if (!doc.contains(name_)) {
      if (required) throw ConfigError("missing section '" + name_ + "'");
      return;
    }
    obj_ = &doc.at(name_);
    if (!obj_->is_object()) throw ConfigError("section '" + name_ + "' must be an object");
  }

  ~Section() = default;

  bool has(const std::string& key) const { return obj_ != nullptr && obj_->contains(key); }

  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const auto& v = obj_->at(key);
    if (!v.is_number()) throw ConfigError(path(key) + " must be a number");
    return v.get<double>();
  }

  long long integer(const std::string& key, long long fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const auto& v = obj_->at(key);
    if (!v.is_number_integer()) throw ConfigError(path(key) + " must be an integer");
    return v.get<long long>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    const auto& v = obj_->at(key);
    if (!v.is_string()) throw ConfigError(path(key) + " must be a string");
    return v.get<std::string>();
  }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    return has(key) ? &obj_->at(key) : nullptr;
  }

  void require(const std::string& key) const {
    if (!has(key)) throw ConfigError("missing " + path(key));
  }

  std::string path(const std::string& key) const { return name_ + "." + key; }

  void reject_unknown() const {
    if (obj_ == nullptr) return;
    for (const auto& [k, v] : obj_->items()) {
      if (!seen_.count(k)) throw ConfigError("unknown key " + path(k));
    }
  }

 private:
  std::string name_;
  const json* obj_ = nullptr;
  std::set<std::string> seen_;
};

Histogram histogram(Section& sec, const std::string& key) {
  sec.require(key);
  const json& h = *sec.raw(key);
  const std::string where = sec.path(key);
  if (!h.is_object() || !h.contains("edges") || !h.contains("weights")) {
    throw ConfigError(where + " needs 'edges' and 'weights'");
  }
  Histogram out;
  try {
    out.edges = h.at("edges").get<std::vector<double>>();
    out.weights = h.at("weights").get<std::vector<double>>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": edges and weights must be number arrays");
  }
  return out;
}

FieldMap parse_field(const json& doc) {
  Section sec(doc, "field", true);
  const auto count = static_cast<int>(sec.integer("furrow_count", 0));
  const double length = sec.number("furrow_length", 0.0);
  const double spacing = sec.number("bed_spacing", 0.0);
  const double split = sec.number("split_line_y", length / 2.0);
  std::vector<Point> stations;
  if (const json* st = sec.raw("stations")) {
    if (!st->is_array() || st->empty()) throw ConfigError("field.stations must be a non-empty array");
    for (const auto& s : *st) {
      if (s.is_number()) {
        stations.push_back({s.get<double>(), 0.0});
      } else if (s.is_object() && s.contains("x")) {
        stations.push_back({s.at("x").get<double>(), s.value("y", 0.0)});
      } else {
        throw ConfigError("field.stations entries must be numbers or {x, y}");
      }
    }
  }
  const auto station_count = sec.integer("station_count", 1);
  if (stations.empty()) {
    if (station_count < 1) throw ConfigError("field.station_count must be >= 1");
    if (count < 1 || !(spacing > 0.0)) throw ConfigError("field.furrow_count and field.bed_spacing must be positive");
    stations = FieldMap::evenly_spaced_stations(count, spacing, static_cast<int>(station_count));
  }
  const auto active = static_cast<int>(sec.integer("active_station", 0));
  sec.reject_unknown();
  return FieldMap(count, length, spacing, split, stations, active);
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  for (const auto& [k, v] : doc.items()) {
    static const std::set<std::string> known{"field", "sim", "distributions", "uncertainty", "scheduler", "experiment"};
    if (!known.count(k)) throw ConfigError("unknown section '" + k + "'");
  }
  RunConfig rc;
  auto& s = rc.setup;

  try {
    s.field = parse_field(doc);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("field: ") + e.what());
  }

  {
    Section sec(doc, "sim", true);
    auto& c = s.sim;
    c.timestep = sec.number("timestep", c.timestep);
    c.tray_capacity = sec.number("tray_capacity", c.tray_capacity);
    c.load_time = sec.number("load_time", c.load_time);
    c.unload_time = sec.number("unload_time", c.unload_time);
    c.robot_standoff = sec.number("robot_standoff", c.robot_standoff);
    c.crew_size = static_cast<int>(sec.integer("crew_size", c.crew_size));
    c.robot_count = static_cast<int>(sec.integer("robot_count", c.robot_count));
    c.max_sim_time = sec.number("max_sim_time", c.max_sim_time);
    const double v = sec.number("robot_speed", 0.0);
    if (v != 0.0) c.speed_profile = SpeedProfile::uniform(v);
    c.speed_profile.headland_speed = sec.number("headland_speed", c.speed_profile.headland_speed);
    c.speed_profile.furrow_speed = sec.number("furrow_speed", c.speed_profile.furrow_speed);
    const std::string variant = sec.text("fsm_variant", "simple");
    if (variant == "simple") {
      c.fsm_variant = FsmVariant::Simple;
    } else if (variant == "extended") {
      c.fsm_variant = FsmVariant::Extended;
    } else {
      throw ConfigError("sim.fsm_variant must be 'simple' or 'extended'");
    }
    sec.reject_unknown();
    try {
      c.speed_profile.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("sim: ") + e.what());
    }
  }

  {
    Section sec(doc, "distributions", true);
    s.dists.pick_speed = histogram(sec, "pick_speed");
    s.dists.walk_speed = histogram(sec, "walk_speed");
    s.dists.pick_time = histogram(sec, "pick_time");
    sec.reject_unknown();
  }

  {
    Section sec(doc, "uncertainty", false);
    auto& u = s.uncertainty;
    u.bias_fraction = sec.number("bias_fraction", u.bias_fraction);
    u.pred_sd = sec.number("pred_sd", u.pred_sd);
    u.loc_noise_halfwidth = sec.number("loc_noise_halfwidth", u.loc_noise_halfwidth);
    u.regression_window = sec.number("regression_window", u.regression_window);
    u.sample_period = sec.number("sample_period", u.sample_period);
    sec.reject_unknown();
  }

  {
    Section sec(doc, "scheduler", true);
    auto& c = s.scheduler;
    sec.require("kind");
    const std::string kind = sec.text("kind", "");
    const auto k = parse_scheduler(kind);
    if (!k) {
      throw ConfigError("scheduler.kind '" + kind +
                        "' is not one of manual, reactive, deterministic-bab, deterministic-srpt-convert, msa-exact, "
                        "msa-srlpt");
    }
    c.kind = *k;
    c.fr_request = sec.number("fr_request", c.fr_request);
    const auto scenarios = sec.integer("scenario_count", static_cast<long long>(c.scenario_count));
    const auto bab = sec.integer("bab_cap", static_cast<long long>(c.bab_cap));
    const auto exact = sec.integer("scenario_exact_cap", static_cast<long long>(c.scenario_exact_cap));
    if (scenarios < 1) throw ConfigError("scheduler.scenario_count must be >= 1");
    if (bab < 1 || exact < 1) throw ConfigError("scheduler caps must be >= 1");
    c.scenario_count = static_cast<std::size_t>(scenarios);
    c.bab_cap = static_cast<std::size_t>(bab);
    c.scenario_exact_cap = static_cast<std::size_t>(exact);
    c.grid = sec.number("grid", c.grid);
    c.self_walk_speed = sec.number("self_walk_speed", c.self_walk_speed);
    sec.reject_unknown();
  }

  {
    Section sec(doc, "experiment", false);
    const auto runs = sec.integer("run_count", 1);
    const auto seed = sec.integer("base_seed", 1);
    if (runs < 1) throw ConfigError("experiment.run_count must be >= 1");
    if (seed < 0) throw ConfigError("experiment.base_seed must be >= 0");
    rc.experiment.run_count = static_cast<std::size_t>(runs);
    rc.experiment.base_seed = static_cast<std::uint64_t>(seed);
    rc.experiment.output_dir = sec.text("output_dir", rc.experiment.output_dir);
    sec.reject_unknown();
  }

  s.sim.rng_seed = rc.experiment.base_seed;
  s.sim.fr_request = s.scheduler.effective_fr();
  s.validate();
  return rc;
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("configuration file " + path.string() + " is not valid JSON: " + e.what());
  }
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq || dot == 0 || dot + 1 == eq) {
    throw ConfigError("override '" + std::string(assignment) + "' must look like section.key=value");
  }
  const std::string section(assignment.substr(0, dot));
  const std::string key(assignment.substr(dot + 1, eq - dot - 1));
  const std::string value(assignment.substr(eq + 1));
  json parsed = json::parse(value, nullptr, false);
  if (parsed.is_discarded()) parsed = value;
  if (!doc.contains(section)) doc[section] = json::object();
  doc[section][key] = parsed;
}

std::string config_digest(const json& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : doc.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace harvest
