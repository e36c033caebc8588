#include "harvest/trace_io.hpp"

#include <cstdio>
#include <ostream>

namespace harvest {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

json stat_json(const StatSummary& s) {
  json j{{"n", s.n}, {"mean", s.mean}};
  if (s.degenerate) {
    j["sd"] = nullptr;
    j["degenerate"] = true;
  } else {
    j["sd"] = s.sd;
    j["se"] = s.se;
    j["ci95_halfwidth"] = s.ci95;
    j["relative_precision"] = s.relative_precision;
  }
  return j;
}

}  // namespace

void write_trays_csv(std::ostream& out, const HarvestTrace& trace) {
  out << "tray_id,picker_id,t_start,t_end,t_resume,x_full,y_full,served_by\n";
  for (const auto& t : trace.complete_trays()) {
    out << t.tray_id << ',' << t.picker_id << ',' << num(t.t_start) << ',' << num(t.t_end) << ',' << num(t.t_resume)
        << ',' << num(t.full.x) << ',' << num(t.full.y) << ',' << t.served_by << '\n';
  }
}

void write_events_jsonl(std::ostream& out, const HarvestTrace& trace) {
  for (const auto& e : trace.events) {
    json j{{"t", e.t},           {"agent_kind", e.agent_kind}, {"agent_id", e.agent_id},
           {"transition", e.transition}, {"x", e.position.x},     {"y", e.position.y},
           {"W", e.mass}};
    if (!e.from.empty()) {
      j["from"] = e.from;
      j["to"] = e.to;
    }
    if (e.request_id >= 0) j["request_id"] = e.request_id;
    if (e.transition == "dispatch" || e.transition == "request") {
      j["target_x"] = e.target.x;
      j["target_y"] = e.target.y;
    }
    if (e.transition == "dispatch") {
      j["robot_id"] = e.agent_id;
      j["t_dispatch"] = e.dispatch_time;
    }
    out << j.dump() << '\n';
  }
}

void write_tray_metrics_csv(std::ostream& out, std::uint64_t seed, std::span<const TrayRecord> records, bool header) {
  if (header) out << "seed,tray_id,picker_id,productive_s,non_productive_s,wait_s,served_by\n";
  for (const auto& r : records) {
    out << seed << ',' << r.tray_id << ',' << r.picker_id << ',' << num(r.productive) << ',' << num(r.non_productive)
        << ',' << num(r.wait) << ',' << r.served_by << '\n';
  }
}

void write_cart_log_csv(std::ostream& out, std::span<const CartLogRow> rows) {
  out << "timestamp_s,x_m,y_m,mass_g,button\n";
  for (const auto& r : rows) {
    out << num(r.t) << ',' << num(r.x) << ',' << num(r.y) << ',' << num(r.mass) << ',' << r.button << '\n';
  }
}

json metrics_json(const std::string& digest, const MonteCarloResult& result) {
  json runs = json::array();
  for (const auto& r : result.runs) {
    runs.push_back({{"seed", r.seed},
                    {"trays", r.trays},
                    {"robot_served", r.robot_served},
                    {"self_served", r.self_served},
                    {"rejections", r.rejections},
                    {"mean_wait_s", r.mean_wait},
                    {"mean_non_productive_s", r.mean_non_productive},
                    {"efficiency", r.efficiency},
                    {"trays_per_hour", r.trays_per_hour},
                    {"mean_distance_m", r.mean_distance},
                    {"duration_s", r.duration}});
  }
  const auto& p = result.pooled;
  json pooled{{"runs", p.runs},
              {"mean_wait_s", stat_json(p.wait)},
              {"mean_non_productive_s", stat_json(p.non_productive)},
              {"efficiency", stat_json(p.efficiency)},
              {"trays_per_hour", stat_json(p.trays_per_hour)},
              {"mean_distance_m", stat_json(p.distance)}};
  return {{"config_digest", digest}, {"runs", runs}, {"pooled", pooled}};
}

}  // namespace harvest
