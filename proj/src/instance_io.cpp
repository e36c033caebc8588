#include "harvest/instance_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string_view>

#include "harvest/error.hpp"

namespace harvest {

namespace {

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r' && c != ' ' && c != '\t') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double number(const std::string& s, const char* what, int line) {
  double v = 0.0;
  std::string_view sv(s);
  if (!sv.empty() && sv.front() == '+') sv.remove_prefix(1);
  const auto res = std::from_chars(sv.data(), sv.data() + sv.size(), v);
  if (sv.empty() || res.ec != std::errc() || res.ptr != sv.data() + sv.size() || !std::isfinite(v)) {
    throw ParseError(std::string(what) + " is not a number: '" + s + "'", line);
  }
  return v;
}

bool next_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") != std::string::npos && line[line.find_first_not_of(" \t")] != '#') return true;
  }
  return false;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

SolverInstance parse_instance(std::istream& in) {
  SolverInstance inst;
  std::string line;
  int lineno = 0;
  if (!next_line(in, line, lineno)) throw ParseError("instance file is empty", lineno);
  if (fields(line) != std::vector<std::string>{"M", "now", "load_s", "unload_s"}) {
    throw ParseError("expected header M,now,load_s,unload_s", lineno);
  }
  if (!next_line(in, line, lineno)) throw ParseError("missing instance parameters", lineno);
  auto f = fields(line);
  if (f.size() != 4) throw ParseError("expected 4 instance parameters", lineno);
  const double m = number(f[0], "M", lineno);
  if (m < 0 || m != std::floor(m)) throw ParseError("M must be a non-negative integer", lineno);
  inst.robots = static_cast<int>(m);
  inst.now = number(f[1], "now", lineno);
  inst.load_time = number(f[2], "load_s", lineno);
  inst.unload_time = number(f[3], "unload_s", lineno);
  if (inst.load_time < 0 || inst.unload_time < 0) throw ParseError("load and unload times must be >= 0", lineno);

  if (!next_line(in, line, lineno)) throw ParseError("missing request header", lineno);
  const auto header = fields(line);
  const std::vector<std::string> base{"id", "release_s", "one_way_s", "process_s"};
  const std::vector<std::string> stoch{"self_transport_s", "fill_s", "fill_sd_s"};
  if (header.size() < 4 || !std::equal(base.begin(), base.end(), header.begin())) {
    throw ParseError("expected request header id,release_s,one_way_s,process_s", lineno);
  }
  if (header.size() > 4) {
    if (header.size() < 7 || !std::equal(stoch.begin(), stoch.end(), header.begin() + 4) ||
        (header.size() == 8 && header[7] != "full_y_m") || header.size() > 8) {
      throw ParseError("extra request columns must be self_transport_s,fill_s,fill_sd_s[,full_y_m]", lineno);
    }
    inst.has_scenario_columns = true;
  }
  const bool has_y = header.size() == 8;

  inst.problem.now = inst.now;
  inst.problem.availability.assign(static_cast<std::size_t>(inst.robots), 0.0);
  int index = 0;
  while (next_line(in, line, lineno)) {
    f = fields(line);
    if (f.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()), lineno);
    }
    RequestTimeline t;
    t.request_id = index;
    t.release_delay = number(f[1], "release_s", lineno);
    t.one_way = number(f[2], "one_way_s", lineno);
    t.process = number(f[3], "process_s", lineno);
    if (t.release_delay < 0 || t.one_way < 0 || t.process < 0) throw ParseError("times must be >= 0", lineno);
    t.remaining_fill = t.release_delay > 0.0 ? t.release_delay + t.one_way : 0.0;
    inst.labels.push_back(f[0]);
    inst.problem.jobs.push_back(t);
    if (inst.has_scenario_columns) {
      FixedRequest r;
      r.id = index;
      r.one_way = t.one_way;
      r.self_transport = number(f[4], "self_transport_s", lineno);
      r.fill = {number(f[5], "fill_s", lineno), number(f[6], "fill_sd_s", lineno)};
      r.full_y = has_y ? number(f[7], "full_y_m", lineno) : 1e9;
      if (r.self_transport < 0 || r.fill.mean < 0 || r.fill.sd < 0) throw ParseError("times must be >= 0", lineno);
      const double p = 2.0 * t.one_way + inst.load_time + inst.unload_time;
      if (std::abs(p - t.process) > 1e-6) {
        throw ParseError("process_s must equal 2*one_way_s + load_s + unload_s for scenario instances", lineno);
      }
      inst.scenario.push_back(r);
    }
    ++index;
  }
  return inst;
}

void print_schedule(std::ostream& out, const SolverInstance& inst, const Schedule& s) {
  out << "robot,request,dispatch_s,arrival_s,completion_s,wait_s\n";
  for (std::size_t k = 0; k < s.sequences.size(); ++k) {
    for (std::size_t j : s.sequences[k]) {
      const auto& t = s.timelines[j];
      out << k << ',' << inst.labels[j] << ',' << num(t.dispatch) << ',' << num(t.arrival) << ',' << num(t.completion)
          << ',' << num(t.wait) << '\n';
    }
  }
  out << "objective " << num(s.objective) << '\n';
  out << "total_wait " << num(s.total_wait()) << '\n';
}

void print_scenario_solution(std::ostream& out, const SolverInstance& inst, const ScenarioSolution& s) {
  out << "request,outcome,order,robot,dispatch_s,completion_s\n";
  for (std::size_t i = 0; i < s.rejected.size(); ++i) {
    out << inst.labels[i] << ',' << (s.rejected[i] ? "rejected" : "served") << ',' << s.serve_order[i] << ','
        << s.robot[i] << ',' << (s.rejected[i] ? std::string("") : num(s.dispatch[i])) << ',' << num(s.completion[i])
        << '\n';
  }
  out << "objective " << num(s.objective) << '\n';
}

void print_consensus(std::ostream& out, const SolverInstance& inst, const ConsensusPlan& plan, std::size_t scenarios) {
  out << "scenarios " << scenarios << '\n';
  out << "rank,request,score,rejected\n";
  for (std::size_t r = 0; r < plan.order.size(); ++r) {
    const auto i = plan.order[r];
    out << r + 1 << ',' << inst.labels[i] << ',' << plan.score[i] << ',' << (plan.rejected[i] ? 1 : 0) << '\n';
  }
}

}  // namespace harvest
