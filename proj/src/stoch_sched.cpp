#include "harvest/stoch_sched.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <string>

#include "harvest/error.hpp"

namespace harvest {

namespace {

constexpr double kEps = 1e-9;

struct Prepared {
  double full_at;     // absolute tray-full time
  double release_at;  // absolute earliest dispatch
  double one_way;
  double process;
  double self;
  double full_y;
};

std::vector<Prepared> prepare(const Scenario& scn, const ScenarioSettings& s) {
  std::vector<Prepared> out;
  out.reserve(scn.requests.size());
  for (const auto& r : scn.requests) {
    if (r.fill < 0.0 || r.one_way < 0.0 || r.self_transport < 0.0) {
      throw ConfigError("scenario request " + std::to_string(r.id) + " has a negative time");
    }
    out.push_back({s.now + r.fill, s.now + std::max(r.fill - r.one_way, 0.0), r.one_way,
                   2.0 * r.one_way + s.load_time + s.unload_time, r.self_transport, r.full_y});
  }
  return out;
}

double on_grid(double t, const ScenarioSettings& s) {
  if (s.grid <= 0.0) return t;
  return s.now + std::ceil((t - s.now) / s.grid - kEps) * s.grid;
}

double horizon(const std::vector<Prepared>& reqs, const ScenarioSettings& s) {
  double f = 0.0;
  double tt = 0.0;
  for (const auto& r : reqs) {
    f = std::max(f, r.full_at - s.now);
    tt = std::max(tt, r.self);
  }
  return s.now + f + tt;
}

std::size_t earliest(const std::vector<double>& free) {
  return static_cast<std::size_t>(std::min_element(free.begin(), free.end()) - free.begin());
}

struct Step {
  std::size_t job;
  int robot;
  double start;
};

ScenarioSolution assemble(const std::vector<Prepared>& reqs, const ScenarioSettings& s, const std::vector<Step>& steps) {
  const std::size_t n = reqs.size();
  ScenarioSolution sol;
  sol.rejected.assign(n, true);
  sol.serve_order.assign(n, 0);
  sol.robot.assign(n, -1);
  sol.dispatch.assign(n, 0.0);
  sol.completion.assign(n, 0.0);
  for (const auto& st : steps) {
    sol.rejected[st.job] = false;
    sol.robot[st.job] = st.robot;
    sol.dispatch[st.job] = st.start;
    sol.completion[st.job] = st.start + reqs[st.job].one_way + s.load_time;
  }
  std::vector<std::size_t> idx(steps.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return steps[a].start < steps[b].start; });
  for (std::size_t r = 0; r < idx.size(); ++r) sol.serve_order[steps[idx[r]].job] = static_cast<int>(r + 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (sol.rejected[i]) sol.completion[i] = reqs[i].full_at + reqs[i].self;
    sol.objective += sol.completion[i] - reqs[i].full_at;
  }
  return sol;
}

class ExactSearch {
 public:
  ExactSearch(const std::vector<Prepared>& reqs, const ScenarioSettings& s)
      : reqs_(reqs), s_(s), tb_(horizon(reqs, s)), free_(s.availability) {
    for (double& f : free_) f += s.now;
  }

  std::vector<Step> run() {
    used_.assign(reqs_.size(), false);
    descend(0.0);
    return best_steps_;
  }

  bool found() const { return best_ < std::numeric_limits<double>::infinity(); }

 private:
  double robot_lower(std::size_t j, double min_free) const {
    const auto& r = reqs_[j];
    return std::max(r.release_at, min_free) + r.one_way + s_.load_time - r.full_at;
  }

  void descend(double cost) {
    const double min_free = free_.empty() ? std::numeric_limits<double>::infinity() : *std::min_element(free_.begin(), free_.end());
    double bound = cost;
    double reject_rest = 0.0;
    bool any_left = false;
    for (std::size_t j = 0; j < reqs_.size(); ++j) {
      if (used_[j]) continue;
      any_left = true;
      const double rl = robot_lower(j, min_free);
      bound += s_.allow_rejection ? std::min(reqs_[j].self, rl) : rl;
      reject_rest += reqs_[j].self;
    }
    if (bound >= best_ - kEps) return;
    if (!any_left) {
      best_ = cost;
      best_steps_ = path_;
      return;
    }
    if (!free_.empty()) {
      const std::size_t k = earliest(free_);
      for (std::size_t j = 0; j < reqs_.size(); ++j) {
        if (used_[j]) continue;
        const auto& r = reqs_[j];
        const double start = on_grid(std::max(r.release_at, free_[k]), s_);
        const double done = start + r.one_way + s_.load_time;
        if (s_.allow_rejection && done > tb_ + kEps) continue;
        const double saved = free_[k];
        free_[k] = start + r.process;
        used_[j] = true;
        path_.push_back({j, static_cast<int>(k), start});
        descend(cost + done - r.full_at);
        path_.pop_back();
        used_[j] = false;
        free_[k] = saved;
      }
    }
    if (s_.allow_rejection && cost + reject_rest < best_ - kEps) {
      best_ = cost + reject_rest;
      best_steps_ = path_;
    }
  }

  const std::vector<Prepared>& reqs_;
  const ScenarioSettings& s_;
  double tb_;
  std::vector<double> free_;
  std::vector<bool> used_;
  std::vector<Step> path_;
  std::vector<Step> best_steps_;
  double best_ = std::numeric_limits<double>::infinity();
};

}  // namespace

std::vector<std::size_t> ScenarioSolution::served_sequence() const {
  std::vector<std::size_t> seq;
  for (std::size_t i = 0; i < serve_order.size(); ++i) {
    if (!rejected[i]) seq.push_back(i);
  }
  std::sort(seq.begin(), seq.end(), [&](std::size_t a, std::size_t b) { return serve_order[a] < serve_order[b]; });
  return seq;
}

SelfTransport self_transport_time(double distance, double walk_speed, double unload_time, double full_time) {
  if (!(walk_speed > 0.0)) throw ConfigError("picker walk speed must be > 0");
  const double d = 2.0 * distance / walk_speed + unload_time;
  return {d, full_time + d};
}

std::vector<Scenario> get_samples(const std::vector<StochasticRequest>& requests, const SamplingGeometry& geo,
                                  double now, std::size_t count, Rng& rng) {
  if (count < 1) throw ConfigError("scenario count must be >= 1");
  if (geo.field == nullptr) throw ConfigError("sampling needs a field");
  std::vector<Scenario> out(count);
  for (auto& scn : out) {
    scn.requests.reserve(requests.size());
    for (const auto& r : requests) {
      const double fill = std::max(0.0, rng.normal(r.fill_time.mean, r.fill_time.sd));
      const double speed = std::max(0.0, rng.normal(r.speed.mean, r.speed.sd));
      const Point full{r.current_location.x, std::max(0.0, r.current_location.y - speed * fill)};
      const double d = manhattan_distance(geo.station, full, *geo.field);
      ScenarioRequest s;
      s.id = r.id;
      s.fill = std::max(0.0, r.created_at + fill - now);
      s.one_way = one_way_travel_time(geo.station, full, *geo.field, geo.robot);
      s.self_transport = self_transport_time(d, geo.walk_speed, geo.unload_time, 0.0).duration;
      s.full_y = full.y;
      scn.requests.push_back(s);
    }
  }
  return out;
}

std::vector<Scenario> get_samples(const std::vector<FixedRequest>& requests, std::size_t count, Rng& rng) {
  if (count < 1) throw ConfigError("scenario count must be >= 1");
  std::vector<Scenario> out(count);
  for (auto& scn : out) {
    for (const auto& r : requests) {
      scn.requests.push_back({r.id, std::max(0.0, rng.normal(r.fill.mean, r.fill.sd)), r.one_way, r.self_transport,
                              r.full_y});
    }
  }
  return out;
}

ScenarioSolution solve_scenario_exact(const Scenario& scn, const ScenarioSettings& settings, std::size_t cap) {
  const std::size_t n = scn.requests.size();
  if (n > cap) {
    throw SizeCapError("exact scenario solver is capped at " + std::to_string(cap) + " requests (got " +
                       std::to_string(n) + "); use srlpt");
  }
  if (!settings.allow_rejection && settings.availability.empty() && n > 0) {
    throw ConfigError("rejection is forbidden but there are no robots");
  }
  const auto reqs = prepare(scn, settings);
  ExactSearch search(reqs, settings);
  const auto steps = search.run();
  if (!search.found()) throw SimulationFault("exact scenario solver found no feasible schedule");
  return assemble(reqs, settings, steps);
}

ScenarioSolution solve_scenario_srlpt(const Scenario& scn, const ScenarioSettings& settings) {
  const auto reqs = prepare(scn, settings);
  const std::size_t n = reqs.size();
  const double tb = horizon(reqs, settings);
  std::vector<bool> open(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    if (reqs[i].full_y < settings.headland_reject_distance) open[i] = false;
  }
  std::vector<double> free = settings.availability;
  for (double& f : free) f += settings.now;
  std::vector<Step> steps;
  while (!free.empty()) {
    const std::size_t k = earliest(free);
    const double t = free[k];
    // Trays already full with no robot on the way are self-transported.
    for (std::size_t i = 0; i < n; ++i) {
      if (open[i] && reqs[i].full_at < t - kEps) open[i] = false;
    }
    std::size_t pick = n;
    double next_release = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!open[i]) continue;
      if (reqs[i].release_at <= t + kEps) {
        if (pick == n || reqs[i].process > reqs[pick].process + kEps ||
            (std::abs(reqs[i].process - reqs[pick].process) <= kEps && reqs[i].full_at < reqs[pick].full_at)) {
          pick = i;
        }
      } else {
        next_release = std::min(next_release, reqs[i].release_at);
      }
    }
    if (pick == n) {
      if (!std::isfinite(next_release)) break;
      free[k] = next_release;
      continue;
    }
    open[pick] = false;
    const double start = on_grid(t, settings);
    if (start + reqs[pick].one_way + settings.load_time > tb + kEps) continue;
    steps.push_back({pick, static_cast<int>(k), start});
    free[k] = start + reqs[pick].process;
  }
  return assemble(reqs, settings, steps);
}

std::vector<ScenarioSolution> solve_scenarios_serial(const std::vector<Scenario>& scenarios,
                                                     const ScenarioSettings& settings, bool exact, std::size_t cap) {
  std::vector<ScenarioSolution> out;
  out.reserve(scenarios.size());
  for (const auto& scn : scenarios) {
    out.push_back(exact ? solve_scenario_exact(scn, settings, cap) : solve_scenario_srlpt(scn, settings));
  }
  return out;
}

std::vector<ScenarioSolution> solve_scenarios(const std::vector<Scenario>& scenarios, const ScenarioSettings& settings,
                                              bool exact, std::size_t cap) {
  const auto count = static_cast<std::ptrdiff_t>(scenarios.size());
  std::vector<ScenarioSolution> out(scenarios.size());
  std::vector<std::exception_ptr> errors(scenarios.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      const auto& scn = scenarios[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(i)] =
          exact ? solve_scenario_exact(scn, settings, cap) : solve_scenario_srlpt(scn, settings);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

ConsensusPlan consensus(const std::vector<ScenarioSolution>& solutions, const std::vector<double>& expected_full) {
  if (solutions.empty()) throw ConfigError("consensus needs at least one scenario solution");
  const std::size_t n = expected_full.size();
  ConsensusPlan plan;
  plan.score.assign(n, 0);
  std::vector<std::size_t> rejections(n, 0);
  const int big_n = static_cast<int>(n);
  for (const auto& sol : solutions) {
    if (sol.rejected.size() != n) throw ConfigError("scenario solutions cover different request sets");
    for (std::size_t i = 0; i < n; ++i) {
      if (sol.rejected[i]) {
        plan.score[i] -= 1;
        ++rejections[i];
      } else {
        plan.score[i] += big_n - sol.serve_order[i];
      }
    }
  }
  plan.order.resize(n);
  std::iota(plan.order.begin(), plan.order.end(), 0);
  std::sort(plan.order.begin(), plan.order.end(), [&](std::size_t a, std::size_t b) {
    if (plan.score[a] != plan.score[b]) return plan.score[a] > plan.score[b];
    if (expected_full[a] != expected_full[b]) return expected_full[a] < expected_full[b];
    return a < b;
  });
  plan.rejected.resize(n);
  for (std::size_t i = 0; i < n; ++i) plan.rejected[i] = 2 * rejections[i] > solutions.size();
  return plan;
}

std::vector<DispatchCommand> dispatch_decision(const ConsensusPlan& plan, const std::vector<int>& available_robots,
                                               std::vector<DispatchCandidate> candidates, double now) {
  std::vector<DispatchCommand> out;
  for (int robot : available_robots) {
    for (std::size_t i : plan.order) {
      auto& c = candidates[i];
      if (plan.rejected[i] || c.dispatched || c.expected_release > now + kEps) continue;
      c.dispatched = true;
      out.push_back({robot, i});
      break;
    }
  }
  return out;
}

}  // namespace harvest
