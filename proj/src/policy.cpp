#include "harvest/policy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "harvest/error.hpp"

namespace harvest {

namespace {

constexpr double kEps = 1e-9;

constexpr std::array<std::pair<SchedulerKind, std::string_view>, 6> kNames{{
    {SchedulerKind::Manual, "manual"},
    {SchedulerKind::Reactive, "reactive"},
    {SchedulerKind::DeterministicBab, "deterministic-bab"},
    {SchedulerKind::DeterministicSrptConvert, "deterministic-srpt-convert"},
    {SchedulerKind::MsaExact, "msa-exact"},
    {SchedulerKind::MsaSrlpt, "msa-srlpt"},
}};

std::vector<int> available_ids(const PlanningContext& ctx) {
  std::vector<int> ids;
  for (const auto& r : ctx.robots) {
    if (r.available) ids.push_back(r.id);
  }
  return ids;
}

}  // namespace

std::string_view scheduler_name(SchedulerKind k) {
  for (const auto& [kind, name] : kNames) {
    if (kind == k) return name;
  }
  return "?";
}

std::optional<SchedulerKind> parse_scheduler(std::string_view name) {
  for (const auto& [kind, n] : kNames) {
    if (n == name) return kind;
  }
  return std::nullopt;
}

bool needs_extended_fsm(SchedulerKind k) {
  return k == SchedulerKind::Manual || k == SchedulerKind::MsaExact || k == SchedulerKind::MsaSrlpt;
}

bool uses_stochastic_requests(SchedulerKind k) { return k == SchedulerKind::MsaExact || k == SchedulerKind::MsaSrlpt; }

void SchedulerConfig::validate() const {
  if (fr_request < 0.0 || fr_request > 1.0) throw ConfigError("scheduler.fr_request must lie in [0, 1]");
  if (scenario_count < 1) throw ConfigError("scheduler.scenario_count must be >= 1");
  if (bab_cap < 1) throw ConfigError("scheduler.bab_cap must be >= 1");
  if (scenario_exact_cap < 1) throw ConfigError("scheduler.scenario_exact_cap must be >= 1");
  if (grid < 0.0) throw ConfigError("scheduler.grid must be >= 0");
  if (self_walk_speed < 0.0) throw ConfigError("scheduler.self_walk_speed must be >= 0");
}

void DeterministicPolicy::replan(const PlanningContext& ctx) {
  ++replans_;
  plan_.clear();
  if (ctx.requests.empty() || ctx.robots.empty()) return;
  DispatchProblem problem;
  problem.now = ctx.now;
  for (const auto& r : ctx.requests) {
    problem.jobs.push_back(derive_timeline(r.truth, ctx.station, *ctx.field, ctx.cfg->speed_profile, ctx.cfg->load_time,
                                           ctx.cfg->unload_time, ctx.now));
  }
  for (const auto& r : ctx.robots) problem.availability.push_back(r.available ? 0.0 : r.availability_delay);
  const Schedule s = exact_ && problem.jobs.size() <= cap_ ? schedule_bab(problem, cap_) : schedule_srpt_convert(problem);
  for (std::size_t j = 0; j < problem.jobs.size(); ++j) {
    plan_[ctx.requests[j].id] = {ctx.robots[static_cast<std::size_t>(s.robot_of[j])].id, s.timelines[j].dispatch};
  }
}

std::vector<Dispatch> DeterministicPolicy::due(const PlanningContext& ctx) {
  std::vector<Dispatch> out;
  for (int robot : available_ids(ctx)) {
    int best = -1;
    double best_t = 0.0;
    for (const auto& r : ctx.requests) {
      auto it = plan_.find(r.id);
      if (it == plan_.end() || it->second.robot != robot || it->second.dispatch > ctx.now + kEps) continue;
      if (best < 0 || it->second.dispatch < best_t) {
        best = r.id;
        best_t = it->second.dispatch;
      }
    }
    if (best >= 0) {
      out.push_back({robot, best});
      plan_.erase(best);
    }
  }
  return out;
}

MsaPolicy::MsaPolicy(const SchedulerConfig& cfg, double walk_speed, std::uint64_t seed)
    : cfg_(cfg), walk_speed_(walk_speed), rng_(seed) {
  if (!(walk_speed_ > 0.0)) throw ConfigError("self-transport walk speed must be > 0");
}

void MsaPolicy::replan(const PlanningContext& ctx) {
  ++replans_;
  ids_.clear();
  expected_release_.clear();
  plan_ = {};
  if (ctx.requests.empty()) return;

  std::vector<StochasticRequest> beliefs;
  std::vector<double> expected_full;
  for (const auto& r : ctx.requests) {
    beliefs.push_back(r.belief);
    ids_.push_back(r.id);
    const double fill = r.belief.fill_time.mean;
    const Point loc{r.belief.current_location.x,
                    std::max(0.0, r.belief.current_location.y - std::max(0.0, r.belief.speed.mean) * fill)};
    const double u = one_way_travel_time(ctx.station, loc, *ctx.field, ctx.cfg->speed_profile);
    expected_full.push_back(r.belief.created_at + fill);
    expected_release_.push_back(r.belief.created_at + std::max(fill - u, 0.0));
  }

  SamplingGeometry geo;
  geo.field = ctx.field;
  geo.station = ctx.station;
  geo.robot = ctx.cfg->speed_profile;
  geo.walk_speed = walk_speed_;
  geo.unload_time = ctx.cfg->unload_time;
  geo.load_time = ctx.cfg->load_time;
  const auto scenarios = get_samples(beliefs, geo, ctx.now, cfg_.scenario_count, rng_);

  ScenarioSettings settings;
  settings.now = ctx.now;
  for (const auto& r : ctx.robots) settings.availability.push_back(r.available ? 0.0 : r.availability_delay);
  settings.load_time = ctx.cfg->load_time;
  settings.unload_time = ctx.cfg->unload_time;
  settings.grid = cfg_.grid;

  const bool exact = cfg_.kind == SchedulerKind::MsaExact && beliefs.size() <= cfg_.scenario_exact_cap;
  const auto solutions = cfg_.parallel_scenarios ? solve_scenarios(scenarios, settings, exact, cfg_.scenario_exact_cap)
                                                 : solve_scenarios_serial(scenarios, settings, exact, cfg_.scenario_exact_cap);
  plan_ = consensus(solutions, expected_full);
}

std::vector<Dispatch> MsaPolicy::due(const PlanningContext& ctx) {
  if (ids_.empty()) return {};
  std::vector<DispatchCandidate> candidates(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    candidates[i].expected_release = expected_release_[i];
    const bool live = std::any_of(ctx.requests.begin(), ctx.requests.end(), [&](const LiveRequest& r) { return r.id == ids_[i]; });
    candidates[i].dispatched = !live;
  }
  std::vector<Dispatch> out;
  for (const auto& c : dispatch_decision(plan_, available_ids(ctx), candidates, ctx.now)) {
    out.push_back({c.robot, ids_[c.request]});
  }
  return out;
}

std::unique_ptr<DispatchPolicy> make_policy(const SchedulerConfig& cfg, double mean_walk_speed, std::uint64_t seed) {
  switch (cfg.kind) {
    case SchedulerKind::Manual: return std::make_unique<ManualPolicy>();
    case SchedulerKind::Reactive:
    case SchedulerKind::DeterministicSrptConvert: return std::make_unique<DeterministicPolicy>(false, cfg.bab_cap);
    case SchedulerKind::DeterministicBab: return std::make_unique<DeterministicPolicy>(true, cfg.bab_cap);
    case SchedulerKind::MsaExact:
    case SchedulerKind::MsaSrlpt:
      return std::make_unique<MsaPolicy>(cfg, cfg.self_walk_speed > 0.0 ? cfg.self_walk_speed : mean_walk_speed, seed);
  }
  throw ConfigError("unknown scheduler kind");
}

}  // namespace harvest
