#pragma once

#include <cstddef>
#include <vector>

#include "harvest/field.hpp"
#include "harvest/random.hpp"
#include "harvest/request.hpp"

namespace harvest {

/// One sampled request. `fill` is the time from `now` until the tray is full.
struct ScenarioRequest {
  int id = 0;
  double fill = 0.0;
  double one_way = 0.0;         // robot travel, station to full location
  double self_transport = 0.0;  // picker round trip plus unload
  double full_y = 0.0;          // distance of the full location from the headland
};

struct Scenario {
  std::vector<ScenarioRequest> requests;
};

struct ScenarioSettings {
  double now = 0.0;
  std::vector<double> availability;  // per robot, time until free; empty = no robots
  double load_time = 5.0;
  double unload_time = 5.0;
  double grid = 1.0;                 // dispatch instants are now + k * grid
  bool allow_rejection = true;
  double headland_reject_distance = 5.0;  // heuristic only
};

struct ScenarioSolution {
  std::vector<bool> rejected;
  std::vector<int> serve_order;  // 1-based by dispatch instant, 0 when rejected
  std::vector<int> robot;        // -1 when rejected
  std::vector<double> dispatch;
  std::vector<double> completion;  // absolute, robot or self
  double objective = 0.0;          // sum of full-to-collected intervals

  std::vector<std::size_t> served_sequence() const;
};

struct SelfTransport {
  double duration = 0.0;
  double completion = 0.0;
};

SelfTransport self_transport_time(double distance, double walk_speed, double unload_time, double full_time);

/// Geometry used to turn sampled fill times and speeds into locations and
/// travel times.
struct SamplingGeometry {
  const FieldMap* field = nullptr;
  Point station{};
  SpeedProfile robot{};
  double walk_speed = 1.0;
  double unload_time = 5.0;
  double load_time = 5.0;
};

/// `count` scenarios; per request one fill-time and one speed draw, both
/// floored at zero, full location moved toward the headland and clamped at it.
std::vector<Scenario> get_samples(const std::vector<StochasticRequest>& requests, const SamplingGeometry& geo,
                                  double now, std::size_t count, Rng& rng);

/// Request with fixed travel times and an uncertain fill time (instance files).
struct FixedRequest {
  int id = 0;
  Gaussian fill{};
  double one_way = 0.0;
  double self_transport = 0.0;
  double full_y = 0.0;
};

std::vector<Scenario> get_samples(const std::vector<FixedRequest>& requests, std::size_t count, Rng& rng);

inline constexpr std::size_t kScenarioExactCap = 6;

ScenarioSolution solve_scenario_exact(const Scenario& scn, const ScenarioSettings& settings,
                                      std::size_t cap = kScenarioExactCap);
ScenarioSolution solve_scenario_srlpt(const Scenario& scn, const ScenarioSettings& settings);

/// Solves every scenario; the OpenMP path and the serial path give identical results.
std::vector<ScenarioSolution> solve_scenarios(const std::vector<Scenario>& scenarios, const ScenarioSettings& settings,
                                              bool exact, std::size_t cap = kScenarioExactCap);
std::vector<ScenarioSolution> solve_scenarios_serial(const std::vector<Scenario>& scenarios,
                                                     const ScenarioSettings& settings, bool exact,
                                                     std::size_t cap = kScenarioExactCap);

struct ConsensusPlan {
  std::vector<int> score;
  std::vector<std::size_t> order;  // request indices, best first
  std::vector<bool> rejected;      // rejected in a strict majority of scenarios
};

/// `expected_full` breaks score ties (earlier first), then request index.
ConsensusPlan consensus(const std::vector<ScenarioSolution>& solutions, const std::vector<double>& expected_full);

struct DispatchCandidate {
  double expected_release = 0.0;  // absolute
  bool dispatched = false;
};

struct DispatchCommand {
  int robot = 0;
  std::size_t request = 0;
};

/// Each available robot, in the given order, takes the best-scored request
/// that is not rejected, not yet dispatched and whose expected release has come.
std::vector<DispatchCommand> dispatch_decision(const ConsensusPlan& plan, const std::vector<int>& available_robots,
                                               std::vector<DispatchCandidate> candidates, double now);

}  // namespace harvest
