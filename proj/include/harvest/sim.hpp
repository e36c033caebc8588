#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "harvest/agents.hpp"
#include "harvest/field.hpp"
#include "harvest/policy.hpp"
#include "harvest/request.hpp"

namespace harvest {

/// One tray as harvested by the simulator. served_by is the robot id, or -1
/// for self-transport.
struct TrayTrace {
  int tray_id = 0;
  int picker_id = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  double t_resume = 0.0;
  Point full{};
  int served_by = -1;
  double wait = 0.0;      // tray full until exchange starts (robot-served)
  double distance = 0.0;  // station to full location
  double mass = 0.0;
  bool partial = false;   // last tray of a picker, never filled
};

struct TraceEvent {
  double t = 0.0;
  std::string agent_kind;  // picker, robot, scheduler
  int agent_id = 0;
  std::string transition;
  std::string from;
  std::string to;
  Point position{};
  double mass = 0.0;
  int request_id = -1;
  Point target{};
  double dispatch_time = 0.0;
};

struct CartSample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double mass = 0.0;  // gross, tray tare included
  int button = 0;
};

inline constexpr double kTrayTare = 500.0;

struct HarvestTrace {
  std::vector<TrayTrace> trays;  // completed and partial, by completion
  std::vector<TraceEvent> events;
  std::vector<std::vector<CartSample>> cart_logs;  // per picker
  double duration = 0.0;         // until the last picker stopped
  double picked_mass = 0.0;
  double delivered_mass = 0.0;
  std::size_t steps = 0;
  int request_count = 0;
  int rejection_count = 0;
  std::size_t replans = 0;

  std::vector<TrayTrace> complete_trays() const;
};

struct RunOptions {
  bool record_events = false;
  bool record_cart = false;
};

struct HarvestSetup {
  SimConfig sim{};
  FieldMap field{1, 1.0, 1.0, 1.0, {{0.5, 0.0}}};
  ParamDistributions dists{};
  UncertaintyParams uncertainty{};
  SchedulerConfig scheduler{};

  void validate() const;
};

/// Runs one harvest of the block with `setup.sim.rng_seed`.
HarvestTrace run_harvest(const HarvestSetup& setup, const RunOptions& options = {});

}  // namespace harvest
