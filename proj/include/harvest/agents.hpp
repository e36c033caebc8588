#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "harvest/field.hpp"
#include "harvest/random.hpp"

namespace harvest {

enum class FsmVariant { Simple, Extended };

/// Frequency histogram: bin i covers [edges[i], edges[i+1]); a bin whose
/// edges coincide is a point mass.
struct Histogram {
  std::vector<double> edges;
  std::vector<double> weights;

  static Histogram point(double value) { return {{value, value}, {1.0}}; }
  void validate(std::string_view name) const;
  double mean() const;
};

struct ParamDistributions {
  Histogram pick_speed;  // m/s
  Histogram walk_speed;  // m/s
  Histogram pick_time;   // s per full tray
  void validate() const;
};

/// Per-tray stochastic picker parameters.
struct TrayDraw {
  double pick_speed = 0.0;
  double walk_speed = 0.0;
  double pick_time = 0.0;
};

double sample_histogram(const Histogram& h, Rng& rng);
TrayDraw sample_tray_params(const ParamDistributions& dists, Rng& rng);

struct SimConfig {
  double timestep = 0.5;
  double tray_capacity = 5000.0;  // g
  double load_time = 5.0;
  double unload_time = 5.0;
  double robot_standoff = 5.0;    // m, extended variant only
  int crew_size = 25;
  int robot_count = 8;
  SpeedProfile speed_profile{};
  double fr_request = 1.0;
  FsmVariant fsm_variant = FsmVariant::Simple;
  std::uint64_t rng_seed = 0;
  double max_sim_time = 48.0 * 3600.0;

  void validate() const;
};

// Picker states of both FSM variants. The simple variant uses Start through
// ExchangeTrays plus Stop; WalkHeadland/WalkFurrow carry a partly full tray
// there as well.
enum class PickerMode {
  Start,
  WalkHeadland,
  WalkFurrow,
  Pick,
  WaitForRobot,
  ExchangeTrays,
  WalkPartlyFullHeadland,
  WalkPartlyFullFurrow,
  TransportFullFurrow,
  TransportFullHeadland,
  IdleInQueue,
  EmptyTrayBackHeadland,
  EmptyTrayBackFurrow,
  Stop,
};

enum class RobotMode {
  Start,
  Available,
  TravelToPicker,
  WaitAtPicker,
  DriveToFullTray,
  EmptyTrayBack,
  ExchangeTrays,
  TransportFullTray,
  IdleInQueue,
  Stop,
};

enum class PickerEvent {
  Begin,
  ReachedFurrow,
  ReachedSplitline,
  TrayFull,
  RobotArrived,
  ExchangeDone,
  FurrowEnd,
  ReachedHeadland,
  ReachedStation,
  Delivered,
  Resumed,
  FieldDone,
};

enum class RobotEvent {
  Ready,
  Dispatch,
  ArrivedAtTarget,
  TrayFull,
  PickerLeftFurrow,
  ReachedPicker,
  ExchangeDone,
  ReachedStation,
  Unloaded,
  FieldDone,
};

std::string_view mode_name(PickerMode m, FsmVariant v);
std::string_view mode_name(RobotMode m, FsmVariant v);
std::string_view event_name(PickerEvent e);
std::string_view event_name(RobotEvent e);

/// Polyline the agent is following; the last waypoint is the target.
struct Route {
  std::vector<Point> waypoints;
  std::size_t next = 0;
  bool done() const noexcept { return next >= waypoints.size(); }
  Point target() const { return waypoints.back(); }
};

/// Headland-then-furrow route from `from` to `to` (either may be on the headland).
Route manhattan_route(Point from, Point to);

struct PickerState {
  int id = 0;
  PickerMode mode = PickerMode::Start;
  Point position{};
  double tray_mass = 0.0;  // g, net of tare
  double elapsed = 0.0;    // T, time in current mode
  double heading = 0.0;    // theta, radians
  TrayDraw draw{};
  int furrow = -1;
  bool served_flag = false;  // a robot is assigned to the current tray
  bool reject_flag = false;  // the scheduler rejected the current tray
  Route route{};
};

enum class CarriedTray { None, Empty, Full };

struct RobotState {
  int id = 0;
  RobotMode mode = RobotMode::Start;
  Point position{};
  double elapsed = 0.0;
  double heading = 0.0;
  double availability_delay = 0.0;  // time until free
  std::optional<int> assigned_request;
  CarriedTray carried = CarriedTray::None;
  Route route{};
};

/// Speed of a picker in its current mode: pick, walk or 0.
double picker_speed(const PickerState& s);

/// One timestep of picker kinematics and tray filling; tray mass saturates at capacity.
PickerState step_picker(PickerState state, const SimConfig& cfg);

/// One timestep of robot kinematics along its route at the profile speed of
/// each segment.
RobotState step_robot(RobotState state, const SimConfig& cfg);

bool tray_is_full(const PickerState& s, const SimConfig& cfg);

/// Applies the FSM edge for (mode, event); throws SimulationFault on an
/// illegal pair. TrayFull goes to TransportFullFurrow when reject_flag is set
/// (extended variant only). Resets elapsed time on every mode change.
PickerState transition_picker(PickerState state, PickerEvent event, FsmVariant variant);
RobotState transition_robot(RobotState state, RobotEvent event, FsmVariant variant);

}  // namespace harvest
