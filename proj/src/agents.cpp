#include "harvest/agents.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "harvest/error.hpp"

namespace harvest {

namespace {

constexpr double kTol = 1e-9;

// Axis-aligned unit vector for a heading, exact for multiples of pi/2 so
// furrow motion never drifts in x.
Point unit(double heading) {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  auto snap = [](double v) { return std::abs(v) < 1e-12 ? 0.0 : (std::abs(std::abs(v) - 1.0) < 1e-12 ? std::copysign(1.0, v) : v); };
  return {snap(c), snap(s)};
}

double heading_to(Point from, Point to) { return std::atan2(to.y - from.y, to.x - from.x); }

bool on_headland_segment(Point a, Point b) { return std::abs(a.y) < kTol && std::abs(b.y) < kTol; }

// Moves along the route for `dt` seconds; speed_of(a, b) gives the speed on
// the segment a->b. Leftover time after a waypoint carries into the next leg.
template <typename SpeedFn>
void advance(Point& pos, double& heading, Route& route, double dt, SpeedFn speed_of) {
  double remaining = dt;
  while (!route.done() && remaining > kTol) {
    const Point wp = route.waypoints[route.next];
    const double dx = wp.x - pos.x;
    const double dy = wp.y - pos.y;
    const double dist = std::abs(dx) + std::abs(dy);  // legs are axis-aligned
    if (dist < kTol) {
      pos = wp;
      ++route.next;
      continue;
    }
    const double v = speed_of(pos, wp);
    if (v <= 0.0) return;
    heading = heading_to(pos, wp);
    const double reach = v * remaining;
    if (reach + kTol >= dist) {
      pos = wp;
      remaining -= dist / v;
      ++route.next;
    } else {
      const Point u = unit(heading);
      pos.x += reach * u.x;
      pos.y += reach * u.y;
      remaining = 0.0;
    }
  }
  while (!route.done() && std::abs(route.waypoints[route.next].x - pos.x) + std::abs(route.waypoints[route.next].y - pos.y) < kTol) {
    ++route.next;
  }
}

[[noreturn]] void illegal(std::string_view agent, std::string_view mode, std::string_view event) {
  throw SimulationFault(std::string("illegal ") + std::string(agent) + " transition: " + std::string(mode) +
                        " on " + std::string(event));
}

}  // namespace

void Histogram::validate(std::string_view name) const {
  const std::string n(name);
  if (weights.empty() || edges.size() != weights.size() + 1) {
    throw ConfigError("distributions." + n + ": need k weights and k+1 edges, k >= 1");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw ConfigError("distributions." + n + ": negative weight");
    if (edges[i + 1] < edges[i]) throw ConfigError("distributions." + n + ": edges must be non-decreasing");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-6) throw ConfigError("distributions." + n + ": weights must sum to 1");
}

double Histogram::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) m += weights[i] * 0.5 * (edges[i] + edges[i + 1]);
  return m;
}

void ParamDistributions::validate() const {
  pick_speed.validate("pick_speed");
  walk_speed.validate("walk_speed");
  pick_time.validate("pick_time");
  if (!(pick_speed.edges.front() > 0.0) || !(walk_speed.edges.front() > 0.0) || !(pick_time.edges.front() > 0.0)) {
    throw ConfigError("distributions: all sampled parameters must be strictly positive");
  }
}

double sample_histogram(const Histogram& h, Rng& rng) {
  if (h.weights.empty()) throw ConfigError("empty histogram");
  const double u = rng.uniform01();
  double acc = 0.0;
  std::size_t bin = h.weights.size() - 1;
  for (std::size_t i = 0; i < h.weights.size(); ++i) {
    acc += h.weights[i];
    if (u < acc) {
      bin = i;
      break;
    }
  }
  while (h.weights[bin] <= 0.0 && bin > 0) --bin;
  const double lo = h.edges[bin];
  const double hi = h.edges[bin + 1];
  const double v = rng.uniform01();
  return lo == hi ? lo : lo + (hi - lo) * v;
}

TrayDraw sample_tray_params(const ParamDistributions& dists, Rng& rng) {
  TrayDraw d;
  d.pick_speed = sample_histogram(dists.pick_speed, rng);
  d.walk_speed = sample_histogram(dists.walk_speed, rng);
  d.pick_time = sample_histogram(dists.pick_time, rng);
  return d;
}

void SimConfig::validate() const {
  if (!(timestep > 0.0)) throw ConfigError("sim.timestep must be > 0");
  if (!(tray_capacity > 0.0)) throw ConfigError("sim.tray_capacity must be > 0");
  if (load_time < 0.0) throw ConfigError("sim.load_time must be >= 0");
  if (unload_time < 0.0) throw ConfigError("sim.unload_time must be >= 0");
  if (robot_standoff < 0.0) throw ConfigError("sim.robot_standoff must be >= 0");
  if (crew_size < 1) throw ConfigError("sim.crew_size must be >= 1");
  if (robot_count < 0) throw ConfigError("sim.robot_count must be >= 0");
  if (fr_request < 0.0 || fr_request > 1.0) throw ConfigError("sim.fr_request must lie in [0, 1]");
  speed_profile.validate();
}

std::string_view mode_name(PickerMode m, FsmVariant v) {
  const bool ext = v == FsmVariant::Extended;
  switch (m) {
    case PickerMode::Start: return ext ? "Start" : "START";
    case PickerMode::WalkHeadland: return ext ? "Walk-Empty-Tray-Headland" : "WALK_TO_FURROW_ENTRANCE";
    case PickerMode::WalkFurrow: return ext ? "Walk-Empty-Tray-Furrow" : "WALK_TO_FURROW_SPLITLINE";
    case PickerMode::Pick: return ext ? "Picking" : "PICK";
    case PickerMode::WaitForRobot: return ext ? "Waiting-For-Robot" : "WAIT_FOR_ROBOT_ARRIVAL";
    case PickerMode::ExchangeTrays: return ext ? "Exchange-Trays" : "EXCHANGE_TRAYS";
    case PickerMode::WalkPartlyFullHeadland: return "Walk-Partly-Full-Tray-Headland";
    case PickerMode::WalkPartlyFullFurrow: return "Walk-Partly-Full-Tray-Furrow";
    case PickerMode::TransportFullFurrow: return "Transport-Full-Tray-Furrow";
    case PickerMode::TransportFullHeadland: return "Transport-Full-Tray-Headland";
    case PickerMode::IdleInQueue: return "Idle-In-Queue";
    case PickerMode::EmptyTrayBackHeadland: return "Empty-Tray-Back-Headland";
    case PickerMode::EmptyTrayBackFurrow: return "Empty-Tray-Back-Furrow";
    case PickerMode::Stop: return ext ? "Stop" : "STOP";
  }
  return "?";
}

std::string_view mode_name(RobotMode m, FsmVariant v) {
  const bool ext = v == FsmVariant::Extended;
  switch (m) {
    case RobotMode::Start: return ext ? "Start" : "START";
    case RobotMode::Available: return ext ? "Available" : "AVAILABLE";
    case RobotMode::TravelToPicker: return ext ? "Transp-Empty-Tray-to-Dispatch-Location" : "TRAVEL_TO_PICKER";
    case RobotMode::WaitAtPicker: return ext ? "Wait-At-Dispatch-Location" : "WAIT_UNTIL_TRAY_FILLS";
    case RobotMode::DriveToFullTray: return "Drive-To-Full-Tray-Location";
    case RobotMode::EmptyTrayBack: return "Empty-Tray-Back";
    case RobotMode::ExchangeTrays: return ext ? "Exchange-Trays" : "EXCHANGE_TRAYS";
    case RobotMode::TransportFullTray: return ext ? "Transp-Full-Tray-Back" : "TRANSPORT_FULL-TRAY";
    case RobotMode::IdleInQueue: return ext ? "Idle-In-Queue" : "IDLE_IN_QUEUE";
    case RobotMode::Stop: return ext ? "Stop" : "STOP";
  }
  return "?";
}

std::string_view event_name(PickerEvent e) {
  switch (e) {
    case PickerEvent::Begin: return "begin";
    case PickerEvent::ReachedFurrow: return "reached_furrow";
    case PickerEvent::ReachedSplitline: return "reached_splitline";
    case PickerEvent::TrayFull: return "tray_full";
    case PickerEvent::RobotArrived: return "robot_arrived";
    case PickerEvent::ExchangeDone: return "exchange_done";
    case PickerEvent::FurrowEnd: return "furrow_end";
    case PickerEvent::ReachedHeadland: return "reached_headland";
    case PickerEvent::ReachedStation: return "reached_station";
    case PickerEvent::Delivered: return "delivered";
    case PickerEvent::Resumed: return "resumed";
    case PickerEvent::FieldDone: return "field_done";
  }
  return "?";
}

std::string_view event_name(RobotEvent e) {
  switch (e) {
    case RobotEvent::Ready: return "ready";
    case RobotEvent::Dispatch: return "dispatch";
    case RobotEvent::ArrivedAtTarget: return "arrived_at_target";
    case RobotEvent::TrayFull: return "tray_full";
    case RobotEvent::PickerLeftFurrow: return "picker_left_furrow";
    case RobotEvent::ReachedPicker: return "reached_picker";
    case RobotEvent::ExchangeDone: return "exchange_done";
    case RobotEvent::ReachedStation: return "reached_station";
    case RobotEvent::Unloaded: return "unloaded";
    case RobotEvent::FieldDone: return "field_done";
  }
  return "?";
}

Route manhattan_route(Point from, Point to) {
  Route r;
  if (std::abs(from.x - to.x) < kTol) {
    r.waypoints.push_back(to);
    return r;
  }
  // Leave the furrow to the headland, run the headland, then enter.
  if (from.y > kTol) r.waypoints.push_back({from.x, 0.0});
  r.waypoints.push_back({to.x, 0.0});
  if (to.y > kTol) r.waypoints.push_back(to);
  return r;
}

double picker_speed(const PickerState& s) {
  switch (s.mode) {
    case PickerMode::Pick: return s.draw.pick_speed;
    case PickerMode::WalkHeadland:
    case PickerMode::WalkFurrow:
    case PickerMode::WalkPartlyFullHeadland:
    case PickerMode::WalkPartlyFullFurrow:
    case PickerMode::TransportFullFurrow:
    case PickerMode::TransportFullHeadland:
    case PickerMode::EmptyTrayBackHeadland:
    case PickerMode::EmptyTrayBackFurrow: return s.draw.walk_speed;
    default: return 0.0;
  }
}

bool tray_is_full(const PickerState& s, const SimConfig& cfg) {
  return s.tray_mass >= cfg.tray_capacity * (1.0 - 1e-9);
}

PickerState step_picker(PickerState s, const SimConfig& cfg) {
  const double dt = cfg.timestep;
  s.elapsed += dt;
  if (s.mode == PickerMode::Pick) {
    if (!tray_is_full(s, cfg)) {
      const double rate = cfg.tray_capacity / s.draw.pick_time;  // p-hat
      s.tray_mass = std::min(cfg.tray_capacity, s.tray_mass + dt * rate);
      if (tray_is_full(s, cfg)) s.tray_mass = cfg.tray_capacity;
    }
  }
  const double v = picker_speed(s);
  if (v > 0.0) advance(s.position, s.heading, s.route, dt, [v](Point, Point) { return v; });
  return s;
}

RobotState step_robot(RobotState s, const SimConfig& cfg) {
  s.elapsed += cfg.timestep;
  switch (s.mode) {
    case RobotMode::TravelToPicker:
    case RobotMode::DriveToFullTray:
    case RobotMode::EmptyTrayBack:
    case RobotMode::TransportFullTray: {
      const SpeedProfile prof = cfg.speed_profile;
      advance(s.position, s.heading, s.route, cfg.timestep, [prof](Point a, Point b) {
        return on_headland_segment(a, b) ? prof.headland_speed : prof.furrow_speed;
      });
      break;
    }
    default: break;
  }
  return s;
}

PickerState transition_picker(PickerState s, PickerEvent e, FsmVariant variant) {
  const bool ext = variant == FsmVariant::Extended;
  std::optional<PickerMode> to;
  using M = PickerMode;
  using E = PickerEvent;
  switch (s.mode) {
    case M::Start:
      if (e == E::Begin) to = M::WalkHeadland;
      break;
    case M::WalkHeadland:
      if (e == E::ReachedFurrow) to = M::WalkFurrow;
      break;
    case M::WalkFurrow:
      if (e == E::ReachedSplitline) to = M::Pick;
      break;
    case M::Pick:
      if (e == E::TrayFull) {
        if (s.reject_flag && !ext) break;
        to = s.reject_flag ? M::TransportFullFurrow : M::WaitForRobot;
      } else if (e == E::FurrowEnd) {
        to = (ext && s.tray_mass > 0.0) ? M::WalkPartlyFullHeadland : M::WalkHeadland;
      } else if (e == E::FieldDone) {
        to = M::Stop;
      }
      break;
    case M::WaitForRobot:
      if (e == E::RobotArrived) to = M::ExchangeTrays;
      break;
    case M::ExchangeTrays:
      if (e == E::ExchangeDone) to = M::Pick;
      break;
    case M::WalkPartlyFullHeadland:
      if (ext && e == E::ReachedFurrow) to = M::WalkPartlyFullFurrow;
      break;
    case M::WalkPartlyFullFurrow:
      if (ext && e == E::ReachedSplitline) to = M::Pick;
      break;
    case M::TransportFullFurrow:
      if (ext && e == E::ReachedHeadland) to = M::TransportFullHeadland;
      break;
    case M::TransportFullHeadland:
      if (ext && e == E::ReachedStation) to = M::IdleInQueue;
      break;
    case M::IdleInQueue:
      if (ext && e == E::Delivered) to = M::EmptyTrayBackHeadland;
      break;
    case M::EmptyTrayBackHeadland:
      if (ext && e == E::ReachedFurrow) to = M::EmptyTrayBackFurrow;
      break;
    case M::EmptyTrayBackFurrow:
      if (ext && e == E::Resumed) to = M::Pick;
      break;
    case M::Stop: break;
  }
  if (!to || (!ext && static_cast<int>(*to) > static_cast<int>(M::ExchangeTrays) && *to != M::Stop)) {
    illegal("picker", mode_name(s.mode, variant), event_name(e));
  }
  s.mode = *to;
  s.elapsed = 0.0;
  return s;
}

RobotState transition_robot(RobotState s, RobotEvent e, FsmVariant variant) {
  const bool ext = variant == FsmVariant::Extended;
  std::optional<RobotMode> to;
  using M = RobotMode;
  using E = RobotEvent;
  switch (s.mode) {
    case M::Start:
      if (e == E::Ready) to = M::Available;
      break;
    case M::Available:
      if (e == E::Dispatch) to = M::TravelToPicker;
      else if (e == E::FieldDone) to = M::Stop;
      break;
    case M::TravelToPicker:
      if (e == E::ArrivedAtTarget) to = M::WaitAtPicker;
      else if (ext && e == E::PickerLeftFurrow) to = M::EmptyTrayBack;
      break;
    case M::WaitAtPicker:
      if (e == E::TrayFull) to = ext ? M::DriveToFullTray : M::ExchangeTrays;
      else if (ext && e == E::PickerLeftFurrow) to = M::EmptyTrayBack;
      break;
    case M::DriveToFullTray:
      if (ext && e == E::ReachedPicker) to = M::ExchangeTrays;
      break;
    case M::EmptyTrayBack:
      if (ext && e == E::ReachedStation) to = M::Available;
      break;
    case M::ExchangeTrays:
      if (e == E::ExchangeDone) to = M::TransportFullTray;
      break;
    case M::TransportFullTray:
      if (e == E::ReachedStation) to = M::IdleInQueue;
      break;
    case M::IdleInQueue:
      if (e == E::Unloaded) to = M::Available;
      break;
    case M::Stop: break;
  }
  if (!to) illegal("robot", mode_name(s.mode, variant), event_name(e));
  s.mode = *to;
  s.elapsed = 0.0;
  switch (s.mode) {
    case M::Available: s.carried = CarriedTray::Empty; s.availability_delay = 0.0; break;
    case M::TransportFullTray: s.carried = CarriedTray::Full; break;
    case M::Stop: s.carried = CarriedTray::None; break;
    default: break;
  }
  return s;
}

}  // namespace harvest
