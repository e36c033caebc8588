#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "harvest/agents.hpp"
#include "harvest/error.hpp"
#include "harvest/random.hpp"

using namespace harvest;

namespace {

PickerState picking(double pick_speed, double pick_time) {
  PickerState p;
  p.mode = PickerMode::Pick;
  p.position = {10.0, 30.0};
  p.draw = {pick_speed, 0.8, pick_time};
  p.route = manhattan_route(p.position, {10.0, 0.0});
  return p;
}

}  // namespace

TEST_CASE("picking moves toward the headland at the pick speed") {
  SimConfig cfg;
  PickerState p = picking(0.04, 500.0);
  const PickerState next = step_picker(p, cfg);
  CHECK(next.position.y == doctest::Approx(30.0 - 0.02));
  CHECK(next.position.x == doctest::Approx(10.0));
  CHECK(next.heading == doctest::Approx(-std::numbers::pi / 2));
  CHECK(next.elapsed == doctest::Approx(0.5));
}

TEST_CASE("picking adds capacity over pick time per second") {
  SimConfig cfg;
  PickerState p = picking(0.04, 500.0);  // 5000 g / 500 s = 10 g/s
  p.tray_mass = 100.0;
  CHECK(step_picker(p, cfg).tray_mass == doctest::Approx(105.0));
}

TEST_CASE("tray mass saturates at capacity") {
  SimConfig cfg;
  PickerState p = picking(0.04, 500.0);
  p.tray_mass = 4998.0;
  const PickerState next = step_picker(p, cfg);
  CHECK(next.tray_mass == cfg.tray_capacity);
  CHECK(tray_is_full(next, cfg));
  CHECK(step_picker(next, cfg).tray_mass == cfg.tray_capacity);
}

TEST_CASE("tray mass never exceeds capacity over a long pick") {
  SimConfig cfg;
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> pt(150.0, 400.0);
  for (int trial = 0; trial < 50; ++trial) {
    PickerState p = picking(0.01, pt(gen));
    for (int k = 0; k < 1000; ++k) {
      p = step_picker(p, cfg);
      REQUIRE(p.tray_mass >= 0.0);
      REQUIRE(p.tray_mass <= cfg.tray_capacity);
    }
  }
}

TEST_CASE("a waiting picker neither moves nor picks") {
  SimConfig cfg;
  PickerState p = picking(0.04, 500.0);
  p.mode = PickerMode::WaitForRobot;
  p.tray_mass = 5000.0;
  const PickerState next = step_picker(p, cfg);
  CHECK(next.position == p.position);
  CHECK(next.tray_mass == p.tray_mass);
  CHECK(next.elapsed == doctest::Approx(p.elapsed + 0.5));

  p.mode = PickerMode::ExchangeTrays;
  CHECK(step_picker(p, cfg).position == p.position);
}

TEST_CASE("robot travel advances by speed times step and turns corners") {
  SimConfig cfg;
  cfg.speed_profile = SpeedProfile::uniform(1.5);
  RobotState r;
  r.mode = RobotMode::TravelToPicker;
  r.position = {0.0, 0.0};
  r.route = manhattan_route(r.position, {10.0, 20.0});
  RobotState next = step_robot(r, cfg);
  CHECK(next.position.x == doctest::Approx(0.75));
  CHECK(next.position.y == doctest::Approx(0.0));

  // Leftover time past a corner carries into the furrow leg.
  r.position = {9.5, 0.0};
  r.route = manhattan_route(r.position, {10.0, 20.0});
  next = step_robot(r, cfg);
  CHECK(next.position.x == doctest::Approx(10.0));
  CHECK(next.position.y == doctest::Approx(0.25));
}

TEST_CASE("robot uses the headland and furrow speeds on their legs") {
  SimConfig cfg;
  cfg.speed_profile = {0.4, 1.2};
  RobotState r;
  r.mode = RobotMode::TransportFullTray;
  r.position = {10.0, 5.0};
  r.route = manhattan_route(r.position, {0.0, 0.0});
  CHECK(step_robot(r, cfg).position.y == doctest::Approx(5.0 - 0.6));
  r.position = {10.0, 0.0};
  r.route = manhattan_route(r.position, {0.0, 0.0});
  CHECK(step_robot(r, cfg).position.x == doctest::Approx(10.0 - 0.2));
}

TEST_CASE("stationary robot modes only age") {
  SimConfig cfg;
  RobotState r;
  r.mode = RobotMode::Available;
  r.position = {3.0, 0.0};
  const RobotState next = step_robot(r, cfg);
  CHECK(next.position == r.position);
  CHECK(next.elapsed == doctest::Approx(0.5));
}

TEST_CASE("a robot sent back turns around toward the station") {
  SimConfig cfg;
  cfg.speed_profile = {0.4, 1.2};
  RobotState r;
  r.mode = RobotMode::TravelToPicker;
  r.position = {10.0, 6.0};
  r.heading = std::numbers::pi / 2;
  r = transition_robot(r, RobotEvent::PickerLeftFurrow, FsmVariant::Extended);
  CHECK(r.mode == RobotMode::EmptyTrayBack);
  r.route = manhattan_route(r.position, {0.0, 0.0});
  r = step_robot(r, cfg);
  CHECK(r.heading == doctest::Approx(-std::numbers::pi / 2));
  CHECK(r.position.y < 6.0);
}

TEST_CASE("picker transitions follow the edge table") {
  PickerState p;
  p.mode = PickerMode::Pick;
  p.served_flag = true;
  CHECK(transition_picker(p, PickerEvent::TrayFull, FsmVariant::Simple).mode == PickerMode::WaitForRobot);

  p.served_flag = false;
  p.reject_flag = true;
  CHECK(transition_picker(p, PickerEvent::TrayFull, FsmVariant::Extended).mode == PickerMode::TransportFullFurrow);
  CHECK_THROWS_AS(transition_picker(p, PickerEvent::TrayFull, FsmVariant::Simple), SimulationFault);

  p = PickerState{};
  p.mode = PickerMode::WaitForRobot;
  p.elapsed = 12.0;
  const PickerState q = transition_picker(p, PickerEvent::RobotArrived, FsmVariant::Simple);
  CHECK(q.mode == PickerMode::ExchangeTrays);
  CHECK(q.elapsed == 0.0);

  p.mode = PickerMode::Pick;
  p.tray_mass = 1200.0;
  CHECK(transition_picker(p, PickerEvent::FurrowEnd, FsmVariant::Extended).mode == PickerMode::WalkPartlyFullHeadland);
  CHECK(transition_picker(p, PickerEvent::FurrowEnd, FsmVariant::Simple).mode == PickerMode::WalkHeadland);

  p.mode = PickerMode::Stop;
  CHECK_THROWS_AS(transition_picker(p, PickerEvent::Begin, FsmVariant::Simple), SimulationFault);
}

TEST_CASE("robot transitions follow the edge table") {
  RobotState r;
  r.mode = RobotMode::Available;
  RobotState t = transition_robot(r, RobotEvent::Dispatch, FsmVariant::Simple);
  CHECK(t.mode == RobotMode::TravelToPicker);
  CHECK(mode_name(t.mode, FsmVariant::Simple) == "TRAVEL_TO_PICKER");
  t = transition_robot(r, RobotEvent::Dispatch, FsmVariant::Extended);
  CHECK(mode_name(t.mode, FsmVariant::Extended) == "Transp-Empty-Tray-to-Dispatch-Location");

  r.mode = RobotMode::WaitAtPicker;
  CHECK(transition_robot(r, RobotEvent::PickerLeftFurrow, FsmVariant::Extended).mode == RobotMode::EmptyTrayBack);
  CHECK_THROWS_AS(transition_robot(r, RobotEvent::PickerLeftFurrow, FsmVariant::Simple), SimulationFault);
  CHECK(transition_robot(r, RobotEvent::TrayFull, FsmVariant::Simple).mode == RobotMode::ExchangeTrays);
  CHECK(transition_robot(r, RobotEvent::TrayFull, FsmVariant::Extended).mode == RobotMode::DriveToFullTray);

  r.mode = RobotMode::TransportFullTray;
  CHECK(transition_robot(r, RobotEvent::ReachedStation, FsmVariant::Simple).mode == RobotMode::IdleInQueue);

  r.mode = RobotMode::IdleInQueue;
  r.availability_delay = 4.0;
  const RobotState a = transition_robot(r, RobotEvent::Unloaded, FsmVariant::Simple);
  CHECK(a.mode == RobotMode::Available);
  CHECK(a.availability_delay == 0.0);
  CHECK(a.carried == CarriedTray::Empty);

  r.mode = RobotMode::Available;
  CHECK_THROWS_AS(transition_robot(r, RobotEvent::Unloaded, FsmVariant::Simple), SimulationFault);
}

TEST_CASE("histogram sampling") {
  Rng rng(1);
  CHECK(sample_histogram(Histogram::point(2.0), rng) == 2.0);
  CHECK(sample_histogram({{2.0, 2.0}, {1.0}}, rng) == 2.0);

  const Histogram two{{0.0, 1.0, 2.0}, {0.3, 0.7}};
  constexpr int kDraws = 100000;
  int low = 0;
  for (int i = 0; i < kDraws; ++i) {
    const double x = sample_histogram(two, rng);
    REQUIRE(x >= 0.0);
    REQUIRE(x < 2.0);
    if (x < 1.0) ++low;
  }
  CHECK(std::abs(static_cast<double>(low) / kDraws - 0.3) <= 0.01);
}

TEST_CASE("tray parameter draws repeat for a fixed seed") {
  ParamDistributions d;
  d.pick_speed = {{0.05, 0.1}, {1.0}};
  d.walk_speed = {{0.6, 1.0}, {1.0}};
  d.pick_time = {{150.0, 250.0, 400.0}, {0.5, 0.5}};
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const TrayDraw x = sample_tray_params(d, a);
    const TrayDraw y = sample_tray_params(d, b);
    CHECK(x.pick_speed == y.pick_speed);
    CHECK(x.walk_speed == y.walk_speed);
    CHECK(x.pick_time == y.pick_time);
  }
}

TEST_CASE("histogram validation and mean") {
  CHECK_THROWS_AS(Histogram{}.validate("pick_time"), ConfigError);
  CHECK_THROWS_AS((Histogram{{0.0, 1.0}, {-1.0}}.validate("pick_time")), ConfigError);
  CHECK_THROWS_AS((Histogram{{0.0, 1.0, 2.0}, {1.0}}.validate("pick_time")), ConfigError);
  CHECK_THROWS_AS((Histogram{{1.0, 0.0}, {1.0}}.validate("pick_time")), ConfigError);
  const Histogram synth{{150, 200, 250, 300, 350, 400}, {0.1, 0.2, 0.395, 0.2, 0.105}};
  CHECK(synth.mean() == doctest::Approx(275.5));
}

TEST_CASE("routes leave the furrow before crossing the headland") {
  const Route r = manhattan_route({2.0, 10.0}, {8.0, 4.0});
  REQUIRE(r.waypoints.size() == 3);
  CHECK(r.waypoints[0] == Point{2.0, 0.0});
  CHECK(r.waypoints[1] == Point{8.0, 0.0});
  CHECK(r.waypoints[2] == Point{8.0, 4.0});
  CHECK(manhattan_route({2.0, 10.0}, {2.0, 3.0}).waypoints.size() == 1);
}
