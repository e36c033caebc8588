#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "doctest.h"
#include "harvest/error.hpp"
#include "harvest/request.hpp"
#include "oracles.hpp"

using namespace harvest;

namespace {

PickerState picker_at(double y, double mass, double pick_speed = 0.1, double pick_time = 250.0) {
  PickerState p;
  p.id = 3;
  p.mode = PickerMode::Pick;
  p.position = {5.0, y};
  p.tray_mass = mass;
  p.draw = {pick_speed, 0.8, pick_time};
  return p;
}

FieldMap block() {
  return FieldMap(100, 100.0, 1.65, 50.0, FieldMap::evenly_spaced_stations(100, 1.65, 4));
}

}  // namespace

TEST_CASE("a full tray gives a request with nothing left to fill") {
  SimConfig cfg;
  const auto r = make_perfect_request(picker_at(20.0, 5000.0), 1.0, cfg, 100.0, 7);
  REQUIRE(r);
  CHECK(r->remaining_fill == 0.0);
  CHECK(r->created_at == 100.0);
  CHECK(r->id == 7);
  CHECK(r->picker_id == 3);
  CHECK(r->full_location == Point{5.0, 20.0});
  CHECK_FALSE(make_perfect_request(picker_at(20.0, 4990.0), 1.0, cfg, 100.0, 7));
}

TEST_CASE("no request when the tray would fill beyond the end of the furrow") {
  SimConfig cfg;
  // 250 s of picking left at 0.04 m/s is 10 m, but only 2 m of furrow remain.
  CHECK_FALSE(make_perfect_request(picker_at(2.0, 0.0, 0.04, 250.0), 0.0, cfg, 0.0, 1));
  CHECK(make_perfect_request(picker_at(12.0, 0.0, 0.04, 250.0), 0.0, cfg, 0.0, 1));
}

TEST_CASE("a request at an empty tray waits a whole pick time") {
  SimConfig cfg;
  const auto r = make_perfect_request(picker_at(40.0, 0.0, 0.1, 250.0), 0.0, cfg, 0.0, 1);
  REQUIRE(r);
  CHECK(r->remaining_fill == doctest::Approx(250.0));
  CHECK(r->full_location.y == doctest::Approx(40.0 - 25.0));
}

TEST_CASE("only a picking picker past the fill ratio raises a request") {
  SimConfig cfg;
  CHECK_FALSE(make_perfect_request(picker_at(40.0, 3400.0), 0.7, cfg, 0.0, 1));
  CHECK(make_perfect_request(picker_at(40.0, 3500.0), 0.7, cfg, 0.0, 1));
  PickerState w = picker_at(40.0, 5000.0);
  w.mode = PickerMode::WaitForRobot;
  CHECK_FALSE(make_perfect_request(w, 1.0, cfg, 0.0, 1));
}

TEST_CASE("remaining fill counts whole steps") {
  SimConfig cfg;  // 0.5 s steps, 5000 g
  // 20 g/s, 10 g per step; 4995 g needs one more step.
  CHECK(remaining_fill_time(picker_at(40.0, 4995.0, 0.1, 250.0), cfg) == doctest::Approx(0.5));
  CHECK(remaining_fill_time(picker_at(40.0, 4990.0, 0.1, 250.0), cfg) == doctest::Approx(0.5));
  CHECK(remaining_fill_time(picker_at(40.0, 4980.0, 0.1, 250.0), cfg) == doctest::Approx(1.0));
}

TEST_CASE("zero uncertainty leaves the ground truth untouched") {
  UncertaintyParams u;
  CHECK(u.degenerate());
  Rng rng(9);
  const double bias = draw_fill_bias(u, 275.5, rng);
  CHECK(bias == 0.0);
  DeterministicRequest truth{4, 2, 60.0, 83.5, {3.0, 17.0}};
  const auto s = make_stochastic_request(truth, {3.0, 25.0}, bias, {0.09, 0.0}, u);
  CHECK(s.id == 4);
  CHECK(s.picker_id == 2);
  CHECK(s.created_at == 60.0);
  CHECK(s.fill_time.mean == 83.5);
  CHECK(s.fill_time.sd == 0.0);
  CHECK(s.speed.sd == 0.0);
  CHECK(s.current_location == Point{3.0, 25.0});
}

TEST_CASE("fill bias stays within its fraction of the mean pick time") {
  UncertaintyParams u;
  u.bias_fraction = 0.1;
  Rng rng(5);
  double lo = 0.0, hi = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double b = draw_fill_bias(u, 275.5, rng);
    REQUIRE(std::abs(b) <= 27.55);
    lo = std::min(lo, b);
    hi = std::max(hi, b);
  }
  CHECK(lo < -27.0);
  CHECK(hi > 27.0);
}

TEST_CASE("prediction sd is carried and the mean is floored at zero") {
  UncertaintyParams u;
  u.pred_sd = 30.0;
  DeterministicRequest truth{1, 0, 0.0, 10.0, {1.0, 1.0}};
  auto s = make_stochastic_request(truth, {1.0, 2.0}, 5.0, {0.1, 0.0}, u);
  CHECK(s.fill_time.sd == 30.0);
  CHECK(s.fill_time.mean == doctest::Approx(15.0));
  s = make_stochastic_request(truth, {1.0, 2.0}, -25.0, {0.1, 0.0}, u);
  CHECK(s.fill_time.mean == 0.0);
}

TEST_CASE("speed regression by least squares") {
  const std::vector<std::pair<double, double>> line{{0, 0}, {1, 1}, {2, 2}};
  const Gaussian g = estimate_speed_regression(line);
  CHECK(g.mean == doctest::Approx(1.0));
  CHECK(g.sd == doctest::Approx(0.0));

  const std::vector<std::pair<double, double>> four{{0, 0}, {1, 0}, {2, 2}, {3, 2}};
  const Gaussian h = estimate_speed_regression(four);
  CHECK(h.mean == doctest::Approx(0.8));
  CHECK(h.sd == doctest::Approx(std::sqrt(0.08)));

  const std::vector<std::pair<double, double>> same_t{{1, 0}, {1, 1}, {1, 2}};
  CHECK_THROWS_AS(estimate_speed_regression(same_t), InsufficientData);
  const std::vector<std::pair<double, double>> two{{0, 0}, {1, 1}};
  CHECK_THROWS_AS(estimate_speed_regression(two), InsufficientData);
}

TEST_CASE("speed regression matches the textbook formulas on noisy tracks") {
  std::mt19937_64 gen(21);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<double, double>> pts;
    for (int k = 0; k < 3 + trial % 60; ++k) pts.emplace_back(k, 30.0 - 0.08 * k + noise(gen));
    const Gaussian g = estimate_speed_regression(pts);
    const oracle::Ols o = oracle::ols(pts);
    CHECK(g.mean == doctest::Approx(o.slope).epsilon(1e-9));
    CHECK(g.sd == doctest::Approx(o.se).epsilon(1e-9));
  }
}

TEST_CASE("fill ratio threshold for the block at several robot speeds") {
  const FieldMap f = block();
  constexpr double kMeanPick = 275.5;
  constexpr double kPrinted = 0.01;  // thresholds are reported to two decimals
  CHECK(std::abs(fr_threshold(SpeedProfile::uniform(1.5), f, kMeanPick) - 0.83) <= kPrinted);
  CHECK(std::abs(fr_threshold(SpeedProfile::uniform(1.0), f, kMeanPick) - 0.74) <= kPrinted);
  CHECK(std::abs(fr_threshold(SpeedProfile::uniform(2.0), f, kMeanPick) - 0.87) <= kPrinted);
  CHECK(fr_threshold(SpeedProfile::uniform(1.5), f, kMeanPick) == doctest::Approx(1.0 - 70.625 / 1.5 / 275.5));
}

TEST_CASE("fill ratio threshold is monotone in speed and pick time and clamped") {
  const FieldMap f = block();
  double prev = -1.0;
  for (double v = 0.1; v < 5.0; v += 0.1) {
    const double t = fr_threshold(SpeedProfile::uniform(v), f, 275.5);
    CHECK(t >= prev);
    CHECK(t >= 0.0);
    CHECK(t <= 1.0);
    prev = t;
  }
  prev = -1.0;
  for (double pick = 50.0; pick < 1000.0; pick += 25.0) {
    const double t = fr_threshold(SpeedProfile{0.4, 1.2}, f, pick);
    CHECK(t >= prev);
    prev = t;
  }
  CHECK(fr_threshold(SpeedProfile::uniform(0.05), f, 275.5) == 0.0);
  CHECK_THROWS_AS(fr_threshold(SpeedProfile::uniform(1.0), f, 0.0), ConfigError);
}
