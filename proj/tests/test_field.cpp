#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "harvest/error.hpp"
#include "harvest/field.hpp"

using namespace harvest;

namespace {

FieldMap wide_field() { return FieldMap(40, 100.0, 1.65, 50.0, {{50.0, 0.0}}); }

FieldMap block() {
  return FieldMap(100, 100.0, 1.65, 50.0, FieldMap::evenly_spaced_stations(100, 1.65, 4));
}

}  // namespace

TEST_CASE("manhattan distance goes along the headland then up the furrow") {
  const FieldMap f = wide_field();
  CHECK(manhattan_distance({50.0, 0.0}, {20.0, 30.0}, f) == doctest::Approx(60.0));
  CHECK(manhattan_distance({0.0, 0.0}, {0.0, 0.0}, f) == 0.0);
  const auto legs = path_legs({50.0, 0.0}, {20.0, 30.0}, f);
  CHECK(legs.headland == doctest::Approx(30.0));
  CHECK(legs.furrow == doctest::Approx(30.0));
}

TEST_CASE("farthest corner from its nearest station on the full block is about 71 m") {
  const FieldMap f = block();
  const Point corner{0.0, f.split_line_y()};
  const double d = manhattan_distance(f.stations()[0], corner, f);
  CHECK(d == doctest::Approx(70.625));
  CHECK(std::round(d) == 71.0);
  CHECK(max_one_way_time(f, SpeedProfile::uniform(1.0)) == doctest::Approx(70.625));
}

TEST_CASE("points off the headland or outside the field are rejected") {
  const FieldMap f = wide_field();
  CHECK_THROWS_AS(manhattan_distance({50.0, 3.0}, {20.0, 30.0}, f), ConfigError);
  CHECK_THROWS_AS(manhattan_distance({50.0, 0.0}, {20.0, 60.0}, f), ConfigError);
  CHECK_THROWS_AS(manhattan_distance({-5.0, 0.0}, {20.0, 10.0}, f), ConfigError);
}

TEST_CASE("one-way travel time splits headland and furrow legs") {
  CHECK(one_way_travel_time(30.0, 30.0, SpeedProfile{0.4, 1.2}) == doctest::Approx(100.0));
  CHECK(one_way_travel_time(60.0, 0.0, SpeedProfile::uniform(1.5)) == doctest::Approx(40.0));
  CHECK(one_way_travel_time(0.0, 0.0, SpeedProfile{0.4, 1.2}) == 0.0);
  CHECK_THROWS_AS(one_way_travel_time(1.0, 1.0, SpeedProfile{0.0, 1.0}), ConfigError);
}

TEST_CASE("path length is at least the straight line and uniform speed divides it") {
  const FieldMap f = wide_field();
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> ux(0.0, f.width());
  std::uniform_real_distribution<double> uy(0.0, f.split_line_y());
  std::uniform_real_distribution<double> uv(0.2, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const Point a{ux(gen), 0.0};
    const Point b{ux(gen), uy(gen)};
    const double d = manhattan_distance(a, b, f);
    CHECK(d >= std::hypot(a.x - b.x, a.y - b.y) - 1e-12);
    const double v = uv(gen);
    CHECK(one_way_travel_time(a, b, f, SpeedProfile::uniform(v)) == doctest::Approx(d / v).epsilon(1e-12));
  }
}

TEST_CASE("next furrow picks the nearest unharvested one, ties to the lower index") {
  const FieldMap f(10, 100.0, 1.65, 50.0, {{1.0, 0.0}});
  std::vector<FurrowStatus> st(10, FurrowStatus::Harvested);
  st[4] = FurrowStatus::Unharvested;
  st[7] = FurrowStatus::Unharvested;
  CHECK(next_furrow(3, st, f) == 4);

  std::fill(st.begin(), st.end(), FurrowStatus::Harvested);
  st[2] = FurrowStatus::Unharvested;
  st[6] = FurrowStatus::Unharvested;
  CHECK(next_furrow(4, st, f) == 2);

  std::fill(st.begin(), st.end(), FurrowStatus::Occupied);
  CHECK_THROWS_AS(next_furrow(4, st, f), FieldExhausted);
}

TEST_CASE("next furrow never returns an occupied or harvested furrow") {
  const FieldMap f(30, 100.0, 1.65, 50.0, {{1.0, 0.0}});
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> s(0, 2);
  std::uniform_int_distribution<int> from(0, 29);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<FurrowStatus> st(30);
    bool any = false;
    for (auto& x : st) {
      x = static_cast<FurrowStatus>(s(gen));
      any = any || x == FurrowStatus::Unharvested;
    }
    if (!any) {
      CHECK_THROWS_AS(next_furrow(from(gen), st, f), FieldExhausted);
      continue;
    }
    const int k = next_furrow(from(gen), st, f);
    CHECK(st[static_cast<std::size_t>(k)] == FurrowStatus::Unharvested);
  }
}

TEST_CASE("active station is the one nearest the crew centroid") {
  const FieldMap one(60, 100.0, 1.65, 50.0, {{10.0, 0.0}});
  CHECK(active_station(one, std::vector<Point>{{20.0, 5.0}}) == 0);

  const FieldMap two(60, 100.0, 1.65, 50.0, {{10.0, 0.0}, {90.0, 0.0}});
  CHECK(active_station(two, std::vector<Point>{{15.0, 3.0}, {25.0, 9.0}}) == 0);

  const FieldMap tie(60, 100.0, 1.65, 50.0, {{30.0, 0.0}, {50.0, 0.0}});
  CHECK(active_station(tie, std::vector<Point>{{40.0, 1.0}}) == 0);
}

TEST_CASE("field geometry is validated") {
  CHECK_THROWS_AS(FieldMap(0, 100.0, 1.65, 50.0, {{0.5, 0.0}}), ConfigError);
  CHECK_THROWS_AS(FieldMap(10, 100.0, 1.65, 120.0, {{0.5, 0.0}}), ConfigError);
  CHECK_THROWS_AS(FieldMap(10, 100.0, 1.65, 50.0, {{0.5, 2.0}}), ConfigError);
  CHECK_THROWS_AS(FieldMap(10, 100.0, 1.65, 50.0, {{40.0, 0.0}}), ConfigError);
  CHECK_THROWS_AS(FieldMap(10, 100.0, 1.65, 50.0, {}), ConfigError);
  CHECK_THROWS_AS(FieldMap(10, 100.0, 1.65, 50.0, {{1.0, 0.0}}, 3), ConfigError);
  const FieldMap f(10, 100.0, 2.0, 50.0, {{1.0, 0.0}});
  CHECK(f.furrow_x(0) == doctest::Approx(1.0));
  CHECK(f.furrow_x(9) == doctest::Approx(19.0));
  CHECK(f.width() == doctest::Approx(20.0));
}
