#include "harvest/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "harvest/error.hpp"

namespace harvest {

namespace {
constexpr double kTol = 1e-9;
}

void SpeedProfile::validate() const {
  if (!(headland_speed > 0.0) || !(furrow_speed > 0.0)) {
    throw ConfigError("speed profile: speeds must be strictly positive");
  }
}

FieldMap::FieldMap(int furrow_count, double furrow_length, double bed_spacing, double split_line_y,
                   std::vector<Point> stations, int active_station)
    : furrow_count_(furrow_count),
      furrow_length_(furrow_length),
      bed_spacing_(bed_spacing),
      split_line_y_(split_line_y),
      stations_(std::move(stations)),
      active_station_(active_station) {
  if (furrow_count_ < 1) throw ConfigError("field.furrow_count must be >= 1");
  if (!(furrow_length_ > 0.0)) throw ConfigError("field.furrow_length must be > 0");
  if (!(bed_spacing_ > 0.0)) throw ConfigError("field.bed_spacing must be > 0");
  if (!(split_line_y_ > 0.0) || split_line_y_ > furrow_length_) {
    throw ConfigError("field.split_line_y must lie in (0, furrow_length]");
  }
  if (stations_.empty()) throw ConfigError("field.stations must not be empty");
  for (std::size_t i = 0; i < stations_.size(); ++i) {
    const Point s = stations_[i];
    if (std::abs(s.y) > kTol || s.x < -kTol || s.x > width() + kTol) {
      throw ConfigError("field.stations[" + std::to_string(i) + "] must lie on the headland within the field");
    }
  }
  set_active_station(active_station_);
}

void FieldMap::set_active_station(int index) {
  if (index < 0 || index >= static_cast<int>(stations_.size())) {
    throw ConfigError("field.active_station out of range");
  }
  active_station_ = index;
}

double FieldMap::furrow_x(int furrow) const {
  if (furrow < 0 || furrow >= furrow_count_) throw ConfigError("furrow index out of range");
  return (furrow + 0.5) * bed_spacing_;
}

bool FieldMap::contains(Point p) const noexcept {
  return p.x >= -kTol && p.x <= width() + kTol && p.y >= -kTol && p.y <= split_line_y_ + kTol;
}

std::vector<Point> FieldMap::evenly_spaced_stations(int furrow_count, double bed_spacing, int count) {
  std::vector<Point> out;
  const double cell = furrow_count * bed_spacing / count;
  for (int k = 0; k < count; ++k) out.push_back({(k + 0.5) * cell, 0.0});
  return out;
}

PathLegs path_legs(Point headland_point, Point field_point, const FieldMap& field) {
  if (std::abs(headland_point.y) > kTol || !field.contains(headland_point)) {
    throw ConfigError("path start must be a headland point inside the field");
  }
  if (!field.contains(field_point)) throw ConfigError("path end lies outside the field");
  return {std::abs(headland_point.x - field_point.x), std::max(field_point.y, 0.0)};
}

double manhattan_distance(Point headland_point, Point field_point, const FieldMap& field) {
  return path_legs(headland_point, field_point, field).total();
}

double one_way_travel_time(double d_headland, double d_furrow, const SpeedProfile& profile) {
  profile.validate();
  return d_headland / profile.headland_speed + d_furrow / profile.furrow_speed;
}

double one_way_travel_time(Point headland_point, Point field_point, const FieldMap& field,
                           const SpeedProfile& profile) {
  const PathLegs legs = path_legs(headland_point, field_point, field);
  return one_way_travel_time(legs.headland, legs.furrow, profile);
}

int next_furrow(int from_furrow, std::span<const FurrowStatus> status, const FieldMap& field) {
  const double x0 = field.furrow_x(from_furrow);
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(status.size()); ++i) {
    if (status[static_cast<std::size_t>(i)] != FurrowStatus::Unharvested) continue;
    const double d = std::abs(field.furrow_x(i) - x0);
    if (d < best_d - kTol) {
      best = i;
      best_d = d;
    }
  }
  if (best < 0) throw FieldExhausted();
  return best;
}

int active_station(const FieldMap& field, std::span<const Point> crew_positions) {
  const auto stations = field.stations();
  if (crew_positions.empty()) return field.active_station_index();
  double cx = 0.0;
  for (const Point& p : crew_positions) cx += p.x;
  cx /= static_cast<double>(crew_positions.size());
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(stations.size()); ++i) {
    const double d = std::abs(stations[static_cast<std::size_t>(i)].x - cx);
    if (d < best_d - kTol) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

double max_one_way_time(const FieldMap& field, const SpeedProfile& profile) {
  // The farthest point of a furrow is its split-line end, so only x matters:
  // the worst x is a field edge or a midpoint between adjacent stations.
  std::vector<double> xs(1, 0.0);
  xs.push_back(field.width());
  std::vector<double> sx;
  for (const Point& s : field.stations()) sx.push_back(s.x);
  std::sort(sx.begin(), sx.end());
  for (std::size_t i = 0; i + 1 < sx.size(); ++i) xs.push_back(0.5 * (sx[i] + sx[i + 1]));

  double worst = 0.0;
  for (double x : xs) {
    double nearest = std::numeric_limits<double>::infinity();
    for (double s : sx) nearest = std::min(nearest, std::abs(s - x));
    worst = std::max(worst, one_way_travel_time(nearest, field.split_line_y(), profile));
  }
  return worst;
}

}  // namespace harvest
