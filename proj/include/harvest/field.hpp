#pragma once

#include <span>
#include <vector>

namespace harvest {

/// Field frame: x runs across furrows, y along them with y = 0 on the headland.
struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Robot (or walker) speeds on the headland and inside furrows, m/s.
struct SpeedProfile {
  double headland_speed = 1.5;
  double furrow_speed = 1.5;

  static SpeedProfile uniform(double v) { return {v, v}; }
  void validate() const;
};

enum class FurrowStatus { Unharvested, Occupied, Harvested };

/// Geometry of one half of a split harvesting block. Furrow i runs along
/// x = (i + 0.5) * bed_spacing from the headland (y = 0) to the split line.
class FieldMap {
 public:
  FieldMap(int furrow_count, double furrow_length, double bed_spacing, double split_line_y,
           std::vector<Point> stations, int active_station = 0);

  int furrow_count() const noexcept { return furrow_count_; }
  double furrow_length() const noexcept { return furrow_length_; }
  double bed_spacing() const noexcept { return bed_spacing_; }
  double split_line_y() const noexcept { return split_line_y_; }
  double width() const noexcept { return furrow_count_ * bed_spacing_; }
  std::span<const Point> stations() const noexcept { return stations_; }
  int active_station_index() const noexcept { return active_station_; }
  Point active_station_position() const { return stations_[static_cast<std::size_t>(active_station_)]; }
  void set_active_station(int index);

  double furrow_x(int furrow) const;
  bool contains(Point p) const noexcept;

  /// Stations spread evenly: station k sits at the centre of the k-th of
  /// `count` equal x-cells of the field.
  static std::vector<Point> evenly_spaced_stations(int furrow_count, double bed_spacing, int count);

 private:
  int furrow_count_;
  double furrow_length_;
  double bed_spacing_;
  double split_line_y_;
  std::vector<Point> stations_;
  int active_station_;
};

/// Segment lengths of the headland-then-furrow path between a headland point
/// and an in-field point.
struct PathLegs {
  double headland = 0.0;
  double furrow = 0.0;
  double total() const noexcept { return headland + furrow; }
};

PathLegs path_legs(Point headland_point, Point field_point, const FieldMap& field);

/// |a.x - b.x| + b.y; throws ConfigError when either point is outside the field.
double manhattan_distance(Point headland_point, Point field_point, const FieldMap& field);

double one_way_travel_time(double d_headland, double d_furrow, const SpeedProfile& profile);

double one_way_travel_time(Point headland_point, Point field_point, const FieldMap& field,
                           const SpeedProfile& profile);

/// Nearest unharvested furrow to `from_furrow` by x distance, ties to the
/// lower index. Throws FieldExhausted when none remain.
int next_furrow(int from_furrow, std::span<const FurrowStatus> status, const FieldMap& field);

/// Station closest to the x centroid of the crew, ties to the lower index.
int active_station(const FieldMap& field, std::span<const Point> crew_positions);

/// Largest one-way travel time from the station serving a point (its nearest
/// station) to any point of the field.
double max_one_way_time(const FieldMap& field, const SpeedProfile& profile);

}  // namespace harvest
