#include "harvest/request.hpp"

#include <algorithm>
#include <cmath>

#include "harvest/error.hpp"

namespace harvest {

void UncertaintyParams::validate() const {
  if (bias_fraction < 0.0) throw ConfigError("uncertainty.bias_fraction must be >= 0");
  if (pred_sd < 0.0) throw ConfigError("uncertainty.pred_sd must be >= 0");
  if (loc_noise_halfwidth < 0.0) throw ConfigError("uncertainty.loc_noise_halfwidth must be >= 0");
  if (!(regression_window > 0.0)) throw ConfigError("uncertainty.regression_window must be > 0");
  if (!(sample_period > 0.0)) throw ConfigError("uncertainty.sample_period must be > 0");
}

double remaining_fill_time(const PickerState& picker, const SimConfig& cfg) {
  const double missing = cfg.tray_capacity - picker.tray_mass;
  if (tray_is_full(picker, cfg) || missing <= 0.0) return 0.0;
  const double per_step = cfg.timestep * cfg.tray_capacity / picker.draw.pick_time;
  const double steps = std::ceil(missing / per_step - 1e-9);
  return std::max(0.0, steps) * cfg.timestep;
}

std::optional<DeterministicRequest> make_perfect_request(const PickerState& picker, double fr_request,
                                                         const SimConfig& cfg, double now, int id) {
  if (picker.mode != PickerMode::Pick) return std::nullopt;
  if (picker.tray_mass < fr_request * cfg.tray_capacity * (1.0 - 1e-12)) return std::nullopt;
  const double fill = remaining_fill_time(picker, cfg);
  const double y_full = picker.position.y - picker.draw.pick_speed * fill;
  if (y_full < -1e-9) return std::nullopt;
  DeterministicRequest r;
  r.id = id;
  r.picker_id = picker.id;
  r.created_at = now;
  r.remaining_fill = fill;
  r.full_location = {picker.position.x, std::max(0.0, y_full)};
  return r;
}

double draw_fill_bias(const UncertaintyParams& u, double mean_pick_time, Rng& rng) {
  const double half = u.bias_fraction * mean_pick_time;
  const double v = rng.uniform(-half, half);
  return half == 0.0 ? 0.0 : v;
}

StochasticRequest make_stochastic_request(const DeterministicRequest& truth, Point current_location, double bias,
                                          Gaussian speed, const UncertaintyParams& u) {
  StochasticRequest s;
  s.id = truth.id;
  s.picker_id = truth.picker_id;
  s.created_at = truth.created_at;
  s.fill_time = {std::max(0.0, truth.remaining_fill + bias), u.pred_sd};
  s.speed = speed;
  s.current_location = current_location;
  return s;
}

Gaussian estimate_speed_regression(std::span<const std::pair<double, double>> samples) {
  const auto n = samples.size();
  if (n < 3) throw InsufficientData("speed regression needs at least 3 samples");
  double tm = 0.0;
  double ym = 0.0;
  for (const auto& [t, y] : samples) {
    tm += t;
    ym += y;
  }
  tm /= static_cast<double>(n);
  ym /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [t, y] : samples) {
    sxx += (t - tm) * (t - tm);
    sxy += (t - tm) * (y - ym);
  }
  if (!(sxx > 0.0)) throw InsufficientData("speed regression needs distinct sample times");
  const double slope = sxy / sxx;
  const double icept = ym - slope * tm;
  double sse = 0.0;
  for (const auto& [t, y] : samples) {
    const double r = y - (icept + slope * t);
    sse += r * r;
  }
  return {slope, std::sqrt(sse / (static_cast<double>(n - 2) * sxx))};
}

double fr_threshold(const SpeedProfile& profile, const FieldMap& field, double mean_pick_time) {
  if (!(mean_pick_time > 0.0)) throw ConfigError("mean pick time must be > 0");
  profile.validate();
  const double fr = 1.0 - max_one_way_time(field, profile) / mean_pick_time;
  return std::clamp(fr, 0.0, 1.0);
}

}  // namespace harvest
