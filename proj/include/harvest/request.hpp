#pragma once

#include <optional>
#include <span>
#include <utility>

#include "harvest/agents.hpp"
#include "harvest/field.hpp"
#include "harvest/random.hpp"

namespace harvest {

struct Gaussian {
  double mean = 0.0;
  double sd = 0.0;
};

/// Exact (ground-truth) transport request: the tray fills `remaining_fill`
/// seconds after `created_at`, at `full_location`.
struct DeterministicRequest {
  int id = 0;
  int picker_id = 0;
  double created_at = 0.0;
  double remaining_fill = 0.0;
  Point full_location{};
};

/// Request as seen by the stochastic scheduler. Fill time is measured from
/// `created_at`; `speed` is the along-row speed toward the headland.
struct StochasticRequest {
  int id = 0;
  int picker_id = 0;
  double created_at = 0.0;
  Gaussian fill_time{};
  Gaussian speed{};
  Point current_location{};
};

struct UncertaintyParams {
  double bias_fraction = 0.0;        // p_e
  double pred_sd = 0.0;              // sigma_e, s
  double loc_noise_halfwidth = 0.0;  // l, m
  double regression_window = 60.0;   // s
  double sample_period = 1.0;        // s

  void validate() const;
  bool degenerate() const noexcept {
    return bias_fraction == 0.0 && pred_sd == 0.0 && loc_noise_halfwidth == 0.0;
  }
};

/// Whole timesteps until a picking picker's tray is full, times the step.
double remaining_fill_time(const PickerState& picker, const SimConfig& cfg);

/// Ground-truth request for a picker in Pick once its fill ratio has reached
/// `fr_request`; empty when the ratio is below it or the tray would not fill
/// before the end of the current furrow.
std::optional<DeterministicRequest> make_perfect_request(const PickerState& picker, double fr_request,
                                                         const SimConfig& cfg, double now, int id);

/// Per-tray bias of the fill-time mean, U(-p_e * mean_pick, p_e * mean_pick).
double draw_fill_bias(const UncertaintyParams& u, double mean_pick_time, Rng& rng);

/// Wraps a ground-truth request with the injected uncertainty. The fill mean
/// is truth + bias, floored at zero.
StochasticRequest make_stochastic_request(const DeterministicRequest& truth, Point current_location, double bias,
                                          Gaussian speed, const UncertaintyParams& u);

/// OLS slope of y on t with its standard error. Needs >= 3 samples with
/// non-zero spread in t; throws InsufficientData otherwise.
Gaussian estimate_speed_regression(std::span<const std::pair<double, double>> samples);

/// Highest fill ratio at which a robot can still be dispatched and arrive
/// before the tray fills anywhere in the field, clamped to [0, 1].
double fr_threshold(const SpeedProfile& profile, const FieldMap& field, double mean_pick_time);

}  // namespace harvest
