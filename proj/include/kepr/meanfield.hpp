#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kepr/ensemble.hpp"
#include "kepr/errors.hpp"

namespace kepr {

struct SimConfig {
  double coupling = 1.0;
  double dt = 0.01;
  double t_end = 10.0;
  /// Record every `snapshot_stride` steps (the final step is always recorded).
  std::size_t snapshot_stride = 1;
  bool record_phases = false;

  /// Throws InvalidArgument unless dt <= t_end and
  /// dt * max(max_i |omega_i|, K) <= 0.1.
  void validate(const OscillatorEnsemble& ensemble) const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> r_series;
  std::vector<Phase> phi_series;
  /// (1/N) sum_i theta_i with theta_i never wrapped.
  std::vector<double> mean_unwrapped_phase;
  std::optional<std::vector<std::vector<Phase>>> phase_snapshots;

  std::size_t size() const { return times.size(); }
};

struct TimeWindow {
  double t_begin = 0.0;
  double t_end = 0.0;
};

struct GrowthFitOptions {
  /// r must stay strictly above this level on the window.
  double floor = 0.0;
  /// r must stay strictly below this level (upper edge of the linear regime).
  double ceiling = 0.1;
  /// max(r) / min(r) on the window must reach this ratio; a flat r never
  /// left its floor.
  double min_dynamic_range = 2.0;
};

/// Thrown when a growth-rate fit window is outside the linear regime.
class GrowthFitRejected : public NumericalError {
 public:
  explicit GrowthFitRejected(const std::string& what) : NumericalError(what) {}
};

/// v_i = omega_i + K r sin(phi - theta_i).
std::vector<double> drift_velocity(const OscillatorEnsemble& ensemble, const OrderParameter& op,
                                   double coupling);

/// One classical RK4 step of d theta_i / dt = v_i with the mean field
/// recomputed at every stage. The returned phases are wrapped. Negative dt
/// integrates backwards.
OscillatorEnsemble step_rk4(const OscillatorEnsemble& ensemble, double coupling, double dt);

/// In-place RK4 step on unwrapped angles. `scratch` is resized as needed.
void step_rk4_unwrapped(std::span<double> angles, std::span<const double> frequencies,
                        double coupling, double dt, std::vector<double>& scratch);

Trajectory simulate(const OscillatorEnsemble& ensemble, const SimConfig& config);

/// Least-squares slope of ln r(t) over the samples inside `window`.
double fit_growth_rate(const Trajectory& traj, const TimeWindow& window,
                       const GrowthFitOptions& options = {});

/// Window from the first sample up to the last sample before r first reaches
/// `ceiling`. Returns nullopt if fewer than three samples qualify.
std::optional<TimeWindow> linear_regime_window(const Trajectory& traj, double ceiling = 0.1);

/// Least-squares slope of the mean unwrapped phase against time.
double mean_phase_slope(const Trajectory& traj);

}  // namespace kepr
