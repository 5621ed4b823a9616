#include "kepr/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kepr {

namespace {

// deriv_i = omega_i + K (Im Z cos theta_i - Re Z sin theta_i), Z = <e^{i theta}>
void mean_field_derivative(std::span<const double> angles, std::span<const double> frequencies,
                           double coupling, std::span<double> deriv, std::span<double> cos_buf,
                           std::span<double> sin_buf) {
  const std::size_t n = angles.size();
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cos_buf[i] = std::cos(angles[i]);
    sin_buf[i] = std::sin(angles[i]);
    re += cos_buf[i];
    im += sin_buf[i];
  }
  re /= static_cast<double>(n);
  im /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    deriv[i] = frequencies[i] + coupling * (im * cos_buf[i] - re * sin_buf[i]);
  }
}

double slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw NumericalError("degenerate abscissa in least-squares fit");
  return sxy / sxx;
}

}  // namespace

void SimConfig::validate(const OscillatorEnsemble& ensemble) const {
  if (!(coupling >= 0.0) || !std::isfinite(coupling)) throw InvalidArgument("coupling K must be >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be positive");
  if (dt > t_end) throw InvalidArgument("dt must not exceed t_end");
  if (snapshot_stride == 0) throw InvalidArgument("snapshot_stride must be positive");
  double fastest = coupling;
  for (double w : ensemble.frequencies()) fastest = std::max(fastest, std::abs(w));
  if (dt * fastest > 0.1) {
    std::ostringstream msg;
    msg << "stability guard violated: dt * max(|omega|, K) = " << dt * fastest << " > 0.1";
    throw InvalidArgument(msg.str());
  }
}

std::vector<double> drift_velocity(const OscillatorEnsemble& ensemble, const OrderParameter& op,
                                   double coupling) {
  const auto& phases = ensemble.phases();
  const auto& freqs = ensemble.frequencies();
  std::vector<double> v(phases.size());
  for (std::size_t i = 0; i < phases.size(); ++i) {
    v[i] = freqs[i] + coupling * op.r * std::sin(op.phi.value() - phases[i].value());
  }
  return v;
}

void step_rk4_unwrapped(std::span<double> angles, std::span<const double> frequencies,
                        double coupling, double dt, std::vector<double>& scratch) {
  const std::size_t n = angles.size();
  if (frequencies.size() != n) throw InvalidArgument("angle and frequency arrays differ in length");
  scratch.resize(7 * n);
  std::span<double> buf(scratch);
  auto k1 = buf.subspan(0, n);
  auto k2 = buf.subspan(n, n);
  auto k3 = buf.subspan(2 * n, n);
  auto k4 = buf.subspan(3 * n, n);
  auto stage = buf.subspan(4 * n, n);
  auto cos_buf = buf.subspan(5 * n, n);
  auto sin_buf = buf.subspan(6 * n, n);

  mean_field_derivative(angles, frequencies, coupling, k1, cos_buf, sin_buf);
  for (std::size_t i = 0; i < n; ++i) stage[i] = angles[i] + 0.5 * dt * k1[i];
  mean_field_derivative(stage, frequencies, coupling, k2, cos_buf, sin_buf);
  for (std::size_t i = 0; i < n; ++i) stage[i] = angles[i] + 0.5 * dt * k2[i];
  mean_field_derivative(stage, frequencies, coupling, k3, cos_buf, sin_buf);
  for (std::size_t i = 0; i < n; ++i) stage[i] = angles[i] + dt * k3[i];
  mean_field_derivative(stage, frequencies, coupling, k4, cos_buf, sin_buf);

  for (std::size_t i = 0; i < n; ++i) {
    angles[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!std::isfinite(angles[i])) {
      std::ostringstream msg;
      msg << "non-finite phase for oscillator " << i << " (dt = " << dt << ", K = " << coupling << ")";
      throw NumericalError(msg.str());
    }
  }
}

OscillatorEnsemble step_rk4(const OscillatorEnsemble& ensemble, double coupling, double dt) {
  std::vector<double> angles(ensemble.size());
  std::transform(ensemble.phases().begin(), ensemble.phases().end(), angles.begin(),
                 [](const Phase& p) { return p.value(); });
  std::vector<double> scratch;
  step_rk4_unwrapped(angles, ensemble.frequencies(), coupling, dt, scratch);
  std::vector<Phase> phases(angles.begin(), angles.end());
  return ensemble.with_phases(std::move(phases));
}

Trajectory simulate(const OscillatorEnsemble& ensemble, const SimConfig& config) {
  config.validate(ensemble);
  const std::size_t n = ensemble.size();

  // Integrate psi_i = theta_i - mean_omega t: the coupling only sees phase
  // differences, and removing the common rotation keeps rounding noise out
  // of the first harmonic.
  double mean_omega = 0.0;
  for (double w : ensemble.frequencies()) mean_omega += w;
  mean_omega /= static_cast<double>(n);
  std::vector<double> detuning(ensemble.frequencies());
  for (double& w : detuning) w -= mean_omega;

  std::vector<double> psi(n);
  std::transform(ensemble.phases().begin(), ensemble.phases().end(), psi.begin(),
                 [](const Phase& p) { return p.value(); });

  const auto steps = static_cast<std::size_t>(std::ceil(config.t_end / config.dt - 1e-9));
  Trajectory traj;
  if (config.record_phases) traj.phase_snapshots.emplace();

  auto record = [&](std::size_t step) {
    const double t = static_cast<double>(step) * config.dt;
    const double rotation = mean_omega * t;
    const OrderParameter op = order_parameter(std::span<const double>(psi));
    double mean = 0.0;
    for (double a : psi) mean += a;
    traj.times.push_back(t);
    traj.r_series.push_back(op.r);
    traj.phi_series.emplace_back(op.phi.value() + rotation);
    traj.mean_unwrapped_phase.push_back(mean / static_cast<double>(n) + rotation);
    if (traj.phase_snapshots) {
      auto& snap = traj.phase_snapshots->emplace_back();
      snap.reserve(n);
      for (double a : psi) snap.emplace_back(a + rotation);
    }
  };

  record(0);
  std::vector<double> scratch;
  for (std::size_t step = 1; step <= steps; ++step) {
    step_rk4_unwrapped(psi, detuning, config.coupling, config.dt, scratch);
    if (step % config.snapshot_stride == 0 || step == steps) record(step);
  }
  return traj;
}

double fit_growth_rate(const Trajectory& traj, const TimeWindow& window,
                       const GrowthFitOptions& options) {
  if (!(window.t_end > window.t_begin)) throw InvalidArgument("fit window must have t_end > t_begin");
  std::vector<double> t;
  std::vector<double> log_r;
  double r_min = 1.0;
  double r_max = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double time = traj.times[k];
    if (time < window.t_begin || time > window.t_end) continue;
    const double r = traj.r_series[k];
    if (!(r > options.floor)) {
      std::ostringstream msg;
      msg << "r = " << r << " at t = " << time << " touches the floor " << options.floor;
      throw GrowthFitRejected(msg.str());
    }
    if (!(r < options.ceiling)) {
      std::ostringstream msg;
      msg << "r = " << r << " at t = " << time << " exceeds the linear regime (ceiling "
          << options.ceiling << ")";
      throw GrowthFitRejected(msg.str());
    }
    r_min = std::min(r_min, r);
    r_max = std::max(r_max, r);
    t.push_back(time);
    log_r.push_back(std::log(r));
  }
  if (t.size() < 3) throw GrowthFitRejected("fewer than three samples inside the fit window");
  if (r_max / r_min < options.min_dynamic_range) {
    std::ostringstream msg;
    msg << "r never leaves its floor: max/min = " << r_max / r_min << " < "
        << options.min_dynamic_range;
    throw GrowthFitRejected(msg.str());
  }
  return slope(t, log_r);
}

std::optional<TimeWindow> linear_regime_window(const Trajectory& traj, double ceiling) {
  std::size_t last = 0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (!(traj.r_series[k] < ceiling)) break;
    last = k;
    ++count;
  }
  if (count < 3) return std::nullopt;
  return TimeWindow{traj.times.front(), traj.times[last]};
}

double mean_phase_slope(const Trajectory& traj) {
  if (traj.size() < 2) throw InvalidArgument("slope needs at least two samples");
  return slope(traj.times, traj.mean_unwrapped_phase);
}

}  // namespace kepr
