#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "kepr/ensemble.hpp"

namespace kepr {

using ComplexAmplitude = std::complex<double>;

/// Frame in which the dispersion integral is evaluated.
enum class Frame {
  /// Frequencies as given (the form that collapses to the quadratic for a delta).
  Lab,
  /// Shifted so that the distribution center sits at zero.
  Comoving,
};

Frame parse_frame(const std::string& name);
std::string to_string(Frame frame);

struct SpectrumResult {
  std::vector<std::complex<double>> eigenvalues;
  /// |(K/2) int Omega g(v) / (Omega^2 + v^2) dv - 1| at each eigenvalue.
  std::vector<double> residuals;
  /// (K/2) int v g(v) / (Omega^2 + v^2) dv at each eigenvalue: the imaginary
  /// part of the full dispersion relation, dropped by the real-part equation.
  std::vector<double> imaginary_parts;
  FrequencyDistribution distribution = FrequencyDistribution::delta(0.0);
  double coupling = 0.0;
  Frame frame = Frame::Lab;
  std::string diagnostic;

  bool empty() const { return eigenvalues.empty(); }
};

struct SearchInterval {
  double lower = 1e-6;
  double upper = 100.0;
};

struct DensityCheck {
  double r = 0.0;
  Phase phi;
  /// max over the sampled (theta, omega) grid of |d(rho v)/d theta|; for a
  /// time-independent density this is the continuity-equation residual.
  double continuity_residual = 0.0;
};

/// Order parameter r e^{i phi} = int int e^{i theta} rho(theta, omega) g(omega)
/// and the continuity residual of rho under v = omega + K r sin(phi - theta).
DensityCheck check_density(const std::function<double(double theta, double omega)>& density,
                           const FrequencyDistribution& dist, double coupling);

/// max(r, continuity residual) for the uniform density 1/2pi.
double incoherent_residual(const FrequencyDistribution& dist, double coupling = 1.0);

/// Real roots of Omega^2 - (K/2) Omega + omega1^2 = 0, i.e. of
/// 1 = (K/2) Omega / (Omega^2 + omega1^2). Sorted descending; a single entry
/// for the double root at K = 4 omega1; empty when the discriminant is negative.
SpectrumResult spectrum_delta(double omega1, double coupling);

/// (K/2) int Omega g(v) / (Omega^2 + v^2) dv evaluated in `frame`.
double dispersion_real_part(const FrequencyDistribution& dist, double coupling, double omega,
                            Frame frame = Frame::Lab);

/// (K/2) int v g(v) / (Omega^2 + v^2) dv evaluated in `frame`.
double dispersion_imaginary_part(const FrequencyDistribution& dist, double coupling, double omega,
                                 Frame frame = Frame::Lab);

/// Positive real roots of the real-part dispersion equation on `interval`.
/// Simple roots come from sign changes; tangential (double) roots from
/// stationary points where the residual vanishes.
SpectrumResult spectrum_general(const FrequencyDistribution& dist, double coupling,
                                const SearchInterval& interval = {}, Frame frame = Frame::Lab);

/// b(omega) = A / (Omega + i omega).
ComplexAmplitude b_coefficient(ComplexAmplitude amplitude, double growth, double omega);

enum class TrajectoryMode {
  /// (pi sqrt5 / 2 omega1) e^{Omega t} sin(omega1 t + alpha), as published.
  PaperLiteral,
  /// 2 pi e^{Omega t} Re[b(omega1) e^{i omega1 t}] with A = 1.
  Derived,
};

TrajectoryMode parse_trajectory_mode(const std::string& name);
std::string to_string(TrajectoryMode mode);

struct CoherenceTrajectoryParams {
  double omega1 = 1.0;
  /// Spectral eigenvalue Omega.
  double growth = 1.0;
  /// Free phase offset; used by PaperLiteral only.
  double alpha = 0.0;
  TrajectoryMode mode = TrajectoryMode::Derived;
};

/// First-order coherence r1(t) with phi = theta = omega1 t.
double coherence_trajectory(const CoherenceTrajectoryParams& params, double t);

}  // namespace kepr
