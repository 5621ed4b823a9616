#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kepr/geometry.hpp"

namespace kepr {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into [0, 2pi).
double wrap_angle(double radians);

/// An oscillator phase, canonically stored in [0, 2pi).
class Phase {
 public:
  constexpr Phase() = default;
  explicit Phase(double radians) : value_(wrap_angle(radians)) {}

  constexpr double value() const { return value_; }

  friend constexpr bool operator==(const Phase&, const Phase&) = default;

 private:
  double value_ = 0.0;
};

/// Distribution g(omega) of natural frequencies. Every supported kind is even
/// about its center and non-increasing away from it.
class FrequencyDistribution {
 public:
  enum class Kind { Delta, Lorentzian, Gaussian };

  static FrequencyDistribution delta(double center);
  static FrequencyDistribution lorentzian(double center, double gamma);
  static FrequencyDistribution gaussian(double center, double sigma);

  /// Parses "delta:C", "lorentzian:C:GAMMA" or "gaussian:C:SIGMA".
  static FrequencyDistribution parse(const std::string& text);

  Kind kind() const { return kind_; }
  double center() const { return center_; }
  /// Lorentzian half-width or Gaussian standard deviation; zero for Delta.
  double width() const { return width_; }
  bool is_delta() const { return kind_ == Kind::Delta; }

  /// Density at omega. Not defined for Delta (throws).
  double pdf(double omega) const;

  /// Inverse CDF on (0, 1). Delta returns the center for every u.
  double quantile(double u) const;

  std::string to_string() const;

  friend bool operator==(const FrequencyDistribution&, const FrequencyDistribution&) = default;

 private:
  FrequencyDistribution(Kind kind, double center, double width)
      : kind_(kind), center_(center), width_(width) {}

  Kind kind_;
  double center_;
  double width_;
};

/// Phase initialization recipe.
struct InitMode {
  enum class Kind { UniformRandom, EquallySpaced, FirstHarmonic };

  Kind kind = Kind::UniformRandom;
  /// Perturbation amplitude for FirstHarmonic; the sampled density is
  /// (1 + 2 amplitude cos theta) / 2pi.
  double amplitude = 0.0;

  static InitMode uniform_random() { return {Kind::UniformRandom, 0.0}; }
  static InitMode equally_spaced() { return {Kind::EquallySpaced, 0.0}; }
  static InitMode first_harmonic(double amplitude) { return {Kind::FirstHarmonic, amplitude}; }

  /// Parses "uniform", "equally_spaced" or "first_harmonic:EPS".
  static InitMode parse(const std::string& text);
  std::string to_string() const;
};

/// Which end of the A->B line generated an oscillator. Coupling sums in the
/// vector model run over the A-side population.
enum class Side { A, B };

/// N oscillators: phases, natural frequencies, and (vector mode) unit
/// angular-frequency axes.
class OscillatorEnsemble {
 public:
  OscillatorEnsemble(std::vector<Phase> phases, std::vector<double> frequencies);
  OscillatorEnsemble(std::vector<Phase> phases, std::vector<double> frequencies,
                     std::vector<Vec3> unit_axes, std::vector<Side> sides = {});

  std::size_t size() const { return phases_.size(); }
  const std::vector<Phase>& phases() const { return phases_; }
  const std::vector<double>& frequencies() const { return frequencies_; }
  bool has_axes() const { return unit_axes_.has_value(); }
  /// Throws if the ensemble is scalar-only.
  const std::vector<Vec3>& unit_axes() const;
  /// Side tag per oscillator; all A when not given.
  const std::vector<Side>& sides() const { return sides_; }

  OscillatorEnsemble with_phases(std::vector<Phase> phases) const;

 private:
  std::vector<Phase> phases_;
  std::vector<double> frequencies_;
  std::optional<std::vector<Vec3>> unit_axes_;
  std::vector<Side> sides_;
};

struct OrderParameter {
  double r = 0.0;
  Phase phi;
};

/// Draws n natural frequencies. Lorentzian uses the inverse CDF; Gaussian
/// uses Box-Muller. Bit-reproducible for a fixed seed.
std::vector<double> sample_frequencies(const FrequencyDistribution& dist, std::size_t n,
                                       std::uint64_t seed);

/// Initial phases. FirstHarmonic uses stratified inverse-transform sampling:
/// sample k is the inverse CDF at (k + U_k) / n.
std::vector<Phase> init_phases(const InitMode& mode, std::size_t n, std::uint64_t seed);

/// Inverse CDF of the density (1 + 2 eps cos theta) / 2pi on [0, 2pi).
double first_harmonic_quantile(double u, double eps);

/// r e^{i phi} = (1/N) sum_j e^{i theta_j}.
OrderParameter order_parameter(std::span<const Phase> phases);

/// Same as above for raw (possibly unwrapped) angles.
OrderParameter order_parameter(std::span<const double> angles);

}  // namespace kepr
