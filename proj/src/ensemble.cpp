#include "kepr/ensemble.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/roots.hpp>

#include "kepr/errors.hpp"
#include "kepr/random.hpp"

namespace kepr {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double parse_real(const std::string& token, const std::string& context) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw InvalidArgument("cannot parse number '" + token + "' in " + context);
  }
  return value;
}

}  // namespace

double wrap_angle(double radians) {
  double w = std::fmod(radians, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod of a tiny negative value can round up to exactly 2pi
  if (w >= kTwoPi) w = 0.0;
  return w;
}

// ---------------------------------------------------------------------------
// FrequencyDistribution

FrequencyDistribution FrequencyDistribution::delta(double center) {
  if (!std::isfinite(center)) throw InvalidArgument("delta center must be finite");
  return {Kind::Delta, center, 0.0};
}

FrequencyDistribution FrequencyDistribution::lorentzian(double center, double gamma) {
  if (!std::isfinite(center)) throw InvalidArgument("lorentzian center must be finite");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("lorentzian width must be positive");
  }
  return {Kind::Lorentzian, center, gamma};
}

FrequencyDistribution FrequencyDistribution::gaussian(double center, double sigma) {
  if (!std::isfinite(center)) throw InvalidArgument("gaussian center must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("gaussian sigma must be positive");
  }
  return {Kind::Gaussian, center, sigma};
}

FrequencyDistribution FrequencyDistribution::parse(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.empty()) throw InvalidArgument("empty distribution");
  const std::string& kind = parts[0];
  if (kind == "delta" && parts.size() == 2) {
    return delta(parse_real(parts[1], "delta parameter"));
  }
  if (kind == "lorentzian" && parts.size() == 3) {
    return lorentzian(parse_real(parts[1], "lorentzian parameter"), parse_real(parts[2], "lorentzian parameter"));
  }
  if (kind == "gaussian" && parts.size() == 3) {
    return gaussian(parse_real(parts[1], "gaussian parameter"), parse_real(parts[2], "gaussian parameter"));
  }
  throw InvalidArgument("unrecognised distribution '" + text +
                        "' (expected delta:C, lorentzian:C:GAMMA or gaussian:C:SIGMA)");
}

double FrequencyDistribution::pdf(double omega) const {
  const double s = omega - center_;
  switch (kind_) {
    case Kind::Delta:
      throw InvalidArgument("delta distribution has no density function");
    case Kind::Lorentzian:
      return width_ / (kPi * (width_ * width_ + s * s));
    case Kind::Gaussian:
      return std::exp(-0.5 * s * s / (width_ * width_)) / (width_ * std::sqrt(2.0 * kPi));
  }
  return 0.0;
}

double FrequencyDistribution::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw InvalidArgument("quantile argument must lie in (0, 1)");
  switch (kind_) {
    case Kind::Delta:
      return center_;
    case Kind::Lorentzian:
      return center_ + width_ * std::tan(kPi * (u - 0.5));
    case Kind::Gaussian:
      return center_ + width_ * std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
  }
  return center_;
}

std::string FrequencyDistribution::to_string() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind_) {
    case Kind::Delta:
      out << "delta:" << center_;
      break;
    case Kind::Lorentzian:
      out << "lorentzian:" << center_ << ':' << width_;
      break;
    case Kind::Gaussian:
      out << "gaussian:" << center_ << ':' << width_;
      break;
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// InitMode

InitMode InitMode::parse(const std::string& text) {
  if (text == "uniform" || text == "uniform_random") return uniform_random();
  if (text == "equally_spaced") return equally_spaced();
  const auto parts = split(text, ':');
  if (parts.size() == 2 && parts[0] == "first_harmonic") {
    return first_harmonic(parse_real(parts[1], "init parameter"));
  }
  throw InvalidArgument("unrecognised init mode '" + text +
                        "' (expected uniform, equally_spaced or first_harmonic:EPS)");
}

std::string InitMode::to_string() const {
  switch (kind) {
    case Kind::UniformRandom:
      return "uniform";
    case Kind::EquallySpaced:
      return "equally_spaced";
    case Kind::FirstHarmonic: {
      std::ostringstream out;
      out.precision(17);
      out << "first_harmonic:" << amplitude;
      return out.str();
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// OscillatorEnsemble

OscillatorEnsemble::OscillatorEnsemble(std::vector<Phase> phases, std::vector<double> frequencies)
    : phases_(std::move(phases)), frequencies_(std::move(frequencies)) {
  if (phases_.empty()) throw InvalidArgument("ensemble needs at least one oscillator");
  if (frequencies_.size() != phases_.size()) {
    throw InvalidArgument("phase and frequency arrays differ in length");
  }
  sides_.assign(phases_.size(), Side::A);
}

OscillatorEnsemble::OscillatorEnsemble(std::vector<Phase> phases, std::vector<double> frequencies,
                                       std::vector<Vec3> unit_axes, std::vector<Side> sides)
    : OscillatorEnsemble(std::move(phases), std::move(frequencies)) {
  if (unit_axes.size() != phases_.size()) {
    throw InvalidArgument("unit axis array differs in length from phases");
  }
  for (const Vec3& axis : unit_axes) {
    if (!is_finite(axis) || std::abs(norm(axis) - 1.0) > 1e-12) {
      throw InvalidArgument("unit axes must have norm 1 within 1e-12");
    }
  }
  unit_axes_ = std::move(unit_axes);
  if (!sides.empty()) {
    if (sides.size() != phases_.size()) throw InvalidArgument("side tags differ in length from phases");
    sides_ = std::move(sides);
  }
}

const std::vector<Vec3>& OscillatorEnsemble::unit_axes() const {
  if (!unit_axes_) throw InvalidArgument("ensemble has no unit axes (scalar mode)");
  return *unit_axes_;
}

OscillatorEnsemble OscillatorEnsemble::with_phases(std::vector<Phase> phases) const {
  if (phases.size() != phases_.size()) throw InvalidArgument("replacement phases differ in length");
  OscillatorEnsemble copy = *this;
  copy.phases_ = std::move(phases);
  return copy;
}

// ---------------------------------------------------------------------------
// Sampling

std::vector<double> sample_frequencies(const FrequencyDistribution& dist, std::size_t n,
                                       std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("sample count must be positive");
  std::vector<double> out(n, dist.center());
  if (dist.is_delta()) return out;
  Rng rng(seed);
  for (double& w : out) {
    if (dist.kind() == FrequencyDistribution::Kind::Lorentzian) {
      w = dist.quantile(rng.uniform_open());
    } else {
      w = dist.center() + dist.width() * rng.normal();
    }
  }
  return out;
}

double first_harmonic_quantile(double u, double eps) {
  if (!(u >= 0.0 && u <= 1.0)) throw InvalidArgument("quantile argument must lie in [0, 1]");
  if (eps == 0.0) return kTwoPi * u;
  // CDF: (theta + 2 eps sin theta) / 2pi, strictly increasing for |eps| < 1/2
  const double target = kTwoPi * u;
  auto f = [&](double theta) {
    return std::make_pair(theta + 2.0 * eps * std::sin(theta) - target,
                          1.0 + 2.0 * eps * std::cos(theta));
  };
  std::uintmax_t iterations = 64;
  const double theta =
      boost::math::tools::newton_raphson_iterate(f, target, 0.0, kTwoPi, 52, iterations);
  return theta;
}

std::vector<Phase> init_phases(const InitMode& mode, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("phase count must be positive");
  std::vector<Phase> out;
  out.reserve(n);
  const double dn = static_cast<double>(n);
  switch (mode.kind) {
    case InitMode::Kind::EquallySpaced:
      for (std::size_t k = 0; k < n; ++k) out.emplace_back(kTwoPi * static_cast<double>(k) / dn);
      break;
    case InitMode::Kind::UniformRandom: {
      Rng rng(seed);
      for (std::size_t k = 0; k < n; ++k) out.emplace_back(kTwoPi * rng.uniform());
      break;
    }
    case InitMode::Kind::FirstHarmonic: {
      if (!(mode.amplitude > 0.0)) throw InvalidArgument("first_harmonic amplitude must be positive");
      if (mode.amplitude > 0.5) {
        throw InvalidArgument("first_harmonic amplitude above 1/2 makes the density negative");
      }
      Rng rng(seed);
      for (std::size_t k = 0; k < n; ++k) {
        const double u = (static_cast<double>(k) + rng.uniform()) / dn;
        out.emplace_back(first_harmonic_quantile(u, mode.amplitude));
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Order parameter

namespace {

template <typename Range, typename Angle>
OrderParameter average_phasor(const Range& values, Angle angle) {
  if (values.empty()) throw InvalidArgument("order parameter of an empty phase set");
  double re = 0.0;
  double im = 0.0;
  for (const auto& v : values) {
    const double a = angle(v);
    re += std::cos(a);
    im += std::sin(a);
  }
  const double n = static_cast<double>(values.size());
  re /= n;
  im /= n;
  const double r = std::min(std::hypot(re, im), 1.0);
  return {r, Phase(std::atan2(im, re))};
}

}  // namespace

OrderParameter order_parameter(std::span<const Phase> phases) {
  return average_phasor(phases, [](const Phase& p) { return p.value(); });
}

OrderParameter order_parameter(std::span<const double> angles) {
  return average_phasor(angles, [](double a) { return a; });
}

}  // namespace kepr
