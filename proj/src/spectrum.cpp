#include "kepr/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "kepr/errors.hpp"

namespace kepr {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuadratureTolerance = 1e-13;
constexpr unsigned kQuadratureDepth = 20;
constexpr std::size_t kScanPoints = 400;
constexpr double kTangentTolerance = 1e-12;

// Integrates f over [0, inf) with breakpoints, failing loudly on non-convergence.
template <typename F>
double integrate_half_line(F f, std::vector<double> breaks) {
  using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
  breaks.push_back(0.0);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [](double b) { return !(b >= 0.0); }),
               breaks.end());

  double total = 0.0;
  double total_l1 = 0.0;
  double total_err = 0.0;
  // Segments whose single-pass L1 is negligible against the running total are not refined:
  // the relative tolerance would otherwise chase denormal tails to full depth.
  auto accumulate = [&](auto&& g) {
    double err = 0.0;
    double l1 = 0.0;
    double value = Quad::integrate(g, 0.0, 1.0, 0, kQuadratureTolerance, &err, &l1);
    if (l1 > 1e-17 * total_l1) {
      value = Quad::integrate(g, 0.0, 1.0, kQuadratureDepth, kQuadratureTolerance, &err, &l1);
    }
    total += value;
    total_err += err;
    total_l1 += l1;
  };
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    // unit-interval mapping: the adaptive error estimate misbehaves on very narrow raw intervals
    const double a = breaks[k];
    const double h = breaks[k + 1] - breaks[k];
    accumulate([&](double x) { return f(a + h * x) * h; });
  }
  // Tail [T, inf) mapped through s = T / t so algebraic decay becomes a smooth integrand on (0, 1].
  const double tail = breaks.back();
  accumulate([&](double t) { return t <= 0.0 ? 0.0 : f(tail / t) * tail / (t * t); });
  if (!std::isfinite(total) || total_err > 1e-10 * std::max(total_l1, 1e-300)) {
    std::ostringstream msg;
    msg << "quadrature did not converge (error estimate " << total_err << ", L1 " << total_l1 << ")";
    throw NumericalError(msg.str());
  }
  return total;
}

double frame_center(const FrequencyDistribution& dist, Frame frame) {
  return frame == Frame::Comoving ? 0.0 : dist.center();
}

// int kernel(v) g(v) dv for a g even about its own center, folded onto s >= 0:
// v = c +- s with g(center + s) shared by both branches.
template <typename Kernel>
double fold_and_integrate(const FrequencyDistribution& dist, Frame frame, double scale,
                          Kernel kernel) {
  const double c = frame_center(dist, frame);
  if (dist.is_delta()) return kernel(c);
  const double w = dist.width();
  auto integrand = [&](double s) {
    const double g = dist.pdf(dist.center() + s);
    if (g == 0.0) return 0.0;
    return g * (kernel(c + s) + kernel(c - s));
  };
  const double ac = std::abs(c);
  std::vector<double> breaks{w, ac - scale, ac, ac + scale, ac + 20.0 * (scale + w)};
  // geometric breaks resolve a kernel much narrower than g without deep bisection
  for (double b = scale; b < w; b *= 16.0) breaks.push_back(ac + b);
  for (double m : {4.0, 10.0, 40.0}) breaks.push_back(m * w);
  return integrate_half_line(integrand, std::move(breaks));
}

double real_kernel_derivative(const FrequencyDistribution& dist, double coupling, double omega,
                              Frame frame) {
  const double o2 = omega * omega;
  return 0.5 * coupling * fold_and_integrate(dist, frame, omega, [o2](double v) {
           const double d = o2 + v * v;
           return (v * v - o2) / (d * d);
         });
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidArgument(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

Frame parse_frame(const std::string& name) {
  if (name == "lab") return Frame::Lab;
  if (name == "comoving") return Frame::Comoving;
  throw InvalidArgument("unknown frame '" + name + "' (expected lab or comoving)");
}

std::string to_string(Frame frame) { return frame == Frame::Lab ? "lab" : "comoving"; }

TrajectoryMode parse_trajectory_mode(const std::string& name) {
  if (name == "paper_literal") return TrajectoryMode::PaperLiteral;
  if (name == "derived") return TrajectoryMode::Derived;
  throw InvalidArgument("unknown trajectory mode '" + name + "' (expected paper_literal or derived)");
}

std::string to_string(TrajectoryMode mode) {
  return mode == TrajectoryMode::PaperLiteral ? "paper_literal" : "derived";
}

// ---------------------------------------------------------------------------
// Incoherent state

DensityCheck check_density(const std::function<double(double, double)>& density,
                           const FrequencyDistribution& dist, double coupling) {
  constexpr std::size_t kThetaPoints = 128;
  const double dtheta = kTwoPi / static_cast<double>(kThetaPoints);

  // Periodic trapezoid rule: exact for trigonometric polynomials of low degree.
  auto harmonic = [&](double omega) {
    std::complex<double> sum{0.0, 0.0};
    for (std::size_t k = 0; k < kThetaPoints; ++k) {
      const double theta = dtheta * static_cast<double>(k);
      sum += std::polar(density(theta, omega), theta);
    }
    return sum * dtheta;
  };

  std::complex<double> z;
  if (dist.is_delta()) {
    z = harmonic(dist.center());
  } else {
    auto re = fold_and_integrate(dist, Frame::Lab, dist.width(),
                                 [&](double v) { return harmonic(v).real(); });
    auto im = fold_and_integrate(dist, Frame::Lab, dist.width(),
                                 [&](double v) { return harmonic(v).imag(); });
    z = {re, im};
  }

  DensityCheck out;
  out.r = std::abs(z);
  out.phi = Phase(std::arg(z));

  std::vector<double> omegas;
  if (dist.is_delta()) {
    omegas.push_back(dist.center());
  } else {
    for (double u : {0.02, 0.1, 0.25, 0.5, 0.75, 0.9, 0.98}) omegas.push_back(dist.quantile(u));
  }
  constexpr double h = 1e-4;
  const double phi = out.phi.value();
  for (double omega : omegas) {
    for (std::size_t k = 0; k < kThetaPoints; ++k) {
      const double theta = dtheta * static_cast<double>(k);
      const double rho = density(theta, omega);
      const double drho = (density(theta + h, omega) - density(theta - h, omega)) / (2.0 * h);
      const double v = omega + coupling * out.r * std::sin(phi - theta);
      const double dv = -coupling * out.r * std::cos(phi - theta);
      out.continuity_residual = std::max(out.continuity_residual, std::abs(drho * v + rho * dv));
    }
  }
  return out;
}

double incoherent_residual(const FrequencyDistribution& dist, double coupling) {
  const auto uniform = [](double, double) { return 1.0 / kTwoPi; };
  const DensityCheck check = check_density(uniform, dist, coupling);
  return std::max(check.r, check.continuity_residual);
}

// ---------------------------------------------------------------------------
// Discrete spectrum

SpectrumResult spectrum_delta(double omega1, double coupling) {
  require_positive(omega1, "omega1");
  require_positive(coupling, "coupling K");
  SpectrumResult out;
  out.distribution = FrequencyDistribution::delta(omega1);
  out.coupling = coupling;
  out.frame = Frame::Lab;

  const double half_k = 0.5 * coupling;
  const double disc = half_k * half_k - 4.0 * omega1 * omega1;
  std::vector<double> roots;
  if (disc < 0.0) {
    std::ostringstream msg;
    msg << "no real root: (K/2)^2 - 4 omega1^2 = " << disc << " < 0";
    out.diagnostic = msg.str();
  } else if (disc == 0.0) {
    roots.push_back(0.5 * half_k);
  } else {
    // q avoids cancellation in the smaller root
    const double q = 0.5 * (half_k + std::sqrt(disc));
    roots.push_back(q);
    roots.push_back(omega1 * omega1 / q);
  }
  for (double root : roots) {
    const double denom = root * root + omega1 * omega1;
    out.eigenvalues.emplace_back(root, 0.0);
    out.residuals.push_back(std::abs(half_k * root / denom - 1.0));
    out.imaginary_parts.push_back(half_k * omega1 / denom);
  }
  return out;
}

double dispersion_real_part(const FrequencyDistribution& dist, double coupling, double omega,
                            Frame frame) {
  const double o2 = omega * omega;
  return 0.5 * coupling *
         fold_and_integrate(dist, frame, omega, [omega, o2](double v) { return omega / (o2 + v * v); });
}

double dispersion_imaginary_part(const FrequencyDistribution& dist, double coupling, double omega,
                                 Frame frame) {
  const double o2 = omega * omega;
  return 0.5 * coupling * fold_and_integrate(dist, frame, omega, [o2](double v) { return v / (o2 + v * v); });
}

SpectrumResult spectrum_general(const FrequencyDistribution& dist, double coupling,
                                const SearchInterval& interval, Frame frame) {
  require_positive(coupling, "coupling K");
  if (!(interval.lower > 0.0) || !(interval.upper > interval.lower) || !std::isfinite(interval.upper)) {
    throw InvalidArgument("search interval must satisfy 0 < lower < upper < inf");
  }
  SpectrumResult out;
  out.distribution = dist;
  out.coupling = coupling;
  out.frame = frame;

  auto residual = [&](double omega) { return dispersion_real_part(dist, coupling, omega, frame) - 1.0; };
  auto slope = [&](double omega) { return real_kernel_derivative(dist, coupling, omega, frame); };

  // Geometric grid: the interesting structure spans decades near zero.
  std::vector<double> grid(kScanPoints);
  const double ratio = std::log(interval.upper / interval.lower);
  for (std::size_t k = 0; k < kScanPoints; ++k) {
    grid[k] = interval.lower * std::exp(ratio * static_cast<double>(k) / (kScanPoints - 1));
  }
  grid.back() = interval.upper;
  std::vector<double> f(kScanPoints);
  std::vector<double> df(kScanPoints);
  for (std::size_t k = 0; k < kScanPoints; ++k) {
    f[k] = residual(grid[k]);
    df[k] = slope(grid[k]);
  }

  std::vector<double> roots;
  auto tol = boost::math::tools::eps_tolerance<double>(50);
  for (std::size_t k = 0; k + 1 < kScanPoints; ++k) {
    if (f[k] == 0.0) {
      roots.push_back(grid[k]);
      continue;
    }
    if ((f[k] < 0.0) != (f[k + 1] < 0.0) && f[k + 1] != 0.0) {
      std::uintmax_t iters = 200;
      const auto bracket = boost::math::tools::toms748_solve(residual, grid[k], grid[k + 1], f[k],
                                                             f[k + 1], tol, iters);
      roots.push_back(0.5 * (bracket.first + bracket.second));
    } else if ((df[k] < 0.0) != (df[k + 1] < 0.0)) {
      // Stationary point of the residual: a tangential root if it touches zero.
      std::uintmax_t iters = 200;
      const auto bracket = boost::math::tools::toms748_solve(slope, grid[k], grid[k + 1], df[k],
                                                             df[k + 1], tol, iters);
      const double candidate = 0.5 * (bracket.first + bracket.second);
      if (std::abs(residual(candidate)) < kTangentTolerance) roots.push_back(candidate);
    }
  }
  if (f.back() == 0.0) roots.push_back(grid.back());
  std::sort(roots.begin(), roots.end(), std::greater<>());

  for (double root : roots) {
    out.eigenvalues.emplace_back(root, 0.0);
    out.residuals.push_back(std::abs(residual(root)));
    out.imaginary_parts.push_back(dispersion_imaginary_part(dist, coupling, root, frame));
  }

  const bool centered = frame == Frame::Comoving || dist.center() == 0.0;
  if (centered) {
    if (roots.size() > 1) {
      throw NumericalError("more than one root for an even non-increasing distribution");
    }
    for (double im : out.imaginary_parts) {
      if (std::abs(im) > 1e-10) throw NumericalError("imaginary part failed to cancel for an even distribution");
    }
  }
  if (roots.empty()) {
    std::ostringstream msg;
    msg << "no sign change of the dispersion residual on [" << interval.lower << ", "
        << interval.upper << "]: residual " << f.front() << " .. " << f.back();
    out.diagnostic = msg.str();
  }
  return out;
}

ComplexAmplitude b_coefficient(ComplexAmplitude amplitude, double growth, double omega) {
  if (growth == 0.0 && omega == 0.0) throw InvalidArgument("b coefficient: zero denominator Omega + i omega");
  return amplitude / std::complex<double>(growth, omega);
}

double coherence_trajectory(const CoherenceTrajectoryParams& params, double t) {
  require_positive(params.omega1, "omega1");
  const double envelope = std::exp(params.growth * t);
  const double w = params.omega1;
  if (params.mode == TrajectoryMode::PaperLiteral) {
    return kPi * std::sqrt(5.0) / (2.0 * w) * envelope * std::sin(w * t + params.alpha);
  }
  const ComplexAmplitude b = b_coefficient(1.0, params.growth, w);
  return 2.0 * kPi * envelope * (b * std::polar(1.0, w * t)).real();
}

}  // namespace kepr
