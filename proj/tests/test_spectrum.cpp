#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "doctest.h"
#include "kepr/errors.hpp"
#include "kepr/spectrum.hpp"

using namespace kepr;

namespace {

constexpr double kPi = std::numbers::pi;

// (K/2) int Omega g(v) / (Omega^2 + v^2) dv in closed form.
double lorentzian_real_part(double coupling, double gamma, double omega) {
  return 0.5 * coupling / (omega + gamma);
}

double gaussian_real_part(double coupling, double sigma, double omega) {
  const double x = omega / (sigma * std::sqrt(2.0));
  return 0.5 * coupling * std::sqrt(kPi / 2.0) / sigma * std::exp(x * x) * std::erfc(x);
}

// Independent quadrature for centred distributions: exp-sinh on the half line.
double independent_real_part(const FrequencyDistribution& dist, double coupling, double omega) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [&](double s) { return 2.0 * omega / (omega * omega + s * s) * dist.pdf(dist.center() + s); };
  return 0.5 * coupling * integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
}

}  // namespace

TEST_CASE("incoherent solution") {
  CHECK(incoherent_residual(FrequencyDistribution::delta(0.0)) < 1e-12);
  CHECK(incoherent_residual(FrequencyDistribution::delta(1.0), 4.0) < 1e-12);
  CHECK(incoherent_residual(FrequencyDistribution::lorentzian(0.0, 1.0)) < 1e-10);
  CHECK(incoherent_residual(FrequencyDistribution::gaussian(0.5, 0.2), 2.0) < 1e-10);

  SUBCASE("first-harmonic perturbation is not incoherent") {
    const auto dist = FrequencyDistribution::lorentzian(0.0, 1.0);
    // (1 + 2 eps cos theta) / 2pi integrates against e^{i theta} to eps
    const auto harmonic = check_density(
        [](double theta, double) { return (1.0 + 0.02 * std::cos(theta)) / (2.0 * kPi); }, dist, 1.0);
    CHECK(harmonic.r == doctest::Approx(0.01).epsilon(1e-10));
    CHECK(std::cos(harmonic.phi.value()) == doctest::Approx(1.0));
    CHECK(harmonic.continuity_residual > 1e-4);

    // additive 0.01 cos theta on top of 1/2pi gives 0.01 pi
    const auto additive = check_density(
        [](double theta, double) { return 1.0 / (2.0 * kPi) + 0.01 * std::cos(theta); },
        FrequencyDistribution::delta(0.0), 1.0);
    CHECK(additive.r == doctest::Approx(0.01 * kPi).epsilon(1e-12));
  }
}

TEST_CASE("closed-form delta spectrum") {
  SUBCASE("double root at K = 4 omega1") {
    const auto res = spectrum_delta(1.0, 4.0);
    REQUIRE(res.eigenvalues.size() == 1);
    CHECK(res.eigenvalues[0] == std::complex<double>(1.0, 0.0));
    CHECK(res.residuals[0] < 1e-12);
  }
  SUBCASE("two roots above the threshold") {
    const auto res = spectrum_delta(1.0, 5.0);
    REQUIRE(res.eigenvalues.size() == 2);
    CHECK(res.eigenvalues[0].real() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(res.eigenvalues[1].real() == doctest::Approx(0.5).epsilon(1e-15));
    for (const auto& ev : res.eigenvalues) {
      const double om = ev.real();
      CHECK(std::abs(2.5 * om / (om * om + 1.0) - 1.0) < 1e-12);
    }
    // the dropped imaginary part of the full relation is not zero off-centre
    CHECK(res.imaginary_parts[0] == doctest::Approx(2.5 / 5.0));
  }
  SUBCASE("no real roots below the threshold") {
    const auto res = spectrum_delta(1.0, 1.0);
    CHECK(res.empty());
    CHECK_FALSE(res.diagnostic.empty());
  }
  SUBCASE("invalid inputs") {
    CHECK_THROWS_AS(spectrum_delta(0.0, 4.0), InvalidArgument);
    CHECK_THROWS_AS(spectrum_delta(1.0, -1.0), InvalidArgument);
  }
}

TEST_CASE("general spectrum solver") {
  SUBCASE("Lorentzian matches K/2 - gamma") {
    const auto res = spectrum_general(FrequencyDistribution::lorentzian(0.0, 0.5), 3.0);
    REQUIRE(res.eigenvalues.size() == 1);
    CHECK(std::abs(res.eigenvalues[0].real() - 1.0) < 1e-10);
    CHECK(std::abs(res.imaginary_parts[0]) < 1e-10);
    CHECK(std::abs(lorentzian_real_part(3.0, 0.5, res.eigenvalues[0].real()) - 1.0) < 1e-10);
  }
  SUBCASE("Lorentzian below critical coupling has no positive root") {
    const auto res = spectrum_general(FrequencyDistribution::lorentzian(0.0, 2.0), 3.0);
    CHECK(res.empty());
    CHECK_FALSE(res.diagnostic.empty());
  }
  SUBCASE("delta input collapses to the quadratic") {
    const auto general = spectrum_general(FrequencyDistribution::delta(1.0), 5.0);
    const auto closed = spectrum_delta(1.0, 5.0);
    REQUIRE(general.eigenvalues.size() == closed.eigenvalues.size());
    for (std::size_t k = 0; k < general.eigenvalues.size(); ++k) {
      CHECK(std::abs(general.eigenvalues[k] - closed.eigenvalues[k]) < 1e-10);
    }
  }
  SUBCASE("tangential double root") {
    const auto res = spectrum_general(FrequencyDistribution::delta(1.0), 4.0);
    REQUIRE(res.eigenvalues.size() == 1);
    CHECK(std::abs(res.eigenvalues[0].real() - 1.0) < 1e-10);
  }
  SUBCASE("comoving frame removes the centre") {
    const auto lab = spectrum_general(FrequencyDistribution::delta(1.0), 5.0, {}, Frame::Comoving);
    REQUIRE(lab.eigenvalues.size() == 1);
    CHECK(std::abs(lab.eigenvalues[0].real() - 2.5) < 1e-10);
    const auto shifted = spectrum_general(FrequencyDistribution::lorentzian(2.0, 0.5), 3.0, {}, Frame::Comoving);
    REQUIRE(shifted.eigenvalues.size() == 1);
    CHECK(std::abs(shifted.eigenvalues[0].real() - 1.0) < 1e-10);
    CHECK(std::abs(shifted.imaginary_parts[0]) < 1e-10);
  }
  SUBCASE("Gaussian root against closed form and independent quadrature") {
    const auto dist = FrequencyDistribution::gaussian(0.0, 1.0);
    const auto res = spectrum_general(dist, 3.0);
    REQUIRE(res.eigenvalues.size() == 1);
    const double om = res.eigenvalues[0].real();
    CHECK(std::abs(gaussian_real_part(3.0, 1.0, om) - 1.0) < 1e-10);
    CHECK(std::abs(independent_real_part(dist, 3.0, om) - 1.0) < 1e-10);
  }
  SUBCASE("invalid inputs") {
    const auto d = FrequencyDistribution::lorentzian(0.0, 1.0);
    CHECK_THROWS_AS(spectrum_general(d, 0.0), InvalidArgument);
    CHECK_THROWS_AS(spectrum_general(d, 3.0, {0.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(spectrum_general(d, 3.0, {2.0, 1.0}), InvalidArgument);
  }
}

TEST_CASE("property: at most one real root for even non-increasing g") {
  std::mt19937_64 gen(404);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double width = u(gen);
    const double coupling = 4.0 * u(gen);
    const bool lorentz = trial % 2 == 0;
    const auto dist = lorentz ? FrequencyDistribution::lorentzian(0.0, width)
                              : FrequencyDistribution::gaussian(0.0, width);
    const auto res = spectrum_general(dist, coupling);
    CHECK(res.eigenvalues.size() <= 1);
    for (std::size_t k = 0; k < res.eigenvalues.size(); ++k) {
      const double om = res.eigenvalues[k].real();
      CHECK(std::abs(res.eigenvalues[k].imag()) < 1e-10);
      CHECK(std::abs(res.imaginary_parts[k]) < 1e-10);
      CHECK(std::abs(independent_real_part(dist, coupling, om) - 1.0) < 1e-10);
    }
    // root exists iff K exceeds 2 / (pi g(0))
    const double critical = 2.0 / (kPi * dist.pdf(0.0));
    if (coupling > 1.01 * critical) CHECK(res.eigenvalues.size() == 1);
    if (coupling < 0.99 * critical) CHECK(res.empty());
  }
}

TEST_CASE("b coefficient") {
  CHECK(std::abs(b_coefficient(1.0, 1.0, 1.0) - std::complex<double>(0.5, -0.5)) < 1e-15);
  CHECK(b_coefficient(1.0, 1.0, 0.0) == std::complex<double>(1.0, 0.0));
  CHECK(std::abs(b_coefficient({0.0, 2.0}, 0.0, 1.0) - std::complex<double>(2.0, 0.0)) < 1e-15);
  CHECK_THROWS_AS(b_coefficient(1.0, 0.0, 0.0), InvalidArgument);
}

TEST_CASE("coherence trajectory") {
  CoherenceTrajectoryParams derived{1.0, 1.0, 0.0, TrajectoryMode::Derived};
  CoherenceTrajectoryParams literal{1.0, 1.0, 0.0, TrajectoryMode::PaperLiteral};

  CHECK(std::abs(coherence_trajectory(derived, 0.0) - kPi) < 1e-12);
  CHECK(coherence_trajectory(literal, 0.0) == 0.0);

  SUBCASE("envelope ratio at successive peaks") {
    for (double w : {0.5, 1.0, 3.0}) {
      for (double growth : {-0.3, 0.2, 1.0}) {
        derived.omega1 = literal.omega1 = w;
        derived.growth = literal.growth = growth;
        literal.alpha = 0.4;
        const double period = 2.0 * kPi / w;
        const double paper_peak = (0.5 * kPi - 0.4) / w;
        const double derived_peak =
            (0.5 * kPi + std::arg(b_coefficient(1.0, growth, w))) / w;
        for (auto [params, peak] : {std::pair{literal, paper_peak}, std::pair{derived, derived_peak}}) {
          const double ratio = coherence_trajectory(params, peak + period) / coherence_trajectory(params, peak);
          CHECK(std::abs(ratio / std::exp(growth * period) - 1.0) < 1e-9);
        }
      }
    }
  }

  SUBCASE("derived mode equals 2 pi e^{Omega t} Re[b e^{i theta}] with theta = omega1 t") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
      const CoherenceTrajectoryParams p{u(gen), u(gen) - 1.5, 0.0, TrajectoryMode::Derived};
      const double t = u(gen);
      const double theta = p.omega1 * t;
      const auto b = 1.0 / std::complex<double>(p.growth, p.omega1);
      const double expected = 2.0 * kPi * std::exp(p.growth * t) * (b * std::polar(1.0, theta)).real();
      CHECK(std::abs(coherence_trajectory(p, t) - expected) < 1e-12 * (1.0 + std::abs(expected)));
    }
  }

  SUBCASE("at Omega = omega1 the modes differ by sqrt5/(2 sqrt2) and a phase") {
    std::mt19937_64 gen(10);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (double w : {0.7, 1.0, 2.0}) {
      const CoherenceTrajectoryParams d{w, w, 0.0, TrajectoryMode::Derived};
      const CoherenceTrajectoryParams l{w, w, kPi / 4, TrajectoryMode::PaperLiteral};
      for (int trial = 0; trial < 20; ++trial) {
        const double t = u(gen);
        const double ratio = coherence_trajectory(l, t) / coherence_trajectory(d, t);
        if (std::abs(std::sin(w * t + kPi / 4)) > 1e-3) {
          CHECK(std::abs(ratio - std::sqrt(5.0) / (2.0 * std::sqrt(2.0))) < 1e-9);
        }
      }
    }
  }
}
