#include "kepr/bellchsh.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

#include "kepr/errors.hpp"
#include "kepr/random.hpp"

namespace kepr {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

AnalyzerAngle AnalyzerAngle::degrees(double deg) {
  if (!std::isfinite(deg)) throw InvalidArgument("analyzer angle must be finite");
  return AnalyzerAngle(deg * (kPi / 180.0));
}

AnalyzerAngle AnalyzerAngle::radians(double rad) {
  if (!std::isfinite(rad)) throw InvalidArgument("analyzer angle must be finite");
  return AnalyzerAngle(rad);
}

double AnalyzerAngle::degrees() const { return radians_ * (180.0 / kPi); }

double chsh_combination(const ChshCorrelations& p) {
  return std::abs(p.ab - p.ad) + std::abs(p.cd + p.cb);
}

double malus_transmission(double phi) {
  const double c = std::cos(phi);
  return c * c;
}

double correlation(AnalyzerAngle a, AnalyzerAngle b) {
  return std::cos(2.0 * (b.radians() - a.radians()));
}

ChshScenario make_scenario(AnalyzerAngle a, AnalyzerAngle b, AnalyzerAngle c, AnalyzerAngle d) {
  ChshScenario s{a, b, c, d, {}, 0.0};
  s.correlations = {correlation(a, b), correlation(a, d), correlation(c, d), correlation(c, b)};
  s.s = chsh_combination(s.correlations);
  return s;
}

double chsh_value(AnalyzerAngle a, AnalyzerAngle b, AnalyzerAngle c, AnalyzerAngle d) {
  return make_scenario(a, b, c, d).s;
}

McEstimate simulate_twin_photons(AnalyzerAngle a, AnalyzerAngle b, std::size_t n_events,
                                 std::uint64_t seed) {
  if (n_events < 2) throw InvalidArgument("Monte Carlo needs at least two events");
  Rng rng(seed);
  std::size_t agreements = 0;
  for (std::size_t k = 0; k < n_events; ++k) {
    const double lambda = kPi * rng.uniform();
    const bool alice = rng.uniform() < malus_transmission(a.radians() - lambda);
    const double bob_polarization = alice ? a.radians() : a.radians() + 0.5 * kPi;
    const bool bob = rng.uniform() < malus_transmission(b.radians() - bob_polarization);
    if (alice == bob) ++agreements;
  }
  const double n = static_cast<double>(n_events);
  McEstimate out;
  out.n_events = n_events;
  out.seed = seed;
  out.p_hat = 2.0 * static_cast<double>(agreements) / n - 1.0;
  // Agresti-Coull adjusted proportion keeps the error positive when every
  // product has the same sign.
  const double p_adj = (static_cast<double>(agreements) + 2.0) / (n + 4.0);
  out.standard_error = 2.0 * std::sqrt(p_adj * (1.0 - p_adj) / (n + 4.0));
  return out;
}

ChshEstimate estimate_chsh(AnalyzerAngle a, AnalyzerAngle b, AnalyzerAngle c, AnalyzerAngle d,
                           std::size_t n_events, std::uint64_t seed) {
  auto run = [&](AnalyzerAngle x, AnalyzerAngle y, std::uint64_t stream) {
    return std::async(std::launch::async, simulate_twin_photons, x, y, n_events,
                      derive_seed(seed, stream));
  };
  auto ab = run(a, b, 0);
  auto ad = run(a, d, 1);
  auto cd = run(c, d, 2);
  auto cb = run(c, b, 3);
  ChshEstimate out{ab.get(), ad.get(), cd.get(), cb.get(), 0.0, 0.0};
  out.s_hat = chsh_combination({out.ab.p_hat, out.ad.p_hat, out.cd.p_hat, out.cb.p_hat});
  out.standard_error = std::sqrt(out.ab.standard_error * out.ab.standard_error +
                                 out.ad.standard_error * out.ad.standard_error +
                                 out.cd.standard_error * out.cd.standard_error +
                                 out.cb.standard_error * out.cb.standard_error);
  return out;
}

std::array<DeterministicStrategy, 16> deterministic_strategies() {
  std::array<DeterministicStrategy, 16> out{};
  for (int bits = 0; bits < 16; ++bits) {
    auto sign = [bits](int k) { return (bits >> k) & 1 ? -1 : 1; };
    out[static_cast<std::size_t>(bits)] = {sign(0), sign(1), sign(2), sign(3)};
  }
  return out;
}

double strategy_chsh(const DeterministicStrategy& s) {
  return chsh_combination({static_cast<double>(s.a * s.b), static_cast<double>(s.a * s.d),
                           static_cast<double>(s.c * s.d), static_cast<double>(s.c * s.b)});
}

double mixture_chsh(std::span<const double, 16> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidArgument("mixture weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("mixture weights must sum to 1");
  const auto strategies = deterministic_strategies();
  ChshCorrelations p;
  for (std::size_t k = 0; k < strategies.size(); ++k) {
    const auto& s = strategies[k];
    p.ab += weights[k] * s.a * s.b;
    p.ad += weights[k] * s.a * s.d;
    p.cd += weights[k] * s.c * s.d;
    p.cb += weights[k] * s.c * s.b;
  }
  return chsh_combination(p);
}

double deterministic_bound() {
  double best = 0.0;
  for (const auto& s : deterministic_strategies()) best = std::max(best, strategy_chsh(s));
  return best;
}

}  // namespace kepr
