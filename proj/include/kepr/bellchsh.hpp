#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace kepr {

/// Analyzer orientation. Degrees at the I/O boundary, radians internally.
class AnalyzerAngle {
 public:
  static AnalyzerAngle degrees(double deg);
  static AnalyzerAngle radians(double rad);

  double degrees() const;
  double radians() const { return radians_; }

 private:
  explicit AnalyzerAngle(double rad) : radians_(rad) {}
  double radians_;
};

/// Correlations in CHSH order: P(a,b), P(a,d), P(c,d), P(c,b).
struct ChshCorrelations {
  double ab = 0.0;
  double ad = 0.0;
  double cd = 0.0;
  double cb = 0.0;
};

/// |P(a,b) - P(a,d)| + |P(c,d) + P(c,b)|, no clipping.
double chsh_combination(const ChshCorrelations& p);

struct ChshScenario {
  AnalyzerAngle a = AnalyzerAngle::radians(0.0);
  AnalyzerAngle b = AnalyzerAngle::radians(0.0);
  AnalyzerAngle c = AnalyzerAngle::radians(0.0);
  AnalyzerAngle d = AnalyzerAngle::radians(0.0);
  ChshCorrelations correlations;
  double s = 0.0;
};

/// Fraction cos^2(phi) of linearly polarised light passed by an analyzer.
double malus_transmission(double phi);

/// P(a, b) = cos 2(b - a).
double correlation(AnalyzerAngle a, AnalyzerAngle b);

double chsh_value(AnalyzerAngle a, AnalyzerAngle b, AnalyzerAngle c, AnalyzerAngle d);

ChshScenario make_scenario(AnalyzerAngle a, AnalyzerAngle b, AnalyzerAngle c, AnalyzerAngle d);

struct McEstimate {
  std::size_t n_events = 0;
  double p_hat = 0.0;
  double standard_error = 0.0;
  std::uint64_t seed = 0;
};

/// Monte Carlo estimate of P(a, b). Each event draws a shared polarization
/// lambda ~ U[0, pi); Alice passes (+1) with probability cos^2(a - lambda).
/// Bob's photon polarization collapses to a (Alice +1) or a + 90 deg
/// (Alice -1) and Bob passes with probability cos^2(b - pol).
McEstimate simulate_twin_photons(AnalyzerAngle a, AnalyzerAngle b, std::size_t n_events,
                                 std::uint64_t seed);

struct ChshEstimate {
  McEstimate ab;
  McEstimate ad;
  McEstimate cd;
  McEstimate cb;
  double s_hat = 0.0;
  /// Quadrature sum of the four pair standard errors.
  double standard_error = 0.0;
};

/// Runs the four pairs concurrently with seeds derived from `seed`.
ChshEstimate estimate_chsh(AnalyzerAngle a, AnalyzerAngle b, AnalyzerAngle c, AnalyzerAngle d,
                           std::size_t n_events, std::uint64_t seed);

/// A local deterministic strategy: outcomes A(a), A(c), B(b), B(d) in {-1, +1}.
struct DeterministicStrategy {
  int a = 1;
  int c = 1;
  int b = 1;
  int d = 1;
};

/// All 16 deterministic strategies, in binary order.
std::array<DeterministicStrategy, 16> deterministic_strategies();

double strategy_chsh(const DeterministicStrategy& s);

/// CHSH combination of a convex mixture; weights must be non-negative and
/// sum to 1 within 1e-12.
double mixture_chsh(std::span<const double, 16> weights);

/// Brute-force maximum of the CHSH combination over all deterministic strategies.
double deterministic_bound();

}  // namespace kepr
