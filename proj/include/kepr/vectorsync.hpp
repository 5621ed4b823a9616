#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "kepr/ensemble.hpp"
#include "kepr/geometry.hpp"

namespace kepr {

/// Rotation about the travel axis (+z) by a fixed angle.
class RotationOperator {
 public:
  explicit RotationOperator(double angle);

  double angle() const { return angle_; }
  Vec3 apply(const Vec3& v) const;
  Vec3 operator()(const Vec3& v) const { return apply(v); }
  RotationOperator inverse() const { return RotationOperator(-angle_); }
  /// (*this) after `inner`.
  RotationOperator compose(const RotationOperator& inner) const;
  /// Row-major 3x3 matrix.
  std::array<std::array<double, 3>, 3> matrix() const;

 private:
  double angle_;
  double cos_;
  double sin_;
};

RotationOperator rotation(double angle);

/// Geometric sequence of analyzer rotation angles theta' (1 + eps + ... + eps^{k-1}).
class EpsilonChain {
 public:
  EpsilonChain(double base_angle, double epsilon, std::size_t length);

  double base_angle() const { return base_angle_; }
  double epsilon() const { return epsilon_; }
  std::size_t length() const { return length_; }

 private:
  double base_angle_;
  double epsilon_;
  std::size_t length_;
};

/// theta' sum_{m<k} eps^m via the closed geometric form; 1 <= k <= length.
double chain_angle(const EpsilonChain& chain, std::size_t k);

/// How L(theta'_N) is evaluated in the resultant vectors.
enum class ChainOrder {
  /// L(theta' + eps theta'), truncated at first order in eps.
  FirstOrder,
  /// The full geometric chain angle at k = N.
  Full,
};

class VectorState {
 public:
  /// The ensemble must carry unit axes in the transverse plane; the chain
  /// length must equal the ensemble size.
  VectorState(OscillatorEnsemble ensemble, EpsilonChain chain, double coupling,
              ChainOrder chain_order = ChainOrder::FirstOrder);

  const OscillatorEnsemble& ensemble() const { return ensemble_; }
  const EpsilonChain& chain() const { return chain_; }
  double coupling() const { return coupling_; }
  ChainOrder chain_order() const { return chain_order_; }

 private:
  OscillatorEnsemble ensemble_;
  EpsilonChain chain_;
  double coupling_;
  ChainOrder chain_order_;
};

struct VectorOrder {
  double r = 0.0;
  Phase phi;
  /// Real unit direction d with S ~ r e^{i phi} d. Undefined when incoherent.
  Vec3 mean_axis;
  /// d rotated back by Lbar(theta')^{-1}: the mean unit frequency axis.
  Vec3 mean_frequency_axis;
  bool incoherent = false;
};

/// Lbar(theta') = L(theta' + eps theta').
RotationOperator mean_rotation(const EpsilonChain& chain);

/// L(theta'_N) under the state's chain order.
RotationOperator final_rotation(const VectorState& state);

/// Decomposes S = (1/N_A) sum_{j in A} e^{i theta_j} L(theta'_j) w_j as
/// r e^{i phi} d with d the real unit vector maximising |S . d|, oriented to
/// have non-negative overlap with the mean rotated axis.
VectorOrder vector_order_parameter(const VectorState& state);

/// Omega_i = L(theta'_N) omega_i w_i + K r sin(phi - theta_i) Lbar(theta') wbar.
std::vector<Vec3> resultant_vectors(const VectorState& state, const VectorOrder& order);

/// Component of each resultant vector along the coupling direction; equals
/// the scalar drift velocity when eps = 0 and the axes are aligned.
std::vector<double> resultant_speeds(const std::vector<Vec3>& resultants, const VectorOrder& order);

/// Transverse unit vector perpendicular to `omega_axis`: z x axis, normalised.
Vec3 polarization_direction(const Vec3& omega_axis);

}  // namespace kepr
