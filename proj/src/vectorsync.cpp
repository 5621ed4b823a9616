#include "kepr/vectorsync.hpp"

#include <cmath>
#include <sstream>

#include "kepr/errors.hpp"

namespace kepr {

RotationOperator::RotationOperator(double angle)
    : angle_(angle), cos_(std::cos(angle)), sin_(std::sin(angle)) {
  if (!std::isfinite(angle)) throw InvalidArgument("rotation angle must be finite");
}

Vec3 RotationOperator::apply(const Vec3& v) const {
  return {cos_ * v.x - sin_ * v.y, sin_ * v.x + cos_ * v.y, v.z};
}

RotationOperator RotationOperator::compose(const RotationOperator& inner) const {
  return RotationOperator(angle_ + inner.angle_);
}

std::array<std::array<double, 3>, 3> RotationOperator::matrix() const {
  return {{{cos_, -sin_, 0.0}, {sin_, cos_, 0.0}, {0.0, 0.0, 1.0}}};
}

RotationOperator rotation(double angle) { return RotationOperator(angle); }

EpsilonChain::EpsilonChain(double base_angle, double epsilon, std::size_t length)
    : base_angle_(base_angle), epsilon_(epsilon), length_(length) {
  if (!std::isfinite(base_angle)) throw InvalidArgument("chain base angle must be finite");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw InvalidArgument("chain epsilon must lie in [0, 1)");
  if (length == 0) throw InvalidArgument("chain length must be positive");
}

double chain_angle(const EpsilonChain& chain, std::size_t k) {
  if (k < 1 || k > chain.length()) {
    std::ostringstream msg;
    msg << "chain index " << k << " outside [1, " << chain.length() << "]";
    throw InvalidArgument(msg.str());
  }
  const double eps = chain.epsilon();
  if (eps == 0.0) return chain.base_angle();
  // (1 - eps^k) / (1 - eps)
  const double factor = -std::expm1(static_cast<double>(k) * std::log(eps)) / (1.0 - eps);
  return chain.base_angle() * factor;
}

VectorState::VectorState(OscillatorEnsemble ensemble, EpsilonChain chain, double coupling,
                         ChainOrder chain_order)
    : ensemble_(std::move(ensemble)), chain_(chain), coupling_(coupling), chain_order_(chain_order) {
  if (!ensemble_.has_axes()) throw InvalidArgument("vector state needs unit axes");
  if (chain_.length() != ensemble_.size()) {
    throw InvalidArgument("chain length must equal the number of oscillators");
  }
  if (!(coupling >= 0.0) || !std::isfinite(coupling)) throw InvalidArgument("coupling K must be >= 0");
  for (const Vec3& axis : ensemble_.unit_axes()) {
    if (std::abs(axis.z) > 1e-12) throw InvalidArgument("unit axes must lie in the transverse plane");
  }
}

RotationOperator mean_rotation(const EpsilonChain& chain) {
  return rotation(chain.base_angle() * (1.0 + chain.epsilon()));
}

RotationOperator final_rotation(const VectorState& state) {
  const EpsilonChain& chain = state.chain();
  if (state.chain_order() == ChainOrder::Full) return rotation(chain_angle(chain, chain.length()));
  return mean_rotation(chain);
}

namespace {

// Top eigenvector of the symmetric 2x2 matrix [[a, b], [b, c]].
std::pair<double, double> top_eigenvector(double a, double b, double c) {
  const double half_diff = 0.5 * (a - c);
  const double lambda = 0.5 * (a + c) + std::hypot(half_diff, b);
  if (a >= c) return {lambda - c, b};
  return {b, lambda - a};
}

}  // namespace

VectorOrder vector_order_parameter(const VectorState& state) {
  const OscillatorEnsemble& ens = state.ensemble();
  const auto& phases = ens.phases();
  const auto& axes = ens.unit_axes();
  const auto& sides = ens.sides();

  Vec3 re_sum;
  Vec3 im_sum;
  Vec3 axis_sum;
  std::size_t count = 0;
  for (std::size_t j = 0; j < ens.size(); ++j) {
    if (sides[j] != Side::A) continue;
    const Vec3 rotated = rotation(chain_angle(state.chain(), j + 1)).apply(axes[j]);
    const double theta = phases[j].value();
    re_sum += std::cos(theta) * rotated;
    im_sum += std::sin(theta) * rotated;
    axis_sum += rotated;
    ++count;
  }
  if (count == 0) throw InvalidArgument("vector order parameter needs at least one A-side oscillator");
  const double inv = 1.0 / static_cast<double>(count);
  const Vec3 re = inv * re_sum;
  const Vec3 im = inv * im_sum;

  VectorOrder out;
  const double gram_rr = dot(re, re);
  const double gram_ri = dot(re, im);
  const double gram_ii = dot(im, im);
  if (std::sqrt(gram_rr + gram_ii) < 1e-14) {
    out.incoherent = true;
    return out;
  }

  // The maximiser of |S.d|^2 = (Re S.d)^2 + (Im S.d)^2 lies in span{Re S, Im S}.
  const auto [p, q] = top_eigenvector(gram_rr, gram_ri, gram_ii);
  Vec3 direction = p * re + q * im;
  direction *= 1.0 / norm(direction);

  Vec3 reference = axis_sum;
  if (norm(reference) < 1e-14) reference = re;
  if (dot(direction, reference) < 0.0) direction = -direction;

  const double proj_re = dot(re, direction);
  const double proj_im = dot(im, direction);
  out.r = std::min(std::hypot(proj_re, proj_im), 1.0);
  out.phi = Phase(std::atan2(proj_im, proj_re));
  out.mean_axis = direction;
  out.mean_frequency_axis = mean_rotation(state.chain()).inverse().apply(direction);
  return out;
}

std::vector<Vec3> resultant_vectors(const VectorState& state, const VectorOrder& order) {
  const OscillatorEnsemble& ens = state.ensemble();
  const RotationOperator carrier = final_rotation(state);
  // Lbar(theta') wbar is the coupling direction d itself.
  const Vec3 coupling_dir = mean_rotation(state.chain()).apply(order.mean_frequency_axis);
  const double k_r = order.incoherent ? 0.0 : state.coupling() * order.r;

  std::vector<Vec3> out(ens.size());
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const Vec3 natural = ens.frequencies()[i] * ens.unit_axes()[i];
    const double pull = k_r * std::sin(order.phi.value() - ens.phases()[i].value());
    out[i] = carrier.apply(natural) + pull * coupling_dir;
  }
  return out;
}

std::vector<double> resultant_speeds(const std::vector<Vec3>& resultants, const VectorOrder& order) {
  if (order.incoherent) throw InvalidArgument("coupling direction undefined for an incoherent state");
  std::vector<double> out(resultants.size());
  for (std::size_t i = 0; i < resultants.size(); ++i) out[i] = dot(resultants[i], order.mean_axis);
  return out;
}

Vec3 polarization_direction(const Vec3& omega_axis) {
  const Vec3 perp = cross(Vec3{0.0, 0.0, 1.0}, omega_axis);
  const double len = norm(perp);
  if (!(len > 1e-12)) throw InvalidArgument("axis parallel to the travel axis has no transverse polarization");
  return (1.0 / len) * perp;
}

}  // namespace kepr
