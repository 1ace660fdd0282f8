// Single-qubit Pauli transfer matrix simulation of the RPE circuits.
//
// States are Pauli vectors (1, x, y, z); channels are real 4x4 matrices.
// All matrix builders are templated on the scalar so the same code serves
// double-precision unit tests and the quad-precision probability engine.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "rpe/estimator.hpp"
#include "rpe/quad.hpp"

namespace rpe {

class RandomStream;

template <typename Scalar>
using PauliVector = Eigen::Matrix<Scalar, 4, 1>;

template <typename Scalar>
using Superoperator = Eigen::Matrix<Scalar, 4, 4>;

/// Rotation about x by `theta`.
template <typename Scalar>
Superoperator<Scalar> rx(Scalar theta) {
  using namespace scalar_math;
  const Scalar c = cos(theta);
  const Scalar s = sin(theta);
  Superoperator<Scalar> m = Superoperator<Scalar>::Identity();
  m(2, 2) = c;
  m(2, 3) = -s;
  m(3, 2) = s;
  m(3, 3) = c;
  return m;
}

template <typename Scalar>
Superoperator<Scalar> depolarizing(Scalar b) {
  Superoperator<Scalar> m = Superoperator<Scalar>::Identity();
  m(1, 1) = m(2, 2) = m(3, 3) = Scalar(1) - b;
  return m;
}

/// Dephasing in the x-y plane.
template <typename Scalar>
Superoperator<Scalar> dephasing(Scalar b) {
  Superoperator<Scalar> m = Superoperator<Scalar>::Identity();
  m(1, 1) = m(2, 2) = Scalar(1) - b;
  return m;
}

/// Decay from |1> to |0>.
template <typename Scalar>
Superoperator<Scalar> amplitude_damping(Scalar b) {
  using namespace scalar_math;
  Superoperator<Scalar> m = Superoperator<Scalar>::Identity();
  m(1, 1) = m(2, 2) = sqrt(Scalar(1) - b);
  m(3, 3) = Scalar(1) - b;
  m(3, 0) = b;
  return m;
}

/// G^n · state by binary exponentiation.
template <typename Derived, typename VecDerived>
auto matrix_power_apply(const Eigen::MatrixBase<Derived>& g, std::uint64_t n,
                        const Eigen::MatrixBase<VecDerived>& state) {
  using Scalar = typename Derived::Scalar;
  Superoperator<Scalar> base = g;
  PauliVector<Scalar> out = state;
  while (n != 0) {
    if (n & 1u) out = (base * out).eval();
    n >>= 1;
    if (n != 0) base = (base * base).eval();
  }
  return out;
}

enum class NoiseKind { None, Depolarizing, Dephasing, AmplitudeDamping };

std::string_view noise_kind_name(NoiseKind kind);
/// Accepts none|depol|dephase|ampdamp and the long names.
NoiseKind parse_noise_kind(std::string_view name);

struct SpamConfig {
  double b_spam = 0.0;
  double b_s = 0.0;
};

struct NoiseConfig {
  NoiseKind kind = NoiseKind::None;
  double rate = 0.0;
  SpamConfig spam;

  /// Throws std::invalid_argument if any rate lies outside [0, 1].
  void validate() const;
};

template <typename Scalar>
Superoperator<Scalar> noise_channel(const NoiseConfig& config) {
  const Scalar b(config.rate);
  switch (config.kind) {
    case NoiseKind::None:
      return Superoperator<Scalar>::Identity();
    case NoiseKind::Depolarizing:
      return depolarizing(b);
    case NoiseKind::Dephasing:
      return dephasing(b);
    case NoiseKind::AmplitudeDamping:
      return amplitude_damping(b);
  }
  return Superoperator<Scalar>::Identity();
}

template <typename Scalar>
struct SpamStates {
  PauliVector<Scalar> init;
  PauliVector<Scalar> cosine;
  PauliVector<Scalar> sine;
};

/// Prepared state and the two measured states with SPAM applied: the
/// measured states pass through V_depol(b_spam), and the sine state also
/// through an imperfect π/2 rotation V_depol(b_s)·R_x(b_s).
template <typename Scalar>
SpamStates<Scalar> spam_states(const SpamConfig& spam) {
  const Superoperator<Scalar> v = depolarizing(Scalar(spam.b_spam));
  const PauliVector<Scalar> zero(Scalar(1), Scalar(0), Scalar(0), Scalar(1));
  const PauliVector<Scalar> plus_i(Scalar(1), Scalar(0), Scalar(1), Scalar(0));
  SpamStates<Scalar> out;
  out.init = v * zero;
  out.cosine = v * zero;
  out.sine = v * depolarizing(Scalar(spam.b_s)) * rx(Scalar(spam.b_s)) * plus_i;
  return out;
}

/// Row vector that turns a measured state into its outcome probability,
/// P = ½ (effect · state). The effect is the Pauli vector of the transposed
/// density matrix (y flips sign), which reproduces P_c = (1 + cos Nθ)/2 and
/// P_s = (1 + sin Nθ)/2 for the ideal circuit.
template <typename Scalar>
Eigen::Matrix<Scalar, 1, 4> measurement_effect(const PauliVector<Scalar>& measured) {
  Eigen::Matrix<Scalar, 1, 4> e = measured.transpose();
  e(2) = -e(2);
  return e;
}

/// Exact outcome probabilities of the cosine and sine circuits after
/// (V·R_x(θ))^N. Evaluated in quad precision. Throws std::domain_error if a
/// probability leaves [0, 1] by more than 1e-9.
ProbabilityPair exact_probabilities(const NoiseConfig& config, double theta,
                                    std::uint64_t n);

/// Binomial(M, p) draw from `stream`.
std::int64_t sample_counts(double p, std::int64_t trials, RandomStream& stream);

}  // namespace rpe
