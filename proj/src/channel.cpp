#include "rpe/channel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "rpe/random.hpp"

namespace rpe {

namespace {

constexpr double kProbabilitySlack = 1e-9;

double checked_probability(quad p) {
  const double v = static_cast<double>(p);
  if (!(v >= -kProbabilitySlack && v <= 1.0 + kProbabilitySlack)) {
    throw std::domain_error("channel produced probability " + std::to_string(v));
  }
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace

std::string_view noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::None:
      return "none";
    case NoiseKind::Depolarizing:
      return "depol";
    case NoiseKind::Dephasing:
      return "dephase";
    case NoiseKind::AmplitudeDamping:
      return "ampdamp";
  }
  return "none";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "none") return NoiseKind::None;
  if (name == "depol" || name == "depolarizing") return NoiseKind::Depolarizing;
  if (name == "dephase" || name == "dephasing") return NoiseKind::Dephasing;
  if (name == "ampdamp" || name == "amplitude_damping") return NoiseKind::AmplitudeDamping;
  throw std::invalid_argument("unknown noise model '" + std::string(name) + "'");
}

void NoiseConfig::validate() const {
  for (double b : {rate, spam.b_spam, spam.b_s}) {
    if (!(b >= 0.0 && b <= 1.0)) {
      throw std::invalid_argument("noise rates must lie in [0, 1]");
    }
  }
}

ProbabilityPair exact_probabilities(const NoiseConfig& config, double theta,
                                    std::uint64_t n) {
  config.validate();
  if (n < 1) throw std::invalid_argument("N must be >= 1");
  const SpamStates<quad> spam = spam_states<quad>(config.spam);
  const Superoperator<quad> gate = noise_channel<quad>(config) * rx(static_cast<quad>(theta));
  const PauliVector<quad> evolved = matrix_power_apply(gate, n, spam.init);
  const quad half = 0.5Q;
  return {checked_probability(half * (measurement_effect(spam.cosine) * evolved)(0)),
          checked_probability(half * (measurement_effect(spam.sine) * evolved)(0))};
}

std::int64_t sample_counts(double p, std::int64_t trials, RandomStream& stream) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (p == 0.0) return 0;
  if (p == 1.0) return trials;
  std::binomial_distribution<std::int64_t> draw(trials, p);
  return draw(stream.engine());
}

}  // namespace rpe
