#include "rpe/estimator.hpp"

#include <cmath>
#include <string>

#include "rpe/quad.hpp"

namespace rpe {

GenerationSequence::GenerationSequence(std::vector<std::uint64_t> lengths)
    : lengths_(std::move(lengths)) {
  for (std::size_t k = 0; k < lengths_.size(); ++k) {
    if (lengths_[k] == 0) {
      throw std::invalid_argument("generation lengths must be positive");
    }
    if (k > 0 && lengths_[k] <= lengths_[k - 1]) {
      throw std::invalid_argument("generation lengths must strictly increase");
    }
  }
}

GenerationSequence GenerationSequence::powers_of_two(std::size_t k_max) {
  if (k_max > 62) throw std::invalid_argument("k_max too large for 2^k");
  std::vector<std::uint64_t> n(k_max + 1);
  for (std::size_t k = 0; k <= k_max; ++k) n[k] = std::uint64_t{1} << k;
  return GenerationSequence(std::move(n));
}

GenerationSequence GenerationSequence::bootstrapped_thirds(std::size_t compared) {
  if (compared > 61) throw std::invalid_argument("sequence too long");
  std::vector<std::uint64_t> n{1};
  for (std::size_t i = 0; i < compared; ++i) {
    n.push_back(i == 0 ? 2 : 3 * (std::uint64_t{1} << (i - 1)));
  }
  return GenerationSequence(std::move(n));
}

void GenerationData::validate() const {
  if (length == 0) throw std::invalid_argument("generation length must be >= 1");
  for (const Counts* c : {&cosine, &sine}) {
    if (c->trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (c->successes < 0 || c->successes > c->trials) {
      throw std::invalid_argument("successes must lie in [0, trials]");
    }
  }
}

ProbabilityPair probabilities(const GenerationData& data) {
  data.validate();
  return {static_cast<double>(data.cosine.successes) / data.cosine.trials,
          static_cast<double>(data.sine.successes) / data.sine.trials};
}

CandidateSet::CandidateSet(std::uint64_t length, Angle base)
    : length_(length), base_(base) {
  if (length == 0) throw std::invalid_argument("candidate set needs N >= 1");
}

Angle CandidateSet::candidate(std::uint64_t n) const {
  quad x = (static_cast<quad>(base_.radians()) + kQuadTwoPi * static_cast<quad>(n)) /
           static_cast<quad>(length_);
  return Angle(static_cast<double>(fmodq(x, kQuadTwoPi)));
}

CandidateSet candidate_set(double p_cosine, double p_sine, std::uint64_t length) {
  if (!(p_cosine >= 0.0 && p_cosine <= 1.0 && p_sine >= 0.0 && p_sine <= 1.0)) {
    throw std::invalid_argument("probabilities must lie in [0, 1]");
  }
  const double x = 2.0 * p_cosine - 1.0;
  const double y = 2.0 * p_sine - 1.0;
  if (std::fabs(x) <= kAngleTolerance && std::fabs(y) <= kAngleTolerance) {
    throw DegenerateCandidates("zero Bloch vector at N = " + std::to_string(length));
  }
  return CandidateSet(length, Angle(std::atan2(y, x)));
}

double candidate_dist(Angle theta, const CandidateSet& set) {
  const Angle scaled(scaled_phase(set.length(), theta.radians()));
  return dist(scaled, set.base()) / static_cast<double>(set.length());
}

NearestCandidate candidate_nearest(Angle theta, const CandidateSet& set) {
  const Angle scaled(scaled_phase(set.length(), theta.radians()));
  double delta = signed_delta(scaled, set.base());
  bool tie = false;
  if (std::fabs(delta) >= kPi - kAngleTolerance) {
    tie = true;
    delta = kPi;
  }
  return {Angle(theta.radians() + delta / static_cast<double>(set.length())), tie};
}

RpeEstimates run_rpe(std::span<const CandidateSet> candidates) {
  RpeEstimates out;
  if (candidates.empty()) return out;
  if (candidates[0].length() != 1) {
    throw std::invalid_argument("the first generation must have N = 1");
  }
  out.estimates.reserve(candidates.size());
  out.estimates.push_back(candidates[0].base());
  for (std::size_t k = 1; k < candidates.size(); ++k) {
    if (candidates[k].length() <= candidates[k - 1].length()) {
      throw std::invalid_argument("generation lengths must strictly increase");
    }
    NearestCandidate next = candidate_nearest(out.estimates.back(), candidates[k]);
    if (next.tie) out.ties.push_back(k);
    out.estimates.push_back(next.angle);
  }
  return out;
}

RpeRun analyze(std::span<const GenerationData> generations) {
  RpeRun run;
  run.generations.assign(generations.begin(), generations.end());
  run.lengths.reserve(generations.size());
  for (const GenerationData& g : generations) run.lengths.push_back(g.length);
  GenerationSequence(run.lengths);  // validates ordering

  for (std::size_t k = 0; k < generations.size(); ++k) {
    ProbabilityPair p = probabilities(generations[k]);
    try {
      run.candidates.push_back(candidate_set(p.cosine, p.sine, generations[k].length));
    } catch (const DegenerateCandidates&) {
      run.degenerate_at = k;
      break;
    }
    run.bloch_cos.push_back(2.0 * p.cosine - 1.0);
    run.bloch_sin.push_back(2.0 * p.sine - 1.0);
  }
  RpeEstimates est = run_rpe(run.candidates);
  run.estimates = std::move(est.estimates);
  run.ties = std::move(est.ties);
  return run;
}

RpeRun RpeRun::without_prefix(std::size_t count) const {
  RpeRun out;
  auto drop = [count](const auto& v) {
    using V = std::decay_t<decltype(v)>;
    return count >= v.size() ? V{} : V(v.begin() + count, v.end());
  };
  out.lengths = drop(lengths);
  out.generations = drop(generations);
  out.candidates = drop(candidates);
  out.estimates = drop(estimates);
  out.bloch_cos = drop(bloch_cos);
  out.bloch_sin = drop(bloch_sin);
  for (std::size_t t : ties) {
    if (t >= count) out.ties.push_back(t - count);
  }
  if (degenerate_at) {
    out.degenerate_at = *degenerate_at >= count ? *degenerate_at - count : 0;
  }
  return out;
}

RpeRun RpeRun::from_estimates(std::span<const std::uint64_t> lengths,
                              std::span<const Angle> estimates) {
  if (estimates.size() > lengths.size()) {
    throw std::invalid_argument("more estimates than generations");
  }
  RpeRun run;
  run.lengths.assign(lengths.begin(), lengths.end());
  GenerationSequence(run.lengths);
  run.estimates.assign(estimates.begin(), estimates.end());
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    const double phase = scaled_phase(lengths[k], estimates[k].radians());
    run.candidates.emplace_back(lengths[k], Angle(phase));
    run.bloch_cos.push_back(std::cos(phase));
    run.bloch_sin.push_back(std::sin(phase));
  }
  return run;
}

PolarForm polar_reparam(double p_cosine, double p_sine) {
  if (!(p_cosine >= 0.0 && p_cosine <= 1.0 && p_sine >= 0.0 && p_sine <= 1.0)) {
    throw std::invalid_argument("probabilities must lie in [0, 1]");
  }
  const double x = 2.0 * p_cosine - 1.0;
  const double y = 2.0 * p_sine - 1.0;
  PolarForm out{std::hypot(x, y), std::nullopt};
  if (out.radius > 0.0) out.phase = Angle(std::atan2(y, x));
  return out;
}

std::optional<std::size_t> actual_failure_generation(
    std::span<const Angle> estimates, Angle truth,
    std::span<const std::uint64_t> lengths) {
  if (estimates.size() > lengths.size()) {
    throw std::invalid_argument("more estimates than generations");
  }
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    if (dist(estimates[k], truth) >= kPi / static_cast<double>(lengths[k])) return k;
  }
  return std::nullopt;
}

}  // namespace rpe
