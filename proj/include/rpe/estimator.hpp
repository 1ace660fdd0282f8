// Robust phase estimation: candidate sets and the nearest-candidate
// selection loop.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rpe/circle.hpp"

namespace rpe {

/// Raised when both Bloch components are zero and arctan2 is undefined.
class DegenerateCandidates : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Strictly increasing repetition counts N_0 < N_1 < ... .
class GenerationSequence {
 public:
  GenerationSequence() = default;
  /// Throws std::invalid_argument unless the lengths are positive and
  /// strictly increasing.
  explicit GenerationSequence(std::vector<std::uint64_t> lengths);

  /// N_k = 2^k for k = 0..k_max.
  static GenerationSequence powers_of_two(std::size_t k_max);
  /// The cross-check sequence: an uncompared N = 1 bootstrap, then 2, 3, 6,
  /// 12, ..., 3·2^(i-1). `compared` is the number of generations after the
  /// bootstrap.
  static GenerationSequence bootstrapped_thirds(std::size_t compared);

  std::span<const std::uint64_t> lengths() const { return lengths_; }
  std::uint64_t operator[](std::size_t k) const { return lengths_[k]; }
  std::size_t size() const { return lengths_.size(); }
  bool starts_at_one() const { return !lengths_.empty() && lengths_[0] == 1; }

  friend bool operator==(const GenerationSequence&,
                         const GenerationSequence&) = default;

 private:
  std::vector<std::uint64_t> lengths_;
};

struct Counts {
  std::int64_t successes = 0;
  std::int64_t trials = 0;

  friend bool operator==(const Counts&, const Counts&) = default;
};

/// Measurement record of one generation.
struct GenerationData {
  std::uint64_t length = 1;
  Counts cosine;
  Counts sine;

  /// Throws std::invalid_argument on zero trials or out-of-range successes.
  void validate() const;

  friend bool operator==(const GenerationData&, const GenerationData&) = default;
};

struct ProbabilityPair {
  double cosine = 0.5;
  double sine = 0.5;
};

ProbabilityPair probabilities(const GenerationData& data);

/// The N equally spaced angles {(base + 2πn)/N : 0 <= n < N}, stored
/// implicitly. `base` is the generation's measured phase N·θ mod 2π.
class CandidateSet {
 public:
  CandidateSet(std::uint64_t length, Angle base);

  std::uint64_t length() const { return length_; }
  Angle base() const { return base_; }
  /// The n-th candidate. O(1); only used for enumeration in tests and tools.
  Angle candidate(std::uint64_t n) const;

 private:
  std::uint64_t length_;
  Angle base_;
};

/// Θ for measured probabilities. Throws DegenerateCandidates when both
/// 2P_c - 1 and 2P_s - 1 vanish.
CandidateSet candidate_set(double p_cosine, double p_sine, std::uint64_t length);

/// d(θ, Θ) = dist(Nθ, base) / N, in [0, π/N].
double candidate_dist(Angle theta, const CandidateSet& set);

struct NearestCandidate {
  Angle angle;
  /// θ sat on the midpoint between two candidates; the counterclockwise one
  /// was chosen.
  bool tie = false;
};

NearestCandidate candidate_nearest(Angle theta, const CandidateSet& set);

struct RpeEstimates {
  std::vector<Angle> estimates;
  /// Generations at which the selection was a midpoint tie.
  std::vector<std::size_t> ties;
};

/// Nearest-candidate selection chain. Requires candidates[0].length() == 1
/// and strictly increasing lengths.
RpeEstimates run_rpe(std::span<const CandidateSet> candidates);

/// One analysed RPE run.
///
/// `lengths` always covers the full sequence. The per-generation vectors
/// (`candidates`, `estimates`, `bloch_cos`, `bloch_sin`) stop early when a
/// degenerate generation was hit; `degenerate_at` then names it.
struct RpeRun {
  std::vector<std::uint64_t> lengths;
  std::vector<GenerationData> generations;
  std::vector<CandidateSet> candidates;
  std::vector<Angle> estimates;
  /// Measured 2P_c - 1 and 2P_s - 1 per generation.
  std::vector<double> bloch_cos;
  std::vector<double> bloch_sin;
  std::vector<std::size_t> ties;
  std::optional<std::size_t> degenerate_at;

  /// Number of generations with an estimate.
  std::size_t size() const { return estimates.size(); }
  /// Index of the last generation in the full sequence.
  std::size_t k_max() const { return lengths.empty() ? 0 : lengths.size() - 1; }

  /// Drops the first `count` generations (e.g. an uncompared bootstrap).
  /// Estimates are kept as selected by the full chain.
  RpeRun without_prefix(std::size_t count) const;

  /// A run built directly from selected estimates, as if every generation
  /// had measured its candidate phase exactly (unit Bloch length).
  static RpeRun from_estimates(std::span<const std::uint64_t> lengths,
                               std::span<const Angle> estimates);
};

/// Candidate sets + selection for recorded data. Requires lengths[0] == 1.
RpeRun analyze(std::span<const GenerationData> generations);

struct PolarForm {
  double radius = 0.0;
  /// Undefined when the radius is zero.
  std::optional<Angle> phase;
};

/// (2P_c - 1, 2P_s - 1) = λ(cos φ, sin φ).
PolarForm polar_reparam(double p_cosine, double p_sine);

/// Smallest k with |θ̂_k - θ|_2π >= π/N_k, if any.
std::optional<std::size_t> actual_failure_generation(
    std::span<const Angle> estimates, Angle truth,
    std::span<const std::uint64_t> lengths);

}  // namespace rpe
