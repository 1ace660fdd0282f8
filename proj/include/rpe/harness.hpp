// Monte Carlo driver: simulate many noisy RPE runs, evaluate every
// consistency criterion against the known angle, and aggregate the
// flagged-minus-actual discrepancies.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpe/channel.hpp"
#include "rpe/checks.hpp"
#include "rpe/estimator.hpp"

namespace rpe {

struct ExperimentConfig {
  double angle = 1.6;
  NoiseConfig noise{NoiseKind::Depolarizing, 0.0, {1e-2, 1e-2}};
  std::int64_t samples = 1000;
  /// N_k = 2^k, k = 0..45.
  GenerationSequence primary = GenerationSequence::powers_of_two(45);
  /// N = 1 (uncompared), then 2, 3, 6, ..., one compared generation per
  /// primary generation.
  GenerationSequence secondary = GenerationSequence::bootstrapped_thirds(46);
  std::size_t secondary_bootstrap = 1;
  bool with_secondary = true;
  std::size_t runs = 200;
  std::uint64_t seed = 0;
  /// Worker threads; 0 means hardware concurrency. Never affects results.
  unsigned workers = 0;

  /// Resets both sequences to the default shapes with primary k_max.
  void set_k_max(std::size_t k_max);
  std::size_t k_max() const { return primary.size() - 1; }
  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  /// Short stable hex digest of every field that affects results.
  std::string digest() const;
};

struct SimulatedRuns {
  RpeRun primary;
  /// Full secondary run, bootstrap generation included.
  std::optional<RpeRun> secondary;
  /// Leading secondary generations excluded from comparison.
  std::size_t secondary_bootstrap = 1;
};

/// Exact probabilities are computed once per configuration; each run then
/// only samples counts. Streams are keyed by (seed, run, sequence,
/// generation, circuit).
class ExperimentPlan {
 public:
  explicit ExperimentPlan(const ExperimentConfig& config);

  const ExperimentConfig& config() const { return config_; }
  SimulatedRuns simulate(std::uint64_t run_index) const;
  std::span<const ProbabilityPair> primary_probabilities() const { return primary_probs_; }

 private:
  std::vector<GenerationData> sample(const GenerationSequence& seq,
                                     std::span<const ProbabilityPair> probs,
                                     std::uint64_t run_index,
                                     std::uint64_t sequence_tag) const;

  ExperimentConfig config_;
  std::vector<ProbabilityPair> primary_probs_;
  std::vector<ProbabilityPair> secondary_probs_;
};

SimulatedRuns simulate_run(const ExperimentConfig& config, std::uint64_t run_index);

/// Everything the sweeps need from one run, as recorded generation indices
/// ("never" is k_max + 1).
struct RunOutcome {
  std::size_t k_max = 0;
  std::size_t actual = 0;
  bool failed = false;
  std::array<std::optional<std::size_t>, 7> flags{};
  /// Angular-historical length-mode flags, one per requested width.
  std::vector<std::size_t> width_flags;

  std::optional<long> discrepancy(Criterion c) const;
};

RunOutcome evaluate_run(const SimulatedRuns& runs, double angle,
                        std::span<const double> widths = {});

/// All runs of one configuration, in run-index order.
std::vector<RunOutcome> evaluate_runs(const ExperimentConfig& config,
                                      std::span<const double> widths = {});

struct SweepSeries {
  double axis_value = 0.0;
  std::string label;
  std::map<long, std::size_t> histogram;
  double mean = 0.0;
  std::size_t runs = 0;
};

struct SweepResult {
  std::string axis_name;
  std::vector<SweepSeries> series;
  std::size_t runs = 0;
  std::uint64_t seed = 0;
  std::string config_digest;

  const SweepSeries* find(double axis_value, std::string_view label) const;
};

/// b = 2^-2 ... 2^-10.
std::vector<double> default_error_rates();
/// π/6, π/4, π/3, 5π/12, π/2.
std::vector<double> default_widths();

SweepResult error_rate_sweep(const ExperimentConfig& config, std::span<const double> rates);
SweepResult angle_sweep(const ExperimentConfig& config, std::span<const double> angles);
/// Angular-historical discrepancy per width (length mode) per error rate.
/// Series labels are "angular_historical@L=<width>".
SweepResult interval_width_sweep(const ExperimentConfig& config,
                                 std::span<const double> widths,
                                 std::span<const double> rates);

std::string width_label(double width);

}  // namespace rpe
