// The seven consistency criteria for an RPE run.
//
// Each check walks the generations in order and reports the first one at
// which its criterion is violated. Running intersections use a tolerance of
// kAngleTolerance / N_k at generation k, so the criteria stay meaningful once
// arc widths fall below the absolute tolerance.
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rpe/circle.hpp"
#include "rpe/estimator.hpp"

namespace rpe {

enum class Criterion {
  Plausible = 1,
  Consecutive = 2,
  Local = 3,
  UniformLocal = 4,
  AngularHistorical = 5,
  ProbabilityHistorical = 6,
  Intersequence = 7,
};

inline constexpr std::array<Criterion, 7> kAllCriteria = {
    Criterion::Plausible,         Criterion::Consecutive,
    Criterion::Local,             Criterion::UniformLocal,
    Criterion::AngularHistorical, Criterion::ProbabilityHistorical,
    Criterion::Intersequence};

/// snake_case identifier used in files and tables.
std::string_view criterion_name(Criterion c);
std::optional<Criterion> criterion_from_name(std::string_view name);

/// Per-generation angular error bounds δθ_k.
class DeltaSchedule {
 public:
  DeltaSchedule() = default;
  explicit DeltaSchedule(std::vector<double> deltas);

  std::span<const double> deltas() const { return deltas_; }
  double operator[](std::size_t k) const { return deltas_[k]; }
  std::size_t size() const { return deltas_.size(); }

  /// δθ_k/N_k + δθ_{k-1}/N_{k-1} <= π/N_k for every k >= 1 (with a relative
  /// slack of 1e-12 for rounding).
  bool is_valid_for(std::span<const std::uint64_t> lengths) const;

 private:
  std::vector<double> deltas_;
};

/// δθ_k = π / (1 + N_k/N_{k-1}); δθ_0 copies δθ_1 (π/3 for a single
/// generation). Only geometric sequences meet the local bound with equality;
/// other sequences can produce an invalid schedule.
DeltaSchedule uniform_schedule(std::span<const std::uint64_t> lengths);

struct ConsistencyVerdict {
  Criterion criterion;
  /// First violating generation, or nullopt if the criterion holds throughout.
  std::optional<std::size_t> flagged;
  /// Last nonempty running intersection, for interval-based criteria.
  std::optional<Arc> witness;
};

ConsistencyVerdict plausible_check(const RpeRun& run);
ConsistencyVerdict consecutive_check(const RpeRun& run);

/// Throws std::invalid_argument if the schedule violates the local bound or
/// is shorter than the run.
ConsistencyVerdict local_check(const RpeRun& run, const DeltaSchedule& schedule,
                               Criterion label = Criterion::Local);

/// The arc Λ_k ∩ Φ_k: the short arc joining θ̂_{k-1} and θ̂_k expanded by
/// D_k = π/(2N_k) - |θ̂_k - θ̂_{k-1}|/2, or Empty when D_k < 0.
Arc consecutive_arc(Angle previous, Angle current, std::uint64_t length);

/// Membership mode when `width` is empty: flag the first k with θ̂_k outside
/// the running intersection of Δ arcs. Length mode otherwise: flag the first
/// k whose running intersection is no longer than width/N_k.
ConsistencyVerdict angular_historical_check(const RpeRun& run,
                                            const DeltaSchedule& schedule,
                                            std::optional<double> width = {});

/// Flags the first k at which the probabilities predicted by θ̂_k disagree
/// with those measured at some earlier generation k' by more than
/// sin(δθ_k)/√2 in either the cosine or sine component.
ConsistencyVerdict probability_historical_check(const RpeRun& run,
                                                const DeltaSchedule& schedule);

/// Compares two runs index by index; flags the first k with
/// |θ̂_k - θ̂'_k| > 2π/N_k. Requires equal sequence sizes and N_k < N'_k.
ConsistencyVerdict intersequence_check(const RpeRun& run, const RpeRun& other);

/// Bound on per-generation probability error implied by δθ.
double probability_error_bound(double delta);

/// Whether the false angle 2π·2^{-j}/3 survives every generation k <= k_max
/// of the set formulation with error allowance 2πα, i.e.
/// |F(2^{k-j}/3) - 1/2| > 1/2 - 2α. Requires 1/6 < α <= 1/2.
bool set_formulation_witness(unsigned j, double alpha, unsigned k_max);

struct ReportOptions {
  /// Defaults to the uniform schedule of the primary run.
  std::optional<DeltaSchedule> schedule;
  /// Angular-historical length-mode width L; membership mode when empty.
  std::optional<double> width;
};

struct ConsistencyReport {
  std::size_t k_max = 0;
  std::vector<ConsistencyVerdict> verdicts;
  std::optional<std::size_t> actual_failure;
  bool truth_known = false;

  /// Verdict for a criterion, if it was evaluated.
  const ConsistencyVerdict* find(Criterion c) const;
  /// Flag with "never" recorded as k_max + 1.
  std::size_t recorded_flag(Criterion c) const;
  /// Actual failure with "never" recorded as k_max + 1.
  std::size_t recorded_actual() const;
  /// recorded_flag - recorded_actual; positive means the check flagged late.
  long discrepancy(Criterion c) const;
};

/// Evaluates every applicable criterion. A degenerate generation counts as a
/// violation of every criterion (and as the actual failure) at that index.
/// `secondary` should already have its uncompared prefix removed.
ConsistencyReport report(const RpeRun& run, const RpeRun* secondary,
                         std::optional<Angle> truth,
                         const ReportOptions& options = {});

}  // namespace rpe
