// Brute-force cross-checks of the interval algorithms.
//
// Every set the checks represent as an arc is re-evaluated pointwise on a
// uniform grid of the circle straight from its distance-based definition.
// A disagreement is reported together with a replayable run record.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rpe/circle.hpp"
#include "rpe/estimator.hpp"
#include "rpe/record.hpp"

namespace rpe {

/// d(x, Θ) for Θ = {(base + 2πn)/N}, computed in plain double arithmetic.
/// Only meant for moderate N.
double grid_candidate_dist(double x, std::uint64_t n, double base);

struct OracleViolation {
  std::string check;
  std::uint64_t instance = 0;
  std::string detail;
  /// Run that reproduces the violation, when the instance was a run.
  std::optional<RunRecord> record;
};

struct OracleCheckResult {
  std::string name;
  std::size_t instances = 0;
  std::size_t violations = 0;
  std::optional<OracleViolation> first;

  bool passed() const { return violations == 0; }
};

/// Nested running intersections on the grid, ∩Δ ⊆ ∩Λ ⊆ ∩Φ, plus the flag
/// order local <= consecutive <= plausible, and agreement between each
/// check's flag and grid points that survive its running intersection.
OracleCheckResult hierarchy_oracle(std::size_t instances, std::size_t grid, std::uint64_t seed);

/// The expanded-arc formula for Λ_k ∩ Φ_k against grid membership on random
/// (θ̂_{k-1}, θ̂_k, N_k) triples. Mismatches within one grid cell of the arc
/// boundary are tolerated.
OracleCheckResult consecutive_arc_oracle(std::size_t instances, std::size_t grid,
                                         std::uint64_t seed);

/// Membership and length (L = π/3) modes of the angular-historical check
/// agree on random runs with N_k = 2^k and the uniform schedule.
OracleCheckResult historical_modes_oracle(std::size_t instances, std::uint64_t seed);

/// The false angles 2π·2^{-j}/3, j = 0..5, survive the set formulation up to
/// k = 25 with α = 0.17.
OracleCheckResult witness_oracle();

struct OracleSuiteOptions {
  std::size_t instances = 1000;
  /// Cells per 2π for the hierarchy check.
  std::size_t grid = 10000;
  /// Cells per 2π for the arc-formula check (finer: its arcs are tiny).
  std::size_t arc_grid = 100000;
  std::uint64_t seed = 0;
};

std::vector<OracleCheckResult> run_oracle_suite(const OracleSuiteOptions& options);

/// A randomized noisy run: random angle, noise model, rate, sample count
/// and length. Half the instances use N_k = 2^k, the rest random slowly
/// growing sequences.
RunRecord random_run_record(std::uint64_t seed, std::uint64_t instance, bool powers_of_two_only);

/// δθ_k = π N_k / (2 N_{k+1}), δθ_{k_max} = π/2: meets the local bound for
/// any strictly increasing sequence.
DeltaSchedule half_gap_schedule(std::span<const std::uint64_t> lengths);

}  // namespace rpe
