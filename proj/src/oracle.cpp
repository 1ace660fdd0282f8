#include "rpe/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rpe/channel.hpp"
#include "rpe/checks.hpp"
#include "rpe/random.hpp"

namespace rpe {

namespace {

constexpr std::uint64_t kHierarchyTag = 1;
constexpr std::uint64_t kArcTag = 2;
constexpr std::uint64_t kModesTag = 3;

/// Margin used to keep grid points that sit on a boundary (up to rounding)
/// from producing spurious inclusion failures.
double margin(std::uint64_t n) { return kAngleTolerance / static_cast<double>(n); }

double grid_point(std::size_t i, std::size_t grid) {
  return kTwoPi * static_cast<double>(i) / static_cast<double>(grid);
}

double circle_dist(double a, double b) { return std::fabs(std::remainder(a - b, kTwoPi)); }

void record_violation(OracleCheckResult& result, OracleViolation v) {
  ++result.violations;
  if (!result.first) result.first = std::move(v);
}

std::size_t recorded(const ConsistencyVerdict& v, std::size_t never) {
  return v.flagged.value_or(never);
}

}  // namespace

double grid_candidate_dist(double x, std::uint64_t n, double base) {
  const double nd = static_cast<double>(n);
  return std::fabs(std::remainder(nd * x - base, kTwoPi)) / nd;
}

DeltaSchedule half_gap_schedule(std::span<const std::uint64_t> lengths) {
  std::vector<double> d;
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    d.push_back(k + 1 < lengths.size()
                    ? kPi * static_cast<double>(lengths[k]) / (2.0 * lengths[k + 1])
                    : kPi / 2);
  }
  return DeltaSchedule(std::move(d));
}

RunRecord random_run_record(std::uint64_t seed, std::uint64_t instance, bool powers_of_two_only) {
  RandomStream rng{seed, instance, 0};
  auto pick = [&](std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng.engine());
  };

  NoiseConfig noise;
  noise.kind = static_cast<NoiseKind>(pick(0, 3));
  noise.rate = std::exp2(-rng.uniform(1.0, 8.0));
  noise.spam = pick(0, 1) != 0 ? SpamConfig{1e-2, 1e-2} : SpamConfig{};
  const double angle = rng.uniform(0.0, kTwoPi);
  const std::int64_t samples = std::array<std::int64_t, 3>{20, 100, 1000}[pick(0, 2)];
  const std::size_t k_max = pick(1, 12);

  std::vector<std::uint64_t> lengths{1};
  const bool doubling = powers_of_two_only || pick(0, 1) == 0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const std::uint64_t prev = lengths.back();
    lengths.push_back(doubling ? 2 * prev : prev + pick(1, prev + 1));
  }

  RunRecord record;
  record.true_angle = angle;
  record.metadata = {seed, instance, noise, "oracle"};
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    const ProbabilityPair p = exact_probabilities(noise, angle, lengths[k]);
    RandomStream cos_stream{seed, instance, 1, k, 0};
    RandomStream sin_stream{seed, instance, 1, k, 1};
    record.generations.push_back({lengths[k],
                                  {sample_counts(p.cosine, samples, cos_stream), samples},
                                  {sample_counts(p.sine, samples, sin_stream), samples}});
  }
  return record;
}

OracleCheckResult hierarchy_oracle(std::size_t instances, std::size_t grid, std::uint64_t seed) {
  OracleCheckResult result{"hierarchy", instances, 0, std::nullopt};
  std::vector<char> phi_out(grid), phi_in(grid), lam_out(grid), lam_in(grid), del_in(grid);

  for (std::uint64_t inst = 0; inst < instances; ++inst) {
    const RunRecord record = random_run_record(stream_key({seed, kHierarchyTag}), inst, false);
    const RpeRun run = analyze(record);
    const DeltaSchedule uniform = uniform_schedule(run.lengths);
    const DeltaSchedule schedule =
        uniform.is_valid_for(run.lengths) ? uniform : half_gap_schedule(run.lengths);

    auto fail = [&](std::string detail) {
      record_violation(result, {"hierarchy", inst, std::move(detail), record});
    };

    const std::size_t never = run.k_max() + 1;
    const std::size_t fp = recorded(plausible_check(run), never);
    const std::size_t fc = recorded(consecutive_check(run), never);
    const std::size_t fl = recorded(local_check(run, schedule), never);
    if (!(fl <= fc && fc <= fp)) {
      std::ostringstream msg;
      msg << "flag order violated: local " << fl << ", consecutive " << fc << ", plausible "
          << fp;
      fail(msg.str());
      continue;
    }

    std::fill(phi_out.begin(), phi_out.end(), 1);
    std::fill(phi_in.begin(), phi_in.end(), 1);
    std::fill(lam_out.begin(), lam_out.end(), 1);
    std::fill(lam_in.begin(), lam_in.end(), 1);
    std::fill(del_in.begin(), del_in.end(), 1);

    for (std::size_t k = 0; k < run.size(); ++k) {
      const std::uint64_t n = run.lengths[k];
      const double half_gap = kPi / static_cast<double>(n);
      const double eps = margin(n);
      const double est = run.estimates[k].radians();
      const double radius = schedule[k] / static_cast<double>(n);
      const double base = run.candidates[k].base().radians();
      bool any_phi = false, any_lam = false, any_del = false, broken = false;

      for (std::size_t i = 0; i < grid; ++i) {
        const double x = grid_point(i, grid);
        const double d = circle_dist(x, est);
        phi_out[i] &= d < half_gap + eps;
        phi_in[i] &= d < half_gap - eps;
        del_in[i] &= d < radius - eps;
        if (k > 0) {
          const double s = grid_candidate_dist(x, n, base) +
                           grid_candidate_dist(x, run.lengths[k - 1],
                                               run.candidates[k - 1].base().radians());
          lam_out[i] &= s < half_gap + eps;
          lam_in[i] &= s < half_gap - eps;
        }
        if ((del_in[i] && !lam_out[i]) || (lam_in[i] && !phi_out[i])) broken = true;
        any_phi |= phi_in[i] != 0;
        any_lam |= lam_in[i] != 0;
        any_del |= del_in[i] != 0;
      }

      std::ostringstream msg;
      if (broken) {
        msg << "set inclusion fails at generation " << k;
      } else if (any_phi && fp <= k) {
        msg << "plausible flagged at " << fp << " but grid points survive generation " << k;
      } else if (any_lam && fc <= k) {
        msg << "consecutive flagged at " << fc << " but grid points survive generation " << k;
      } else if (any_del && fl <= k) {
        msg << "local flagged at " << fl << " but grid points survive generation " << k;
      }
      if (!msg.str().empty()) {
        fail(msg.str());
        break;
      }
    }
  }
  return result;
}

OracleCheckResult consecutive_arc_oracle(std::size_t instances, std::size_t grid,
                                         std::uint64_t seed) {
  OracleCheckResult result{"consecutive_arc", instances, 0, std::nullopt};
  const double cell = kTwoPi / static_cast<double>(grid);

  for (std::uint64_t inst = 0; inst < instances; ++inst) {
    RandomStream rng{seed, kArcTag, inst};
    auto pick = [&](std::uint64_t lo, std::uint64_t hi) {
      return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng.engine());
    };
    const std::uint64_t n_prev = pick(1, 32);
    const std::uint64_t n = pick(n_prev + 1, 4 * n_prev + 4);
    const Angle prev(rng.uniform(0.0, kTwoPi));
    const double base_prev = scaled_phase(n_prev, prev.radians());
    const CandidateSet set(n, Angle(rng.uniform(0.0, kTwoPi)));
    const Angle est = candidate_nearest(prev, set).angle;
    const Arc arc = consecutive_arc(prev, est, n);
    const double half_gap = kPi / static_cast<double>(n);

    std::ostringstream where;
    where << "theta_prev=" << prev.radians() << " N_prev=" << n_prev
          << " theta=" << est.radians() << " N=" << n;

    if (arc.kind() == Arc::Kind::Full || (arc.kind() == Arc::Kind::Proper && arc.length() >= kPi)) {
      record_violation(result, {"consecutive_arc", inst, "arc not shorter than pi: " + where.str(),
                                std::nullopt});
      continue;
    }

    for (std::size_t i = 0; i < grid; ++i) {
      const double x = grid_point(i, grid);
      const bool member = grid_candidate_dist(x, n, set.base().radians()) +
                                  grid_candidate_dist(x, n_prev, base_prev) <
                              half_gap &&
                          circle_dist(x, est.radians()) < half_gap;
      const bool claimed = arc_contains(arc, Angle(x), 0.0);
      if (member == claimed) continue;

      double to_boundary = kPi;
      if (arc.kind() == Arc::Kind::Proper) {
        to_boundary = std::min(circle_dist(x, arc.start().radians()),
                               circle_dist(x, arc.end().radians()));
      } else {
        const double mid = prev.radians() + 0.5 * signed_delta(prev, est);
        to_boundary = circle_dist(x, mid);
      }
      if (to_boundary > cell) {
        std::ostringstream msg;
        msg << "grid point " << x << " is " << (member ? "in" : "outside")
            << " the set but the arc disagrees; " << where.str();
        record_violation(result, {"consecutive_arc", inst, msg.str(), std::nullopt});
        break;
      }
    }
  }
  return result;
}

OracleCheckResult historical_modes_oracle(std::size_t instances, std::uint64_t seed) {
  OracleCheckResult result{"historical_modes", instances, 0, std::nullopt};
  for (std::uint64_t inst = 0; inst < instances; ++inst) {
    const RunRecord record = random_run_record(stream_key({seed, kModesTag}), inst, true);
    const RpeRun run = analyze(record);
    const DeltaSchedule schedule = uniform_schedule(run.lengths);
    const auto membership = angular_historical_check(run, schedule).flagged;
    const auto length = angular_historical_check(run, schedule, kPi / 3).flagged;
    if (membership != length) {
      std::ostringstream msg;
      msg << "membership mode flags " << (membership ? std::to_string(*membership) : "none")
          << ", length mode flags " << (length ? std::to_string(*length) : "none");
      record_violation(result, {"historical_modes", inst, msg.str(), record});
    }
  }
  return result;
}

OracleCheckResult witness_oracle() {
  OracleCheckResult result{"set_formulation_witness", 6, 0, std::nullopt};
  for (unsigned j = 0; j <= 5; ++j) {
    if (!set_formulation_witness(j, 0.17, 25)) {
      record_violation(result, {"set_formulation_witness", j,
                                "false angle 2pi*2^-" + std::to_string(j) + "/3 rejected",
                                std::nullopt});
    }
  }
  return result;
}

std::vector<OracleCheckResult> run_oracle_suite(const OracleSuiteOptions& options) {
  if (options.grid < 2 || options.arc_grid < 2) {
    throw std::invalid_argument("grid resolution must be at least 2 cells");
  }
  return {hierarchy_oracle(options.instances, options.grid, options.seed),
          consecutive_arc_oracle(options.instances, options.arc_grid, options.seed),
          historical_modes_oracle(options.instances, options.seed), witness_oracle()};
}

}  // namespace rpe
