#include "rpe/checks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rpe/quad.hpp"

namespace rpe {

namespace {

double tolerance_at(std::uint64_t length) {
  return kAngleTolerance / static_cast<double>(length);
}

double as_double(std::uint64_t n) { return static_cast<double>(n); }

void require_schedule(const RpeRun& run, const DeltaSchedule& schedule) {
  if (schedule.size() < run.size()) {
    throw std::invalid_argument("delta schedule shorter than the run");
  }
  std::span<const std::uint64_t> covered(run.lengths.data(),
                                         std::min(run.lengths.size(), schedule.size()));
  if (!schedule.is_valid_for(covered)) {
    throw std::invalid_argument("delta schedule violates the local error bound");
  }
}

/// Intersects arcs generation by generation; `arc_at(k)` gives generation k's
/// arc. Stops at the first empty intersection.
template <typename ArcAt>
ConsistencyVerdict running_intersection(const RpeRun& run, Criterion label,
                                        std::size_t first, ArcAt arc_at) {
  ConsistencyVerdict verdict{label, std::nullopt, Arc::full()};
  Arc running = Arc::full();
  for (std::size_t k = first; k < run.size(); ++k) {
    running = arc_intersect(running, arc_at(k), tolerance_at(run.lengths[k]));
    if (running.is_empty()) {
      verdict.flagged = k;
      return verdict;
    }
    verdict.witness = running;
  }
  return verdict;
}

}  // namespace

std::string_view criterion_name(Criterion c) {
  switch (c) {
    case Criterion::Plausible:
      return "plausible";
    case Criterion::Consecutive:
      return "consecutive";
    case Criterion::Local:
      return "local";
    case Criterion::UniformLocal:
      return "uniform_local";
    case Criterion::AngularHistorical:
      return "angular_historical";
    case Criterion::ProbabilityHistorical:
      return "probability_historical";
    case Criterion::Intersequence:
      return "intersequence";
  }
  return "unknown";
}

std::optional<Criterion> criterion_from_name(std::string_view name) {
  for (Criterion c : kAllCriteria) {
    if (criterion_name(c) == name) return c;
  }
  return std::nullopt;
}

DeltaSchedule::DeltaSchedule(std::vector<double> deltas) : deltas_(std::move(deltas)) {
  for (double d : deltas_) {
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw std::invalid_argument("delta bounds must be positive and finite");
    }
  }
}

bool DeltaSchedule::is_valid_for(std::span<const std::uint64_t> lengths) const {
  if (deltas_.size() < lengths.size()) return false;
  for (std::size_t k = 1; k < lengths.size(); ++k) {
    const double lhs = deltas_[k] / as_double(lengths[k]) +
                       deltas_[k - 1] / as_double(lengths[k - 1]);
    const double rhs = kPi / as_double(lengths[k]);
    if (lhs > rhs * (1.0 + 1e-12)) return false;
  }
  return true;
}

DeltaSchedule uniform_schedule(std::span<const std::uint64_t> lengths) {
  GenerationSequence(std::vector<std::uint64_t>(lengths.begin(), lengths.end()));
  if (lengths.empty()) return DeltaSchedule();
  std::vector<double> d(lengths.size());
  for (std::size_t k = 1; k < lengths.size(); ++k) {
    d[k] = kPi / (1.0 + as_double(lengths[k]) / as_double(lengths[k - 1]));
  }
  d[0] = lengths.size() > 1 ? d[1] : kPi / 3.0;
  return DeltaSchedule(std::move(d));
}

ConsistencyVerdict plausible_check(const RpeRun& run) {
  return running_intersection(run, Criterion::Plausible, 0, [&](std::size_t k) {
    return Arc::centered(run.estimates[k], kPi / as_double(run.lengths[k]));
  });
}

Arc consecutive_arc(Angle previous, Angle current, std::uint64_t length) {
  const double spread = dist(previous, current);
  const double d = kPi / (2.0 * as_double(length)) - 0.5 * spread;
  if (d < 0.0) return Arc::empty();
  return expand(smallest_arc_containing(previous, current), d);
}

ConsistencyVerdict consecutive_check(const RpeRun& run) {
  // Λ_0 is the whole circle, so the walk starts at k = 1.
  return running_intersection(run, Criterion::Consecutive, 1, [&](std::size_t k) {
    return consecutive_arc(run.estimates[k - 1], run.estimates[k], run.lengths[k]);
  });
}

ConsistencyVerdict local_check(const RpeRun& run, const DeltaSchedule& schedule,
                               Criterion label) {
  require_schedule(run, schedule);
  return running_intersection(run, label, 0, [&](std::size_t k) {
    return Arc::centered(run.estimates[k], schedule[k] / as_double(run.lengths[k]));
  });
}

ConsistencyVerdict angular_historical_check(const RpeRun& run,
                                            const DeltaSchedule& schedule,
                                            std::optional<double> width) {
  require_schedule(run, schedule);
  if (width && !(*width > 0.0)) {
    throw std::invalid_argument("interval width must be positive");
  }
  ConsistencyVerdict verdict{Criterion::AngularHistorical, std::nullopt, Arc::full()};
  Arc running = Arc::full();
  for (std::size_t k = 0; k < run.size(); ++k) {
    const double n = as_double(run.lengths[k]);
    const double tol = tolerance_at(run.lengths[k]);
    running = arc_intersect(running, Arc::centered(run.estimates[k], schedule[k] / n), tol);
    const bool ok = width ? running.length() >= *width / n - tol
                          : arc_contains(running, run.estimates[k], tol);
    if (!ok) {
      verdict.flagged = k;
      return verdict;
    }
    verdict.witness = running;
  }
  return verdict;
}

ConsistencyVerdict probability_historical_check(const RpeRun& run,
                                                const DeltaSchedule& schedule) {
  if (schedule.size() < run.size()) {
    throw std::invalid_argument("delta schedule shorter than the run");
  }
  ConsistencyVerdict verdict{Criterion::ProbabilityHistorical, std::nullopt, std::nullopt};
  for (std::size_t k = 1; k < run.size(); ++k) {
    const double threshold = std::sin(schedule[k]) / std::sqrt(2.0);
    const double estimate = run.estimates[k].radians();
    for (std::size_t j = 0; j < k; ++j) {
      const double phase = scaled_phase(run.lengths[j], estimate);
      if (std::fabs(run.bloch_cos[j] - std::cos(phase)) > threshold ||
          std::fabs(run.bloch_sin[j] - std::sin(phase)) > threshold) {
        verdict.flagged = k;
        return verdict;
      }
    }
  }
  return verdict;
}

ConsistencyVerdict intersequence_check(const RpeRun& run, const RpeRun& other) {
  if (run.lengths.size() != other.lengths.size()) {
    throw std::invalid_argument("intersequence runs have different generation counts");
  }
  for (std::size_t k = 0; k < run.lengths.size(); ++k) {
    if (run.lengths[k] >= other.lengths[k]) {
      throw std::invalid_argument("intersequence requires N_k < N'_k at every index");
    }
  }
  ConsistencyVerdict verdict{Criterion::Intersequence, std::nullopt, std::nullopt};
  const std::size_t common = std::min(run.size(), other.size());
  for (std::size_t k = 0; k < common; ++k) {
    const double n = as_double(run.lengths[k]);
    if (dist(run.estimates[k], other.estimates[k]) > kTwoPi / n + tolerance_at(run.lengths[k])) {
      verdict.flagged = k;
      return verdict;
    }
  }
  // A truncated run has no estimate to compare from here on.
  if (common < run.lengths.size()) verdict.flagged = common;
  return verdict;
}

double probability_error_bound(double delta) {
  return std::sin(delta) / (2.0 * std::sqrt(2.0));
}

bool set_formulation_witness(unsigned j, double alpha, unsigned k_max) {
  if (!(alpha > 1.0 / 6.0 && alpha <= 0.5)) {
    throw std::invalid_argument("set-formulation witness needs 1/6 < alpha <= 1/2");
  }
  if (j > 60) throw std::invalid_argument("j too large");
  // F(2^(k-j)/3) = r / (3·2^m): for k >= j, r = 2^(k-j) mod 3 and m = 0;
  // for k < j, r = 1 and m = j - k.
  for (unsigned k = 0; k <= k_max; ++k) {
    const std::uint64_t r = k >= j ? ((k - j) % 2 == 0 ? 1 : 2) : 1;
    const std::uint64_t denom = 3 * (std::uint64_t{1} << (k >= j ? 0 : j - k));
    // |2F - 1| computed from the exact integers 2r and denom.
    const double lhs = std::fabs(static_cast<double>(2 * r) - static_cast<double>(denom)) /
                       static_cast<double>(denom);
    if (!(lhs > 1.0 - 4.0 * alpha)) return false;
  }
  return true;
}

const ConsistencyVerdict* ConsistencyReport::find(Criterion c) const {
  for (const ConsistencyVerdict& v : verdicts) {
    if (v.criterion == c) return &v;
  }
  return nullptr;
}

std::size_t ConsistencyReport::recorded_flag(Criterion c) const {
  const ConsistencyVerdict* v = find(c);
  if (v == nullptr) {
    throw std::out_of_range("criterion " + std::string(criterion_name(c)) +
                            " was not evaluated");
  }
  return v->flagged.value_or(k_max + 1);
}

std::size_t ConsistencyReport::recorded_actual() const {
  return actual_failure.value_or(k_max + 1);
}

long ConsistencyReport::discrepancy(Criterion c) const {
  return static_cast<long>(recorded_flag(c)) - static_cast<long>(recorded_actual());
}

ConsistencyReport report(const RpeRun& run, const RpeRun* secondary,
                         std::optional<Angle> truth, const ReportOptions& options) {
  ConsistencyReport out;
  out.k_max = run.k_max();

  const DeltaSchedule uniform = uniform_schedule(run.lengths);
  const DeltaSchedule& schedule = options.schedule ? *options.schedule : uniform;

  out.verdicts.push_back(plausible_check(run));
  out.verdicts.push_back(consecutive_check(run));
  if (schedule.is_valid_for(run.lengths)) {
    out.verdicts.push_back(local_check(run, schedule, Criterion::Local));
  }
  if (uniform.is_valid_for(run.lengths)) {
    out.verdicts.push_back(local_check(run, uniform, Criterion::UniformLocal));
  }
  if (schedule.is_valid_for(run.lengths)) {
    out.verdicts.push_back(angular_historical_check(run, schedule, options.width));
  }
  out.verdicts.push_back(probability_historical_check(run, schedule));
  if (secondary != nullptr) {
    out.verdicts.push_back(intersequence_check(run, *secondary));
  }

  if (run.degenerate_at) {
    for (ConsistencyVerdict& v : out.verdicts) {
      if (!v.flagged || *v.flagged > *run.degenerate_at) v.flagged = run.degenerate_at;
    }
  }

  if (truth) {
    out.truth_known = true;
    out.actual_failure = actual_failure_generation(run.estimates, *truth, run.lengths);
    if (!out.actual_failure && run.degenerate_at) out.actual_failure = run.degenerate_at;
  }
  return out;
}

}  // namespace rpe
