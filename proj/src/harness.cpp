#include "rpe/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "rpe/random.hpp"

namespace rpe {

namespace {

constexpr std::uint64_t kPrimaryTag = 0;
constexpr std::uint64_t kSecondaryTag = 1;
constexpr std::uint64_t kCosineCircuit = 0;
constexpr std::uint64_t kSineCircuit = 1;

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

std::size_t index_of(Criterion c) { return static_cast<std::size_t>(c) - 1; }

std::vector<ProbabilityPair> exact_table(const ExperimentConfig& config,
                                         const GenerationSequence& seq) {
  std::vector<ProbabilityPair> out;
  out.reserve(seq.size());
  for (std::uint64_t n : seq.lengths()) {
    out.push_back(exact_probabilities(config.noise, config.angle, n));
  }
  return out;
}

unsigned worker_count(unsigned requested, std::size_t tasks) {
  unsigned w = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(tasks, 1)));
}

void add_to_series(SweepSeries& s, long discrepancy) {
  ++s.histogram[discrepancy];
  ++s.runs;
}

void finish_series(SweepSeries& s) {
  double sum = 0.0;
  for (const auto& [bin, count] : s.histogram) sum += static_cast<double>(bin) * count;
  s.mean = s.runs == 0 ? 0.0 : sum / static_cast<double>(s.runs);
}

/// One series per evaluated criterion, in criterion order.
void append_criteria_series(SweepResult& result, double axis_value,
                            std::span<const RunOutcome> outcomes) {
  for (Criterion c : kAllCriteria) {
    SweepSeries s{axis_value, std::string(criterion_name(c)), {}, 0.0, 0};
    for (const RunOutcome& o : outcomes) {
      if (auto d = o.discrepancy(c)) add_to_series(s, *d);
    }
    if (s.runs == 0) continue;
    finish_series(s);
    result.series.push_back(std::move(s));
  }
}

SweepResult make_result(std::string axis, const ExperimentConfig& config) {
  SweepResult r;
  r.axis_name = std::move(axis);
  r.runs = config.runs;
  r.seed = config.seed;
  r.config_digest = config.digest();
  return r;
}

}  // namespace

void ExperimentConfig::set_k_max(std::size_t k_max) {
  primary = GenerationSequence::powers_of_two(k_max);
  secondary = GenerationSequence::bootstrapped_thirds(k_max + 1);
  secondary_bootstrap = 1;
}

void ExperimentConfig::validate() const {
  noise.validate();
  if (!std::isfinite(angle)) throw std::invalid_argument("angle must be finite");
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (primary.size() == 0 || !primary.starts_at_one()) {
    throw std::invalid_argument("primary sequence must start at N = 1");
  }
  if (with_secondary) {
    if (!secondary.starts_at_one() || secondary_bootstrap == 0) {
      throw std::invalid_argument("secondary sequence needs an N = 1 bootstrap");
    }
    if (secondary.size() != primary.size() + secondary_bootstrap) {
      throw std::invalid_argument(
          "secondary sequence must have one compared generation per primary generation");
    }
    for (std::size_t k = 0; k < primary.size(); ++k) {
      if (primary[k] >= secondary[k + secondary_bootstrap]) {
        throw std::invalid_argument("secondary lengths must exceed primary lengths");
      }
    }
  }
}

std::string ExperimentConfig::digest() const {
  std::vector<std::uint64_t> parts = {
      bits(angle),        static_cast<std::uint64_t>(noise.kind),
      bits(noise.rate),   bits(noise.spam.b_spam),
      bits(noise.spam.b_s), static_cast<std::uint64_t>(samples),
      runs,               seed,
      with_secondary ? 1u : 0u, secondary_bootstrap};
  for (std::uint64_t n : primary.lengths()) parts.push_back(n);
  parts.push_back(~0ULL);
  for (std::uint64_t n : secondary.lengths()) parts.push_back(n);

  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentPlan::ExperimentPlan(const ExperimentConfig& config) : config_(config) {
  config_.validate();
  primary_probs_ = exact_table(config_, config_.primary);
  if (config_.with_secondary) secondary_probs_ = exact_table(config_, config_.secondary);
}

std::vector<GenerationData> ExperimentPlan::sample(const GenerationSequence& seq,
                                                   std::span<const ProbabilityPair> probs,
                                                   std::uint64_t run_index,
                                                   std::uint64_t sequence_tag) const {
  std::vector<GenerationData> out;
  out.reserve(seq.size());
  for (std::size_t k = 0; k < seq.size(); ++k) {
    RandomStream cos_stream{config_.seed, run_index, sequence_tag, k, kCosineCircuit};
    RandomStream sin_stream{config_.seed, run_index, sequence_tag, k, kSineCircuit};
    GenerationData g;
    g.length = seq[k];
    g.cosine = {sample_counts(probs[k].cosine, config_.samples, cos_stream), config_.samples};
    g.sine = {sample_counts(probs[k].sine, config_.samples, sin_stream), config_.samples};
    out.push_back(g);
  }
  return out;
}

SimulatedRuns ExperimentPlan::simulate(std::uint64_t run_index) const {
  SimulatedRuns out{analyze(sample(config_.primary, primary_probs_, run_index, kPrimaryTag)),
                    std::nullopt, config_.secondary_bootstrap};
  if (config_.with_secondary) {
    out.secondary =
        analyze(sample(config_.secondary, secondary_probs_, run_index, kSecondaryTag));
  }
  return out;
}

SimulatedRuns simulate_run(const ExperimentConfig& config, std::uint64_t run_index) {
  return ExperimentPlan(config).simulate(run_index);
}

std::optional<long> RunOutcome::discrepancy(Criterion c) const {
  const auto& f = flags[index_of(c)];
  if (!f) return std::nullopt;
  return static_cast<long>(*f) - static_cast<long>(actual);
}

RunOutcome evaluate_run(const SimulatedRuns& runs, double angle,
                        std::span<const double> widths) {
  std::optional<RpeRun> compared;
  if (runs.secondary) compared = runs.secondary->without_prefix(runs.secondary_bootstrap);
  const ConsistencyReport rep =
      report(runs.primary, compared ? &*compared : nullptr, Angle(angle));

  RunOutcome out;
  out.k_max = rep.k_max;
  out.actual = rep.recorded_actual();
  out.failed = rep.actual_failure.has_value();
  for (const ConsistencyVerdict& v : rep.verdicts) {
    out.flags[index_of(v.criterion)] = rep.recorded_flag(v.criterion);
  }

  if (!widths.empty()) {
    const DeltaSchedule schedule = uniform_schedule(runs.primary.lengths);
    for (double width : widths) {
      std::optional<std::size_t> f;
      if (schedule.is_valid_for(runs.primary.lengths)) {
        f = angular_historical_check(runs.primary, schedule, width).flagged;
      }
      if (runs.primary.degenerate_at && (!f || *f > *runs.primary.degenerate_at)) {
        f = runs.primary.degenerate_at;
      }
      out.width_flags.push_back(f.value_or(rep.k_max + 1));
    }
  }
  return out;
}

std::vector<RunOutcome> evaluate_runs(const ExperimentConfig& config,
                                      std::span<const double> widths) {
  const ExperimentPlan plan(config);
  std::vector<RunOutcome> outcomes(config.runs);
  const unsigned workers = worker_count(config.workers, config.runs);

  // Run i is handled by worker i mod W and written to slot i, so the result
  // does not depend on W or on thread timing.
  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < config.runs; i += workers) {
      outcomes[i] = evaluate_run(plan.simulate(i), config.angle, widths);
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  return outcomes;
}

const SweepSeries* SweepResult::find(double axis_value, std::string_view label) const {
  for (const SweepSeries& s : series) {
    if (s.axis_value == axis_value && s.label == label) return &s;
  }
  return nullptr;
}

std::vector<double> default_error_rates() {
  std::vector<double> out;
  for (int i = 2; i <= 10; ++i) out.push_back(std::ldexp(1.0, -i));
  return out;
}

std::vector<double> default_widths() {
  return {kPi / 6, kPi / 4, kPi / 3, 5 * kPi / 12, kPi / 2};
}

SweepResult error_rate_sweep(const ExperimentConfig& config, std::span<const double> rates) {
  if (rates.empty()) throw std::invalid_argument("no error rates given");
  SweepResult result = make_result("error_rate", config);
  for (double b : rates) {
    ExperimentConfig c = config;
    c.noise.rate = b;
    append_criteria_series(result, b, evaluate_runs(c));
  }
  return result;
}

SweepResult angle_sweep(const ExperimentConfig& config, std::span<const double> angles) {
  if (angles.empty()) throw std::invalid_argument("no angles given");
  SweepResult result = make_result("angle", config);
  for (double theta : angles) {
    ExperimentConfig c = config;
    c.angle = theta;
    append_criteria_series(result, theta, evaluate_runs(c));
  }
  return result;
}

SweepResult interval_width_sweep(const ExperimentConfig& config,
                                 std::span<const double> widths,
                                 std::span<const double> rates) {
  if (widths.empty()) throw std::invalid_argument("no widths given");
  if (rates.empty()) throw std::invalid_argument("no error rates given");
  for (double w : widths) {
    if (!(w > 0.0 && std::isfinite(w))) throw std::invalid_argument("widths must be positive");
  }
  SweepResult result = make_result("error_rate", config);
  for (double b : rates) {
    ExperimentConfig c = config;
    c.noise.rate = b;
    c.with_secondary = false;
    const std::vector<RunOutcome> outcomes = evaluate_runs(c, widths);
    for (std::size_t i = 0; i < widths.size(); ++i) {
      SweepSeries s{b, width_label(widths[i]), {}, 0.0, 0};
      for (const RunOutcome& o : outcomes) {
        add_to_series(s, static_cast<long>(o.width_flags[i]) - static_cast<long>(o.actual));
      }
      finish_series(s);
      result.series.push_back(std::move(s));
    }
  }
  return result;
}

std::string width_label(double width) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "angular_historical@L=%.6f", width);
  return buf;
}

}  // namespace rpe
