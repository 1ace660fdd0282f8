// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: rpe_acceptance [criterion...]; with no arguments every criterion
// runs. Exits nonzero if any selected criterion fails.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rpe/channel.hpp"
#include "rpe/checks.hpp"
#include "rpe/harness.hpp"
#include "rpe/oracle.hpp"

using namespace rpe;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Outcome noiseless_correctness() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double theta = u(rng);
    std::vector<CandidateSet> sets;
    for (std::size_t k = 0; k <= 20; ++k) {
      const std::uint64_t n = std::uint64_t{1} << k;
      const ProbabilityPair p = exact_probabilities({}, theta, n);
      sets.push_back(candidate_set(p.cosine, p.sine, n));
    }
    const RpeEstimates est = run_rpe(sets);
    for (std::size_t k = 0; k <= 20; ++k) {
      const double n = std::ldexp(1.0, static_cast<int>(k));
      // Error as a fraction of the allowed π/N_k.
      worst = std::max(worst, dist(est.estimates[k], Angle(theta)) * n / kPi);
    }
  }
  return {worst < 1.0 - 1e-9, "worst |error| = " + fmt("%.3g", worst) + " of pi/N_k"};
}

Outcome depolarizing_closed_form() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  double worst = 0.0;
  for (double b : {std::exp2(-2), std::exp2(-6), std::exp2(-10), std::exp2(-20)}) {
    for (int i = 0; i < 10; ++i) {
      const double theta = u(rng);
      for (std::uint64_t n = 1; n <= (std::uint64_t{1} << 30); n *= 2) {
        const ProbabilityPair p =
            exact_probabilities({NoiseKind::Depolarizing, b, {}}, theta, n);
        const double lambda = std::pow(1 - b, static_cast<double>(n));
        const double phase = scaled_phase(n, theta);
        worst = std::max({worst, std::fabs(2 * p.cosine - 1 - lambda * std::cos(phase)),
                          std::fabs(2 * p.sine - 1 - lambda * std::sin(phase))});
      }
    }
  }
  return {worst <= 1e-12, "max deviation " + fmt("%.2e", worst)};
}

Outcome oracle_outcome(const OracleCheckResult& r) {
  std::string detail = std::to_string(r.violations) + "/" + std::to_string(r.instances) +
                       " instances violated";
  if (r.first) detail += "; first: " + r.first->detail;
  return {r.passed(), detail};
}

Outcome hierarchy() { return oracle_outcome(hierarchy_oracle(1000, 10000, 0)); }
Outcome interval_lemma() { return oracle_outcome(consecutive_arc_oracle(1000, 100000, 0)); }
Outcome historical_modes() { return oracle_outcome(historical_modes_oracle(1000, 0)); }

ExperimentConfig sweep_config(NoiseKind kind) {
  ExperimentConfig c;
  c.angle = 1.6;
  c.noise.kind = kind;
  c.samples = 1000;
  c.runs = 200;
  c.seed = 0;
  return c;
}

Outcome probability_conservatism() {
  const ExperimentConfig base = sweep_config(NoiseKind::Depolarizing);
  std::size_t failed = 0, early = 0;
  double worst_rate = 1.0;
  std::string worst_at;
  for (double b : default_error_rates()) {
    ExperimentConfig c = base;
    c.noise.rate = b;
    std::size_t f = 0, e = 0;
    for (const RunOutcome& o : evaluate_runs(c)) {
      if (!o.failed) continue;
      ++f;
      e += *o.flags[static_cast<int>(Criterion::ProbabilityHistorical) - 1] <= o.actual;
    }
    failed += f;
    early += e;
    if (f > 0 && static_cast<double>(e) / f < worst_rate) {
      worst_rate = static_cast<double>(e) / f;
      worst_at = fmt("%g", b);
    }
  }
  const double pooled = static_cast<double>(early) / static_cast<double>(failed);
  return {failed > 0 && worst_rate >= 0.99,
          "flagged <= actual in " + std::to_string(early) + "/" + std::to_string(failed) +
              " failing runs (" + fmt("%.2f%%", 100 * pooled) + "); lowest per-rate " +
              fmt("%.2f%%", 100 * worst_rate) + (worst_at.empty() ? "" : " at b=" + worst_at)};
}

Outcome angular_accuracy() {
  bool ok = true;
  std::ostringstream detail;
  for (NoiseKind kind : {NoiseKind::Depolarizing, NoiseKind::Dephasing}) {
    detail << noise_kind_name(kind) << " means:";
    std::vector<double> rates;
    for (int i = 4; i <= 8; ++i) rates.push_back(std::ldexp(1.0, -i));
    const SweepResult r = error_rate_sweep(sweep_config(kind), rates);
    for (double b : rates) {
      const double m = r.find(b, "angular_historical")->mean;
      ok &= m >= -2.0 && m <= 1.0;
      detail << " " << fmt("%.3f", m);
    }
    detail << "; ";
  }
  std::string d = detail.str();
  return {ok, d.substr(0, d.size() - 2) + " (b = 2^-4 ... 2^-8)"};
}

Outcome amplitude_damping_residue() {
  ExperimentConfig c = sweep_config(NoiseKind::AmplitudeDamping);
  c.noise.rate = 1.0 / 16;
  std::size_t late = 0;
  double prob_sum = 0.0;
  const std::vector<RunOutcome> outcomes = evaluate_runs(c);
  for (const RunOutcome& o : outcomes) {
    late += *o.discrepancy(Criterion::AngularHistorical) > 12;
    prob_sum += static_cast<double>(*o.discrepancy(Criterion::ProbabilityHistorical));
  }
  const double fraction = static_cast<double>(late) / outcomes.size();
  const double prob_mean = prob_sum / outcomes.size();
  return {fraction >= 0.02 && prob_mean <= 0.0,
          "angular-historical discrepancy > 12 in " + std::to_string(late) + "/" +
              std::to_string(outcomes.size()) + " runs (" + fmt("%.1f%%", 100 * fraction) +
              ", need >= 2%); probability-historical mean " + fmt("%.3f", prob_mean)};
}

Outcome probability_constant() {
  const double v = probability_error_bound(kPi / 3);
  return {std::fabs(v - std::sqrt(3.0 / 32.0)) <= 1e-9, "bound = " + fmt("%.9f", v)};
}

Outcome witness() {
  std::string detail = "j = 0..5:";
  bool ok = true;
  for (unsigned j = 0; j <= 5; ++j) {
    const bool w = set_formulation_witness(j, 0.17, 25);
    ok &= w;
    detail += w ? " true" : " false";
  }
  return {ok, detail};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome sweep_determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "rpe_acceptance_determinism";
  std::filesystem::remove_all(dir);
  const std::string common = std::string(RPE_CLI_PATH) +
                             " sweep --mode rates --runs 50 --seed 11 --out-dir ";
  bool ok = true;
  std::vector<std::string> outputs;
  for (unsigned workers : {1u, 7u}) {
    const auto out = dir / ("w" + std::to_string(workers));
    const std::string cmd =
        common + out.string() + " --workers " + std::to_string(workers) + " > /dev/null";
    const int status = std::system(cmd.c_str());
    ok &= WIFEXITED(status) && WEXITSTATUS(status) == 0;
    outputs.push_back(slurp(out / "histogram.csv") + slurp(out / "means.csv"));
  }
  ok &= !outputs[0].empty() && outputs[0] == outputs[1];
  return {ok, "workers 1 vs 7: " + std::string(outputs[0] == outputs[1] ? "identical" : "differ") +
                  " (" + std::to_string(outputs[0].size()) + " bytes)"};
}

struct Criterion_ {
  const char* name;
  std::function<Outcome()> run;
};

const std::map<int, Criterion_>& criteria() {
  static const std::map<int, Criterion_> all = {
      {1, {"noiseless correctness", noiseless_correctness}},
      {2, {"depolarizing closed form", depolarizing_closed_form}},
      {3, {"criterion hierarchy and set inclusions", hierarchy}},
      {4, {"expanded-arc formula for consecutive sets", interval_lemma}},
      {5, {"angular-historical membership/length equivalence", historical_modes}},
      {6, {"probability-historical conservatism", probability_conservatism}},
      {7, {"angular-historical accuracy", angular_accuracy}},
      {8, {"amplitude-damping late-flag residue", amplitude_damping_residue}},
      {9, {"probability bound constant", probability_constant}},
      {10, {"set-formulation witness", witness}},
      {11, {"sweep determinism across worker counts", sweep_determinism}},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int id = std::atoi(argv[i]);
    if (!criteria().contains(id)) {
      std::cerr << "unknown criterion " << argv[i] << "\n";
      return 1;
    }
    selected.push_back(id);
  }
  if (selected.empty()) {
    for (const auto& [id, c] : criteria()) selected.push_back(id);
  }

  bool all = true;
  for (int id : selected) {
    const Criterion_& c = criteria().at(id);
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = c.run();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << c.name
              << "): " << o.detail << " [" << fmt("%.2f", secs) << " s]" << std::endl;
    all &= o.pass;
  }
  return all ? 0 : 1;
}
