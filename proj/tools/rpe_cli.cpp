// rpe: simulate, check and sweep robust phase estimation runs.
//
// Exit codes: 0 success, 1 usage error, 2 schema or input error, 3 oracle
// violation.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rpe/channel.hpp"
#include "rpe/checks.hpp"
#include "rpe/harness.hpp"
#include "rpe/oracle.hpp"
#include "rpe/record.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSchema = 2;
constexpr int kExitOracle = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NoiseFlags {
  std::string model = "depol";
  double rate = 0.0;
  double spam = 1e-2;
};

void add_noise_flags(CLI::App* cmd, NoiseFlags& f, const char* model_flag) {
  cmd->add_option(model_flag, f.model, "none|depol|dephase|ampdamp")->capture_default_str();
  cmd->add_option("--rate", f.rate, "noise rate b per gate")->capture_default_str();
  cmd->add_option("--spam", f.spam, "SPAM error rate (preparation and sine rotation)")
      ->capture_default_str();
}

rpe::NoiseConfig noise_from(const NoiseFlags& f) {
  rpe::NoiseConfig n;
  try {
    n.kind = rpe::parse_noise_kind(f.model);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  n.rate = n.kind == rpe::NoiseKind::None ? 0.0 : f.rate;
  n.spam = {f.spam, f.spam};
  try {
    n.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return n;
}

rpe::RunRecord read_record(const std::string& path) {
  try {
    return rpe::read_run_record(path);
  } catch (const rpe::SchemaError& e) {
    throw rpe::SchemaError(path + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
}

rpe::RunRecord to_record(const rpe::RpeRun& run, std::size_t prefix,
                         const rpe::ExperimentConfig& config, std::uint64_t run_index,
                         std::string source) {
  rpe::RunRecord r;
  r.generations = run.generations;
  r.uncompared_prefix = prefix;
  r.true_angle = config.angle;
  r.metadata = {config.seed, run_index, config.noise, std::move(source)};
  return r;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateFlags {
  double angle = 1.6;
  NoiseFlags noise;
  std::int64_t samples = 1000;
  std::size_t generations = 45;
  std::uint64_t seed = 0;
  std::uint64_t run_index = 0;
  std::string secondary;
  std::string out;
};

int cmd_simulate(const SimulateFlags& f) {
  rpe::ExperimentConfig config;
  config.angle = f.angle;
  config.noise = noise_from(f.noise);
  config.samples = f.samples;
  config.seed = f.seed;
  if (f.generations > 60) throw UsageError("--generations must be at most 60");
  config.set_k_max(f.generations);
  config.with_secondary = !f.secondary.empty();
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const rpe::SimulatedRuns runs = rpe::ExperimentPlan(config).simulate(f.run_index);
  const rpe::RunRecord primary = to_record(runs.primary, 0, config, f.run_index, "simulate");
  rpe::write_run_record(f.out, primary);
  std::optional<rpe::RunRecord> secondary;
  if (runs.secondary) {
    secondary = to_record(*runs.secondary, config.secondary_bootstrap, config, f.run_index,
                          "simulate:secondary");
    rpe::write_run_record(f.secondary, *secondary);
  }

  std::cout << "k  N  estimate\n";
  for (std::size_t k = 0; k < runs.primary.size(); ++k) {
    std::cout << k << "  " << runs.primary.lengths[k] << "  " << std::setprecision(17)
              << runs.primary.estimates[k].radians() << "\n";
  }
  if (runs.primary.degenerate_at) {
    std::cout << "generation " << *runs.primary.degenerate_at
              << " has no usable signal; estimates stop there\n";
  }
  std::cout << "\n";
  rpe::print_report_table(std::cout,
                          rpe::check_records(primary, secondary ? &*secondary : nullptr));
  return kExitOk;
}

// ---- check ------------------------------------------------------------------

struct CheckFlags {
  std::vector<std::string> records;
  std::optional<double> width;
  bool json = false;
  std::string json_out;
};

int cmd_check(const CheckFlags& f) {
  if (f.records.empty() || f.records.size() > 2) {
    throw UsageError("check takes one or two run records");
  }
  const rpe::RunRecord primary = read_record(f.records[0]);
  std::optional<rpe::RunRecord> secondary;
  if (f.records.size() == 2) secondary = read_record(f.records[1]);
  if (f.width && !(*f.width > 0.0)) throw UsageError("--width must be positive");

  const rpe::CheckSummary summary =
      rpe::check_records(primary, secondary ? &*secondary : nullptr, f.width);
  const std::string json = rpe::report_to_json(summary);
  if (!f.json_out.empty()) {
    std::ofstream out(f.json_out, std::ios::binary);
    if (!out) throw InputError("cannot write " + f.json_out);
    out << json;
  }
  if (f.json) {
    std::cout << json;
  } else {
    rpe::print_report_table(std::cout, summary);
  }
  return kExitOk;
}

// ---- sweep ------------------------------------------------------------------

struct SweepFlags {
  std::string mode;
  NoiseFlags noise;
  double angle = 1.6;
  std::int64_t samples = 1000;
  std::size_t generations = 45;
  std::size_t runs = 200;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::vector<double> rates;
  std::vector<double> angles;
  std::vector<double> widths;
  std::string out_dir;
};

int cmd_sweep(const SweepFlags& f) {
  rpe::ExperimentConfig config;
  config.angle = f.angle;
  config.noise = noise_from(f.noise);
  if (config.noise.kind == rpe::NoiseKind::None && f.mode != "angles") {
    throw UsageError("--model none has no error rate to sweep");
  }
  config.samples = f.samples;
  config.runs = f.runs;
  config.seed = f.seed;
  config.workers = f.workers;
  if (f.generations > 60) throw UsageError("--generations must be at most 60");
  config.set_k_max(f.generations);
  if (f.runs == 0) throw UsageError("--runs must be positive");
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const std::vector<double> rates = f.rates.empty() ? rpe::default_error_rates() : f.rates;
  rpe::SweepResult result;
  try {
    if (f.mode == "rates") {
      result = rpe::error_rate_sweep(config, rates);
    } else if (f.mode == "angles") {
      std::vector<double> angles = f.angles;
      if (angles.empty()) {
        for (int i = 1; i < 16; ++i) angles.push_back(i * rpe::kPi / 16);
      }
      if (config.noise.kind != rpe::NoiseKind::None && f.noise.rate == 0.0) {
        config.noise.rate = std::ldexp(1.0, -6);
      }
      result = rpe::angle_sweep(config, angles);
    } else if (f.mode == "widths") {
      const std::vector<double> widths = f.widths.empty() ? rpe::default_widths() : f.widths;
      result = rpe::interval_width_sweep(config, widths, rates);
    } else {
      throw UsageError("--mode must be rates, angles or widths");
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  rpe::write_sweep_outputs(f.out_dir, result);
  std::cout << rpe::means_csv(result);
  return kExitOk;
}

// ---- oracle -----------------------------------------------------------------

struct OracleFlags {
  std::size_t instances = 1000;
  std::size_t grid = 10000;
  std::optional<std::size_t> arc_grid;
  std::uint64_t seed = 0;
  std::string replay_out;
};

int cmd_oracle(const OracleFlags& f) {
  rpe::OracleSuiteOptions options;
  options.instances = f.instances;
  options.grid = f.grid;
  options.arc_grid = f.arc_grid.value_or(10 * f.grid);
  options.seed = f.seed;
  if (options.grid < 2 || options.arc_grid < 2) {
    throw UsageError("grid resolution must be at least 2 cells");
  }

  bool ok = true;
  for (const rpe::OracleCheckResult& r : rpe::run_oracle_suite(options)) {
    std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name << ": " << r.violations << "/"
              << r.instances << " instances violated\n";
    if (r.passed()) continue;
    ok = false;
    const rpe::OracleViolation& v = *r.first;
    std::cout << "  first violation, instance " << v.instance << ": " << v.detail << "\n";
    if (v.record) {
      const std::string json = rpe::to_json(*v.record);
      if (!f.replay_out.empty()) {
        rpe::write_run_record(f.replay_out, *v.record);
        std::cout << "  replay record written to " << f.replay_out << "\n";
      } else {
        std::cout << "  replay record:\n" << json;
      }
    }
  }
  return ok ? kExitOk : kExitOracle;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust phase estimation with self-consistency checks"};
  app.require_subcommand(1);

  SimulateFlags sim;
  CLI::App* simulate = app.add_subcommand("simulate", "simulate one RPE run and write its record");
  simulate->add_option("--angle", sim.angle, "true rotation angle")->capture_default_str();
  add_noise_flags(simulate, sim.noise, "--noise");
  simulate->add_option("--samples", sim.samples, "samples per circuit per generation")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--generations", sim.generations, "k_max of the N_k = 2^k sequence")
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--run-index", sim.run_index)->capture_default_str();
  simulate->add_option("--secondary", sim.secondary,
                       "also simulate the cross-check sequence 1, 2, 3, 6, ... into this file");
  simulate->add_option("--out", sim.out, "run record to write")->required();

  CheckFlags chk;
  CLI::App* check = app.add_subcommand("check", "run the consistency checks on run records");
  check->add_option("records", chk.records, "primary record [secondary record]")
      ->required()
      ->expected(1, 2);
  check->add_option("--width", chk.width,
                    "angular-historical length-mode width L (membership mode if omitted)");
  check->add_flag("--json", chk.json, "print the JSON report instead of the table");
  check->add_option("--json-out", chk.json_out, "also write the JSON report here");

  SweepFlags swp;
  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo sweep writing CSV files");
  sweep->add_option("--mode", swp.mode, "rates|angles|widths")
      ->required()
      ->check(CLI::IsMember({"rates", "angles", "widths"}));
  add_noise_flags(sweep, swp.noise, "--model");
  sweep->add_option("--angle", swp.angle, "true angle for rates and widths modes")
      ->capture_default_str();
  sweep->add_option("--samples", swp.samples)->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_option("--generations", swp.generations)->capture_default_str();
  sweep->add_option("--runs", swp.runs, "runs per axis value")->capture_default_str();
  sweep->add_option("--seed", swp.seed)->capture_default_str();
  sweep->add_option("--workers", swp.workers, "threads (0: all cores); results do not depend on it")
      ->capture_default_str();
  sweep->add_option("--rates", swp.rates, "error rates (default 2^-2 ... 2^-10)")->delimiter(',');
  sweep->add_option("--angles", swp.angles, "angles for --mode angles (default k*pi/16)")
      ->delimiter(',');
  sweep->add_option("--widths", swp.widths, "widths L for --mode widths")->delimiter(',');
  sweep->add_option("--out-dir", swp.out_dir)->required();

  OracleFlags orc;
  CLI::App* oracle = app.add_subcommand("oracle", "brute-force grid cross-checks");
  oracle->add_option("--instances", orc.instances)->capture_default_str();
  oracle->add_option("--grid-resolution", orc.grid, "grid cells per 2 pi")->capture_default_str();
  oracle->add_option("--arc-grid-resolution", orc.arc_grid,
                     "grid cells per 2 pi for the arc formula (default 10x)");
  oracle->add_option("--seed", orc.seed)->capture_default_str();
  oracle->add_option("--replay-out", orc.replay_out,
                     "write the first offending run record here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*check) return cmd_check(chk);
    if (*sweep) return cmd_sweep(swp);
    if (*oracle) return cmd_oracle(orc);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const rpe::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
