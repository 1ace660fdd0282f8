// File formats: JSON run records, JSON/table reports, CSV sweep outputs.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rpe/channel.hpp"
#include "rpe/checks.hpp"
#include "rpe/estimator.hpp"
#include "rpe/harness.hpp"

namespace rpe {

inline constexpr int kRunRecordSchemaVersion = 1;

/// A malformed or inconsistent input document.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunMetadata {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> run_index;
  std::optional<NoiseConfig> noise;
  /// Free-form provenance, e.g. "oracle:hierarchy".
  std::string source;

  friend bool operator==(const RunMetadata&, const RunMetadata&) = default;
};

bool operator==(const SpamConfig& a, const SpamConfig& b);
bool operator==(const NoiseConfig& a, const NoiseConfig& b);

/// One sequence of measured generations. The first `uncompared_prefix`
/// generations only seed the estimator (the secondary sequence's N = 1
/// bootstrap) and are excluded from cross-sequence comparison.
struct RunRecord {
  std::vector<GenerationData> generations;
  std::size_t uncompared_prefix = 0;
  std::optional<double> true_angle;
  RunMetadata metadata;

  std::vector<std::uint64_t> sequence() const;
  /// Throws SchemaError on violated invariants.
  void validate() const;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

std::string to_json(const RunRecord& record);
/// Throws SchemaError on malformed JSON or violated invariants.
RunRecord run_record_from_json(const std::string& text);

RunRecord read_run_record(const std::filesystem::path& path);
void write_run_record(const std::filesystem::path& path, const RunRecord& record);

/// analyze() over the record's generations.
RpeRun analyze(const RunRecord& record);

struct CheckSummary {
  ConsistencyReport report;
  std::vector<double> deltas;
  std::optional<double> width;
  std::vector<Angle> estimates;
};

/// Runs every applicable criterion on a primary record and optional
/// secondary record (its uncompared prefix removed before comparison).
CheckSummary check_records(const RunRecord& primary, const RunRecord* secondary,
                           std::optional<double> width = {});

std::string report_to_json(const CheckSummary& summary);
/// Fixed-width table: criterion, flagged generation, discrepancy.
void print_report_table(std::ostream& out, const CheckSummary& summary);

/// histogram.csv: axis_value,criterion,bin,count sorted by (axis, criterion,
/// bin). means.csv: axis_value,criterion,mean_discrepancy. README.txt: the
/// conventions. Files are written with LF line endings.
void write_sweep_outputs(const std::filesystem::path& dir, const SweepResult& result);
std::string histogram_csv(const SweepResult& result);
std::string means_csv(const SweepResult& result);
std::string sweep_readme(const SweepResult& result);

/// Shortest decimal form that round-trips a double.
std::string format_number(double x);

}  // namespace rpe
