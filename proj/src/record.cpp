#include "rpe/record.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace rpe {

namespace {

using json = nlohmann::ordered_json;

json counts_json(const Counts& c) { return json::array({c.successes, c.trials}); }

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(std::string("missing field '") + key + "'");
  return *it;
}

std::uint64_t as_unsigned(const json& v, const char* what) {
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw SchemaError(std::string(what) + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double as_number(const json& v, const char* what) {
  if (!v.is_number()) throw SchemaError(std::string(what) + " must be a number");
  return v.get<double>();
}

Counts parse_counts(const json& v, const char* what) {
  if (!v.is_array() || v.size() != 2) {
    throw SchemaError(std::string(what) + " must be [successes, trials]");
  }
  return {static_cast<std::int64_t>(as_unsigned(v[0], what)),
          static_cast<std::int64_t>(as_unsigned(v[1], what))};
}

json noise_json(const NoiseConfig& n) {
  return {{"model", std::string(noise_kind_name(n.kind))},
          {"rate", n.rate},
          {"spam", n.spam.b_spam},
          {"spam_sine", n.spam.b_s}};
}

NoiseConfig parse_noise(const json& v) {
  if (!v.is_object()) throw SchemaError("metadata.noise must be an object");
  NoiseConfig n;
  const json& model = require(v, "model");
  if (!model.is_string()) throw SchemaError("noise model must be a string");
  try {
    n.kind = parse_noise_kind(model.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  n.rate = as_number(require(v, "rate"), "noise rate");
  if (v.contains("spam")) n.spam.b_spam = as_number(v["spam"], "spam");
  if (v.contains("spam_sine")) n.spam.b_s = as_number(v["spam_sine"], "spam_sine");
  try {
    n.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  return n;
}

json optional_index(const std::optional<std::size_t>& k) {
  return k ? json(*k) : json(nullptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("error writing " + path.string());
}

}  // namespace

bool operator==(const SpamConfig& a, const SpamConfig& b) {
  return a.b_spam == b.b_spam && a.b_s == b.b_s;
}

bool operator==(const NoiseConfig& a, const NoiseConfig& b) {
  return a.kind == b.kind && a.rate == b.rate && a.spam == b.spam;
}

std::vector<std::uint64_t> RunRecord::sequence() const {
  std::vector<std::uint64_t> out;
  out.reserve(generations.size());
  for (const GenerationData& g : generations) out.push_back(g.length);
  return out;
}

void RunRecord::validate() const {
  if (generations.empty()) throw SchemaError("record has no generations");
  try {
    for (const GenerationData& g : generations) g.validate();
    GenerationSequence seq(sequence());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  if (generations.front().length != 1) throw SchemaError("sequence must start at N = 1");
  if (uncompared_prefix >= generations.size()) {
    throw SchemaError("uncompared prefix covers the whole record");
  }
  if (true_angle && !std::isfinite(*true_angle)) throw SchemaError("true_angle must be finite");
}

std::string to_json(const RunRecord& record) {
  record.validate();
  json gens = json::array();
  for (const GenerationData& g : record.generations) {
    gens.push_back({{"N", g.length},
                    {"counts_c", counts_json(g.cosine)},
                    {"counts_s", counts_json(g.sine)}});
  }
  json doc = {{"schema_version", kRunRecordSchemaVersion},
              {"sequence", record.sequence()},
              {"uncompared_prefix", record.uncompared_prefix},
              {"generations", std::move(gens)}};
  if (record.true_angle) doc["true_angle"] = *record.true_angle;

  json meta = json::object();
  const RunMetadata& m = record.metadata;
  if (m.seed) meta["seed"] = *m.seed;
  if (m.run_index) meta["run_index"] = *m.run_index;
  if (m.noise) meta["noise"] = noise_json(*m.noise);
  if (!m.source.empty()) meta["source"] = m.source;
  if (!meta.empty()) doc["metadata"] = std::move(meta);
  return doc.dump(2) + "\n";
}

RunRecord run_record_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("record must be a JSON object");

  const std::uint64_t version = as_unsigned(require(doc, "schema_version"), "schema_version");
  if (version != kRunRecordSchemaVersion) {
    throw SchemaError("unsupported schema_version " + std::to_string(version));
  }

  const json& seq = require(doc, "sequence");
  const json& gens = require(doc, "generations");
  if (!seq.is_array() || !gens.is_array()) {
    throw SchemaError("sequence and generations must be arrays");
  }
  if (seq.size() != gens.size()) {
    throw SchemaError("sequence and generations differ in length");
  }

  RunRecord record;
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const json& g = gens[k];
    if (!g.is_object()) throw SchemaError("generation entries must be objects");
    GenerationData d;
    d.length = as_unsigned(require(g, "N"), "N");
    if (d.length != as_unsigned(seq[k], "sequence entry")) {
      throw SchemaError("generation " + std::to_string(k) + " disagrees with sequence");
    }
    d.cosine = parse_counts(require(g, "counts_c"), "counts_c");
    d.sine = parse_counts(require(g, "counts_s"), "counts_s");
    record.generations.push_back(d);
  }
  if (doc.contains("uncompared_prefix")) {
    record.uncompared_prefix = as_unsigned(doc["uncompared_prefix"], "uncompared_prefix");
  }
  if (doc.contains("true_angle") && !doc["true_angle"].is_null()) {
    record.true_angle = as_number(doc["true_angle"], "true_angle");
  }
  if (doc.contains("metadata")) {
    const json& meta = doc["metadata"];
    if (!meta.is_object()) throw SchemaError("metadata must be an object");
    if (meta.contains("seed")) record.metadata.seed = as_unsigned(meta["seed"], "seed");
    if (meta.contains("run_index")) {
      record.metadata.run_index = as_unsigned(meta["run_index"], "run_index");
    }
    if (meta.contains("noise")) record.metadata.noise = parse_noise(meta["noise"]);
    if (meta.contains("source")) {
      if (!meta["source"].is_string()) throw SchemaError("metadata.source must be a string");
      record.metadata.source = meta["source"].get<std::string>();
    }
  }
  record.validate();
  return record;
}

RunRecord read_run_record(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return run_record_from_json(buf.str());
}

void write_run_record(const std::filesystem::path& path, const RunRecord& record) {
  write_text(path, to_json(record));
}

RpeRun analyze(const RunRecord& record) {
  record.validate();
  return analyze(std::span<const GenerationData>(record.generations));
}

CheckSummary check_records(const RunRecord& primary, const RunRecord* secondary,
                           std::optional<double> width) {
  if (primary.uncompared_prefix != 0) {
    throw SchemaError("the primary record must not have an uncompared prefix");
  }
  const RpeRun run = analyze(primary);
  std::optional<RpeRun> other;
  if (secondary != nullptr) {
    other = analyze(*secondary).without_prefix(secondary->uncompared_prefix);
    if (other->lengths.size() != run.lengths.size()) {
      throw SchemaError("secondary record must have one compared generation per primary generation");
    }
    for (std::size_t k = 0; k < run.lengths.size(); ++k) {
      if (run.lengths[k] >= other->lengths[k]) {
        throw SchemaError("secondary lengths must exceed primary lengths generation by generation");
      }
    }
  }

  CheckSummary out;
  ReportOptions options;
  options.width = width;
  std::optional<Angle> truth;
  if (primary.true_angle) truth = Angle(*primary.true_angle);
  out.report = report(run, other ? &*other : nullptr, truth, options);
  const DeltaSchedule schedule = uniform_schedule(run.lengths);
  out.deltas.assign(schedule.deltas().begin(), schedule.deltas().end());
  out.width = width;
  out.estimates = run.estimates;
  return out;
}

std::string report_to_json(const CheckSummary& summary) {
  const ConsistencyReport& rep = summary.report;
  json criteria = json::array();
  for (const ConsistencyVerdict& v : rep.verdicts) {
    json entry = {{"criterion", std::string(criterion_name(v.criterion))},
                  {"id", static_cast<int>(v.criterion)},
                  {"flagged", optional_index(v.flagged)},
                  {"recorded_flag", rep.recorded_flag(v.criterion)}};
    if (rep.truth_known) entry["discrepancy"] = rep.discrepancy(v.criterion);
    criteria.push_back(std::move(entry));
  }
  json estimates = json::array();
  for (Angle a : summary.estimates) estimates.push_back(a.radians());

  json doc = {{"k_max", rep.k_max},
              {"criteria", std::move(criteria)},
              {"estimates", std::move(estimates)},
              {"schedule",
               {{"rule", "uniform"},
                {"delta_0", "copies delta_1"},
                {"deltas", summary.deltas}}},
              {"angular_historical_mode", summary.width ? "length" : "membership"}};
  if (summary.width) doc["width"] = *summary.width;
  if (rep.truth_known) {
    doc["actual_failure"] = optional_index(rep.actual_failure);
    doc["recorded_actual"] = rep.recorded_actual();
  }
  return doc.dump(2) + "\n";
}

void print_report_table(std::ostream& out, const CheckSummary& summary) {
  const ConsistencyReport& rep = summary.report;
  auto fmt = [&](std::optional<std::size_t> k) {
    return k ? std::to_string(*k) : std::string("none");
  };
  out << std::left << std::setw(24) << "criterion" << std::setw(10) << "flagged";
  if (rep.truth_known) out << std::setw(12) << "discrepancy";
  out << "\n";
  for (const ConsistencyVerdict& v : rep.verdicts) {
    out << std::setw(24) << criterion_name(v.criterion) << std::setw(10) << fmt(v.flagged);
    if (rep.truth_known) out << std::setw(12) << rep.discrepancy(v.criterion);
    out << "\n";
  }
  if (rep.truth_known) out << "actual failure: " << fmt(rep.actual_failure) << "\n";
  out << "k_max: " << rep.k_max << " (\"none\" is recorded as " << rep.k_max + 1 << ")\n";
}

std::string format_number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf, end);
}

std::string histogram_csv(const SweepResult& result) {
  struct Row {
    double axis;
    std::string criterion;
    long bin;
    std::size_t count;
  };
  std::vector<Row> rows;
  for (const SweepSeries& s : result.series) {
    for (const auto& [bin, count] : s.histogram) rows.push_back({s.axis_value, s.label, bin, count});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.axis, a.criterion, a.bin) < std::tie(b.axis, b.criterion, b.bin);
  });
  std::string out = "axis_value,criterion,bin,count\n";
  for (const Row& r : rows) {
    out += format_number(r.axis) + "," + r.criterion + "," + std::to_string(r.bin) + "," +
           std::to_string(r.count) + "\n";
  }
  return out;
}

std::string means_csv(const SweepResult& result) {
  std::vector<const SweepSeries*> rows;
  for (const SweepSeries& s : result.series) rows.push_back(&s);
  std::stable_sort(rows.begin(), rows.end(), [](const SweepSeries* a, const SweepSeries* b) {
    return std::tie(a->axis_value, a->label) < std::tie(b->axis_value, b->label);
  });
  std::string out = "axis_value,criterion,mean_discrepancy\n";
  for (const SweepSeries* s : rows) {
    out += format_number(s->axis_value) + "," + s->label + "," + format_number(s->mean) + "\n";
  }
  return out;
}

std::string sweep_readme(const SweepResult& result) {
  std::ostringstream out;
  out << "Sweep over " << result.axis_name << "; " << result.runs << " runs per axis value; seed "
      << result.seed << "; config " << result.config_digest << ".\n"
      << "histogram.csv: axis_value,criterion,bin,count. bin is the discrepancy\n"
      << "  flagged generation - actual failure generation; negative means the check\n"
      << "  flagged before the estimates actually failed.\n"
      << "means.csv: axis_value,criterion,mean_discrepancy.\n"
      << "A check that never flags, or a run that never fails, is recorded at k_max + 1.\n"
      << "A generation with no usable signal counts as both a flag and a failure there.\n"
      << "Rows are sorted by axis value, then criterion, then bin.\n";
  return out.str();
}

void write_sweep_outputs(const std::filesystem::path& dir, const SweepResult& result) {
  std::filesystem::create_directories(dir);
  write_text(dir / "histogram.csv", histogram_csv(result));
  write_text(dir / "means.csv", means_csv(result));
  write_text(dir / "README.txt", sweep_readme(result));
}

}  // namespace rpe
