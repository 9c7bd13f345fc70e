#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "spamfilter/config.hpp"
#include "spamfilter/driftloop.hpp"

namespace spamfilter {

/// One dataset of a run. `test_path` binds a separate test file (ECML);
/// when empty the dataset is partitioned by the configured fraction.
struct DatasetSpec {
  std::string name;
  std::string path;
  std::string test_path;

  bool operator==(const DatasetSpec&) const = default;
};

/// Manifest lines: `name path [test_path]`, whitespace separated, `#`
/// comments. Relative paths resolve against `base_dir`.
std::vector<DatasetSpec> parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {},
                                        std::string_view source = "<manifest>");

/// The manifest entries, or the single dataset named by the config.
std::vector<DatasetSpec> resolve_datasets(const RunConfig& config);

struct LoadedDataset {
  std::string name;
  StreamPartition partition;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

LoadedDataset load_dataset(const DatasetSpec& spec, const RunConfig& config);

struct ExperimentRow {
  std::string dataset;
  std::string selector;
  SessionMode mode = SessionMode::Batch;
  MetricsReport metrics;  ///< over every test document
  double average_fpr = 0.0;
  double average_fnr = 0.0;
  std::size_t retrains = 0;
  std::size_t test_documents = 0;
  std::uint64_t partition_checksum = 0;

  static ExperimentRow from_session(const SessionReport& report);
};

struct ExperimentTable {
  std::string name;
  std::vector<ExperimentRow> rows;

  static std::string csv_header();
  std::string to_csv() const;
  std::string to_json() const;
};

/// A finished session together with the state it ended in.
struct ExperimentRun {
  SessionReport report;
  FilterState final_state;
};

struct ExperimentOutput {
  ExperimentTable table;
  std::vector<ExperimentRun> runs;
};

/// Batch sessions, one per configured selector, on every dataset.
ExperimentOutput run_experiment1(const RunConfig& config);

/// Paired Batch and Incremental sessions on the same partition, using the
/// first configured selector for the initial feature set. Throws when the
/// two sessions disagree on the partition checksum.
ExperimentOutput run_experiment2(const RunConfig& config);

/// `<dataset>_<selector>_<mode>`, the stem of every per-run artifact.
std::string run_stem(const SessionReport& report);

/// Writes `<table>.csv` or `<table>.json` plus, per run, the ROC TSV, the
/// session JSON, the retrain log and the checkpoint. Returns the written
/// paths in write order.
std::vector<std::filesystem::path> emit_report(const ExperimentOutput& output, const std::filesystem::path& dir,
                                               ReportFormat format);

/// Rebuilds a table from saved `*.session.json` files (sorted by name).
ExperimentTable table_from_sessions(const std::filesystem::path& dir, std::string name);

}  // namespace spamfilter
