#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spamfilter/corpus.hpp"
#include "spamfilter/driftloop.hpp"
#include "spamfilter/selectors.hpp"
#include "spamfilter/svm.hpp"

namespace spamfilter {

enum class DatasetFormat { Enron, Pu, Ecml, Synth };

std::string_view to_string(DatasetFormat f);
DatasetFormat parse_dataset_format(std::string_view s);

enum class ReportFormat { Csv, Json };

std::string_view to_string(ReportFormat f);
ReportFormat parse_report_format(std::string_view s);

struct RunConfig {
  std::string dataset;   ///< corpus directory or file; unused for synth
  std::string manifest;  ///< optional list of datasets, one per line
  DatasetFormat format = DatasetFormat::Enron;
  std::vector<Selector> selectors{Selector::Tfdcr};
  std::size_t n = 500;
  double rho = 0.9;
  double c = 1.0;
  Kernel kernel;
  SessionMode mode = SessionMode::Batch;
  std::uint64_t seed = 1;
  std::string output = "results";
  ReportFormat report = ReportFormat::Csv;
  double train_fraction = 1.0 / 3.0;
  std::size_t batches = 10;
  std::optional<bool> chronological;  ///< unset: whatever the format supports
  FprReference fpr_trigger = FprReference::PrevBatch;
  double kkt_tolerance = 1e-3;
  std::size_t max_passes = 10000;
  std::string stopwords;  ///< empty: built-in English list
  PuOptions pu;
  SynthParams synth;

  /// Throws ConfigError naming the offending key and its bound.
  void validate() const;

  bool effective_chronological() const;
  DriftConfig drift_config(Selector selector) const;

  bool operator==(const RunConfig&) const = default;
};

/// Every key accepted by parse_config, in dump order.
const std::vector<std::string>& config_keys();

/// `key = value` lines, `#` comments, blank lines ignored. Later duplicates
/// win. Throws ParseError on a line without '='.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text,
                                                                  std::string_view source = "<config>");

/// Applies file entries, then overrides, then validates. Unknown keys are
/// collected and reported together.
RunConfig parse_config(const std::vector<std::pair<std::string, std::string>>& file_entries,
                       const std::vector<std::pair<std::string, std::string>>& overrides = {});

RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Canonical `key = value` rendering; parse_config(dump) reproduces the config.
std::string dump_config(const RunConfig& config);

}  // namespace spamfilter
