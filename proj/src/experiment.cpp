#include "spamfilter/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "spamfilter/error.hpp"
#include "spamfilter/text_format.hpp"

namespace spamfilter {

namespace fs = std::filesystem;
using text::format_double;

std::vector<DatasetSpec> parse_manifest(std::string_view text, const fs::path& base_dir, std::string_view source) {
  std::vector<DatasetSpec> out;
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (base_dir / p).string(); };
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> parts;
    for (std::string f; fields >> f;) parts.push_back(f);
    if (parts.empty()) continue;
    if (parts.size() < 2 || parts.size() > 3)
      throw ParseError(std::string(source), line_no, "expected 'name path [test_path]'");
    for (const auto& d : out)
      if (d.name == parts[0]) throw ParseError(std::string(source), line_no, "duplicate dataset '" + parts[0] + "'");
    out.push_back({parts[0], resolve(parts[1]), parts.size() == 3 ? resolve(parts[2]) : std::string()});
  }
  if (out.empty()) throw ParseError(std::string(source), line_no, "manifest lists no datasets");
  return out;
}

std::vector<DatasetSpec> resolve_datasets(const RunConfig& config) {
  if (!config.manifest.empty()) {
    std::ifstream in(config.manifest, std::ios::binary);
    if (!in) throw LoadError("cannot open manifest " + config.manifest);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str(), fs::path(config.manifest).parent_path(), config.manifest);
  }
  if (config.format == DatasetFormat::Synth) return {{"synth", "", ""}};
  fs::path p(config.dataset);
  std::string name = p.filename().string();
  if (name.empty()) name = p.parent_path().filename().string();
  if (name.empty()) name = "dataset";
  return {{name, config.dataset, ""}};
}

namespace {

LabeledCorpus labeled_only(const LabeledCorpus& corpus, std::size_t arrival_offset = 0) {
  std::vector<Document> docs;
  for (const auto& d : corpus) {
    if (d.label == Label::Unlabeled) continue;
    docs.push_back(d);
    docs.back().arrival_index += arrival_offset;
  }
  return LabeledCorpus(std::move(docs));
}

void absorb(LoadedDataset& out, LoadResult&& r) {
  out.skipped += r.skipped;
  for (auto& w : r.warnings) out.warnings.push_back(std::move(w));
}

}  // namespace

LoadedDataset load_dataset(const DatasetSpec& spec, const RunConfig& config) {
  LoadedDataset out;
  out.name = spec.name;
  const StopList custom = config.stopwords.empty() ? StopList() : StopList::from_file(config.stopwords);
  const StopList& stoplist = config.stopwords.empty() ? StopList::english() : custom;

  if (!spec.test_path.empty()) {
    if (config.format != DatasetFormat::Ecml)
      throw ConfigError("manifest", "a separate test file is only supported for the ecml format");
    LoadResult train = load_ecml(spec.path);
    LoadResult test = load_ecml(spec.test_path);
    out.partition.training = labeled_only(train.corpus);
    const std::size_t offset = train.corpus.empty() ? 0 : train.corpus.documents().back().arrival_index + 1;
    out.partition.test_batches = split_batches(labeled_only(test.corpus, offset), config.batches);
    absorb(out, std::move(train));
    absorb(out, std::move(test));
    return out;
  }

  LabeledCorpus corpus;
  switch (config.format) {
    case DatasetFormat::Synth:
      corpus = synth_drift(config.seed, config.synth);
      break;
    case DatasetFormat::Enron: {
      LoadResult r = load_enron(spec.path, stoplist);
      corpus = std::move(r.corpus);
      absorb(out, std::move(r));
      break;
    }
    case DatasetFormat::Pu: {
      LoadResult r = load_pu(spec.path, config.pu, stoplist);
      corpus = std::move(r.corpus);
      absorb(out, std::move(r));
      break;
    }
    case DatasetFormat::Ecml: {
      LoadResult r = load_ecml(spec.path);
      corpus = labeled_only(r.corpus);
      absorb(out, std::move(r));
      break;
    }
  }
  out.partition = partition_stream(corpus, config.train_fraction, config.batches, config.effective_chronological(),
                                   config.seed);
  return out;
}

// ---------------------------------------------------------------------------

ExperimentRow ExperimentRow::from_session(const SessionReport& report) {
  ExperimentRow row;
  row.dataset = report.dataset;
  row.selector = report.selector;
  row.mode = report.mode;
  row.metrics = report.final_metrics;
  row.average_fpr = report.average_fpr;
  row.average_fnr = report.average_fnr;
  row.retrains = report.retrains.size();
  row.test_documents = report.cumulative.total();
  row.partition_checksum = report.partition_checksum;
  return row;
}

std::string ExperimentTable::csv_header() {
  return "dataset,selector,mode,accuracy,mcc,micro_f1,macro_f1,avg_fpr,avg_fnr,fpr,fnr,retrains,test_documents,"
         "partition_checksum";
}

std::string ExperimentTable::to_csv() const {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) {
    out += r.dataset + "," + r.selector + "," + std::string(to_string(r.mode)) + "," +
           format_double(r.metrics.accuracy) + "," + format_double(r.metrics.mcc) + "," +
           format_double(r.metrics.micro_f1) + "," + format_double(r.metrics.macro_f1) + "," +
           format_double(r.average_fpr) + "," + format_double(r.average_fnr) + "," + opt(r.metrics.fpr) + "," +
           opt(r.metrics.fnr) + "," + std::to_string(r.retrains) + "," + std::to_string(r.test_documents) + "," +
           text::hex64(r.partition_checksum) + "\n";
  }
  return out;
}

std::string ExperimentTable::to_json() const {
  using json = nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j;
  j["table"] = name;
  j["rows"] = json::array();
  for (const auto& r : rows) {
    j["rows"].push_back(json{{"dataset", r.dataset},
                             {"selector", r.selector},
                             {"mode", std::string(to_string(r.mode))},
                             {"accuracy", r.metrics.accuracy},
                             {"mcc", r.metrics.mcc},
                             {"micro_f1", r.metrics.micro_f1},
                             {"macro_f1", r.metrics.macro_f1},
                             {"avg_fpr", r.average_fpr},
                             {"avg_fnr", r.average_fnr},
                             {"fpr", opt(r.metrics.fpr)},
                             {"fnr", opt(r.metrics.fnr)},
                             {"retrains", r.retrains},
                             {"test_documents", r.test_documents},
                             {"partition_checksum", text::hex64(r.partition_checksum)}});
  }
  return j.dump(1) + "\n";
}

namespace {

ExperimentRun run_one(const LoadedDataset& data, const RunConfig& config, Selector selector, SessionMode mode) {
  SessionResult s = run_session(data.partition, config.drift_config(selector), mode);
  s.report.dataset = data.name;
  s.report.selector = std::string(to_string(selector));
  return {std::move(s.report), std::move(s.final_state)};
}

}  // namespace

ExperimentOutput run_experiment1(const RunConfig& config) {
  config.validate();
  if (config.mode != SessionMode::Batch) throw ConfigError("mode", "experiment 1 requires mode = batch");
  ExperimentOutput out;
  out.table.name = "experiment1";
  for (const auto& spec : resolve_datasets(config)) {
    const LoadedDataset data = load_dataset(spec, config);
    for (Selector sel : config.selectors) {
      ExperimentRun run = run_one(data, config, sel, SessionMode::Batch);
      out.table.rows.push_back(ExperimentRow::from_session(run.report));
      out.runs.push_back(std::move(run));
    }
  }
  return out;
}

ExperimentOutput run_experiment2(const RunConfig& config) {
  config.validate();
  ExperimentOutput out;
  out.table.name = "experiment2";
  const Selector sel = config.selectors.front();
  for (const auto& spec : resolve_datasets(config)) {
    const LoadedDataset data = load_dataset(spec, config);
    ExperimentRun batch = run_one(data, config, sel, SessionMode::Batch);
    ExperimentRun incremental = run_one(data, config, sel, SessionMode::Incremental);
    if (batch.report.partition_checksum != incremental.report.partition_checksum)
      throw Error("batch and incremental sessions saw different partitions on " + data.name);
    out.table.rows.push_back(ExperimentRow::from_session(batch.report));
    out.table.rows.push_back(ExperimentRow::from_session(incremental.report));
    out.runs.push_back(std::move(batch));
    out.runs.push_back(std::move(incremental));
  }
  return out;
}

std::string run_stem(const SessionReport& report) {
  return report.dataset + "_" + report.selector + "_" + std::string(to_string(report.mode));
}

namespace {

void write_file(const fs::path& path, const std::string& content, std::vector<fs::path>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
  written.push_back(path);
}

std::string retrain_log(const SessionReport& report) {
  std::string out =
      "batch\tgeneration\tcause\treplaced\tretrain_size\tprevious_sv\tmisclassified\tbatch_size\tdocuments_seen\t"
      "new_sv\taccuracy_before\taccuracy_after\tadded\tremoved\n";
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (const auto& t : v) s += (s.empty() ? "" : ",") + text::escape_token(t);
    return s;
  };
  for (const auto& e : report.retrains) {
    out += std::to_string(e.batch_index) + "\t" + std::to_string(e.generation) + "\t" + std::string(to_string(e.cause)) +
           "\t" + std::to_string(e.replaced) + "\t" + std::to_string(e.retrain_size) + "\t" +
           std::to_string(e.previous_sv_count) + "\t" + std::to_string(e.misclassified_count) + "\t" +
           std::to_string(e.batch_size) + "\t" + std::to_string(e.documents_seen) + "\t" +
           std::to_string(e.new_sv_count) + "\t" + format_double(e.accuracy_before) + "\t" +
           format_double(e.accuracy_after) + "\t" + join(e.added) + "\t" + join(e.removed) + "\n";
  }
  return out;
}

}  // namespace

std::vector<fs::path> emit_report(const ExperimentOutput& output, const fs::path& dir, ReportFormat format) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  std::vector<fs::path> written;
  if (format == ReportFormat::Csv) {
    write_file(dir / (output.table.name + ".csv"), output.table.to_csv(), written);
  } else {
    write_file(dir / (output.table.name + ".json"), output.table.to_json(), written);
  }
  for (const auto& run : output.runs) {
    const std::string stem = run_stem(run.report);
    const auto& r = run.report;
    const bool both = std::find(r.truths.begin(), r.truths.end(), Label::Spam) != r.truths.end() &&
                      std::find(r.truths.begin(), r.truths.end(), Label::Legitimate) != r.truths.end();
    if (both) write_file(dir / (stem + ".roc.tsv"), roc_to_tsv(roc_points(r.scores, r.truths)), written);
    write_file(dir / (stem + ".session.json"), r.to_json(), written);
    if (r.mode == SessionMode::Incremental) write_file(dir / (stem + ".retrains.tsv"), retrain_log(r), written);
    write_file(dir / (stem + ".ckpt"), checkpoint_to_text(run.final_state), written);
  }
  return written;
}

ExperimentTable table_from_sessions(const fs::path& dir, std::string name) {
  if (!fs::is_directory(dir)) throw LoadError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string fname = entry.path().filename().string();
    if (entry.is_regular_file() && fname.size() > 13 && fname.ends_with(".session.json")) files.push_back(entry.path());
  }
  if (files.empty()) throw LoadError("no *.session.json files in " + dir.string());
  std::sort(files.begin(), files.end());
  ExperimentTable table;
  table.name = std::move(name);
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw LoadError("cannot open " + f.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
      table.rows.push_back(ExperimentRow::from_session(SessionReport::from_json(ss.str())));
    } catch (const ParseError& e) {
      throw ParseError(f.string(), e.line(), e.what());
    }
  }
  return table;
}

}  // namespace spamfilter
