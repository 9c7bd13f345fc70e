#include "spamfilter/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "spamfilter/error.hpp"
#include "spamfilter/text_format.hpp"

namespace spamfilter {

std::string_view to_string(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::Enron:
      return "enron";
    case DatasetFormat::Pu:
      return "pu";
    case DatasetFormat::Ecml:
      return "ecml";
    case DatasetFormat::Synth:
      return "synth";
  }
  return "enron";
}

DatasetFormat parse_dataset_format(std::string_view s) {
  for (auto f : {DatasetFormat::Enron, DatasetFormat::Pu, DatasetFormat::Ecml, DatasetFormat::Synth})
    if (to_string(f) == s) return f;
  throw InvalidArgument("unknown format '" + std::string(s) + "' (enron|pu|ecml|synth)");
}

std::string_view to_string(ReportFormat f) { return f == ReportFormat::Csv ? "csv" : "json"; }

ReportFormat parse_report_format(std::string_view s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  throw InvalidArgument("unknown report format '" + std::string(s) + "' (csv|json)");
}

namespace {

using text::format_double;

// Accepts plain decimals and simple fractions such as 1/3.
double parse_number(std::string_view s) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return text::parse_double(s);
  const double num = text::parse_double(text::trim(s.substr(0, slash)));
  const double den = text::parse_double(text::trim(s.substr(slash + 1)));
  if (den == 0.0) throw InvalidArgument("division by zero in '" + std::string(s) + "'");
  return num / den;
}

bool parse_bool(std::string_view s) {
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw InvalidArgument("expected a boolean, got '" + std::string(s) + "'");
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

std::vector<Selector> parse_selector_list(std::string_view s) {
  if (s == "all") return all_selectors();
  std::vector<Selector> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    if (comma == std::string_view::npos) comma = s.size();
    const Selector sel = parse_selector(text::trim(s.substr(start, comma - start)));
    for (Selector seen : out)
      if (seen == sel) throw InvalidArgument("selector '" + std::string(to_string(sel)) + "' listed twice");
    out.push_back(sel);
    start = comma + 1;
  }
  return out;
}

struct KeyHandler {
  std::string key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::size_t parse_size(std::string_view s) { return static_cast<std::size_t>(text::parse_u64(s)); }

const std::vector<KeyHandler>& handlers() {
  static const std::vector<KeyHandler> table = {
      {"dataset", [](RunConfig& c, std::string_view v) { c.dataset = v; },
       [](const RunConfig& c) { return c.dataset; }},
      {"manifest", [](RunConfig& c, std::string_view v) { c.manifest = v; },
       [](const RunConfig& c) { return c.manifest; }},
      {"format", [](RunConfig& c, std::string_view v) { c.format = parse_dataset_format(v); },
       [](const RunConfig& c) { return std::string(to_string(c.format)); }},
      {"selector", [](RunConfig& c, std::string_view v) { c.selectors = parse_selector_list(v); },
       [](const RunConfig& c) {
         std::string out;
         for (Selector s : c.selectors) out += (out.empty() ? "" : ",") + std::string(to_string(s));
         return out;
       }},
      {"n", [](RunConfig& c, std::string_view v) { c.n = parse_size(v); },
       [](const RunConfig& c) { return std::to_string(c.n); }},
      {"rho", [](RunConfig& c, std::string_view v) { c.rho = parse_number(v); },
       [](const RunConfig& c) { return format_double(c.rho); }},
      {"c", [](RunConfig& c, std::string_view v) { c.c = parse_number(v); },
       [](const RunConfig& c) { return format_double(c.c); }},
      {"kernel",
       [](RunConfig& c, std::string_view v) {
         if (v == "linear") {
           c.kernel.type = Kernel::Type::Linear;
         } else if (v == "rbf") {
           c.kernel.type = Kernel::Type::Rbf;
         } else {
           throw InvalidArgument("unknown kernel '" + std::string(v) + "' (linear|rbf)");
         }
       },
       [](const RunConfig& c) { return std::string(c.kernel.type == Kernel::Type::Linear ? "linear" : "rbf"); }},
      {"gamma", [](RunConfig& c, std::string_view v) { c.kernel.gamma = parse_number(v); },
       [](const RunConfig& c) { return format_double(c.kernel.gamma); }},
      {"mode", [](RunConfig& c, std::string_view v) { c.mode = parse_session_mode(v); },
       [](const RunConfig& c) { return std::string(to_string(c.mode)); }},
      {"seed", [](RunConfig& c, std::string_view v) { c.seed = text::parse_u64(v); },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      {"output", [](RunConfig& c, std::string_view v) { c.output = v; },
       [](const RunConfig& c) { return c.output; }},
      {"report", [](RunConfig& c, std::string_view v) { c.report = parse_report_format(v); },
       [](const RunConfig& c) { return std::string(to_string(c.report)); }},
      {"train_fraction", [](RunConfig& c, std::string_view v) { c.train_fraction = parse_number(v); },
       [](const RunConfig& c) { return format_double(c.train_fraction); }},
      {"batches", [](RunConfig& c, std::string_view v) { c.batches = parse_size(v); },
       [](const RunConfig& c) { return std::to_string(c.batches); }},
      {"chronological",
       [](RunConfig& c, std::string_view v) {
         if (v == "auto") {
           c.chronological.reset();
         } else {
           c.chronological = parse_bool(v);
         }
       },
       [](const RunConfig& c) { return c.chronological ? bool_text(*c.chronological) : std::string("auto"); }},
      {"fpr_trigger", [](RunConfig& c, std::string_view v) { c.fpr_trigger = parse_fpr_reference(v); },
       [](const RunConfig& c) { return std::string(to_string(c.fpr_trigger)); }},
      {"kkt_tolerance", [](RunConfig& c, std::string_view v) { c.kkt_tolerance = parse_number(v); },
       [](const RunConfig& c) { return format_double(c.kkt_tolerance); }},
      {"max_passes", [](RunConfig& c, std::string_view v) { c.max_passes = parse_size(v); },
       [](const RunConfig& c) { return std::to_string(c.max_passes); }},
      {"stopwords", [](RunConfig& c, std::string_view v) { c.stopwords = v; },
       [](const RunConfig& c) { return c.stopwords; }},
      {"pu_spam_marker", [](RunConfig& c, std::string_view v) { c.pu.spam_marker = v; },
       [](const RunConfig& c) { return c.pu.spam_marker; }},
      {"pu_legit_marker", [](RunConfig& c, std::string_view v) { c.pu.legit_marker = v; },
       [](const RunConfig& c) { return c.pu.legit_marker; }},
      {"pu_encoded", [](RunConfig& c, std::string_view v) { c.pu.encoded_tokens = parse_bool(v); },
       [](const RunConfig& c) { return bool_text(c.pu.encoded_tokens); }},
      {"synth_vocab", [](RunConfig& c, std::string_view v) { c.synth.vocab_size = parse_size(v); },
       [](const RunConfig& c) { return std::to_string(c.synth.vocab_size); }},
      {"synth_docs", [](RunConfig& c, std::string_view v) { c.synth.n_docs = parse_size(v); },
       [](const RunConfig& c) { return std::to_string(c.synth.n_docs); }},
      {"synth_drift_point", [](RunConfig& c, std::string_view v) { c.synth.drift_point = parse_size(v); },
       [](const RunConfig& c) { return std::to_string(c.synth.drift_point); }},
      {"synth_overlap", [](RunConfig& c, std::string_view v) { c.synth.overlap = parse_number(v); },
       [](const RunConfig& c) { return format_double(c.synth.overlap); }},
      {"synth_doc_length", [](RunConfig& c, std::string_view v) { c.synth.doc_length = parse_size(v); },
       [](const RunConfig& c) { return std::to_string(c.synth.doc_length); }},
      {"synth_background_size", [](RunConfig& c, std::string_view v) { c.synth.background_size = parse_size(v); },
       [](const RunConfig& c) { return std::to_string(c.synth.background_size); }},
      {"synth_background_rate", [](RunConfig& c, std::string_view v) { c.synth.background_rate = parse_number(v); },
       [](const RunConfig& c) { return format_double(c.synth.background_rate); }},
      {"synth_cross_rate", [](RunConfig& c, std::string_view v) { c.synth.cross_rate = parse_number(v); },
       [](const RunConfig& c) { return format_double(c.synth.cross_rate); }},
      {"synth_zipf", [](RunConfig& c, std::string_view v) { c.synth.zipf_exponent = parse_number(v); },
       [](const RunConfig& c) { return format_double(c.synth.zipf_exponent); }},
  };
  return table;
}

const KeyHandler* find_handler(std::string_view key) {
  for (const auto& h : handlers())
    if (h.key == key) return &h;
  return nullptr;
}

void apply(RunConfig& config, const std::vector<std::pair<std::string, std::string>>& entries,
           std::vector<std::string>& unknown) {
  for (const auto& [key, value] : entries) {
    const KeyHandler* h = find_handler(key);
    if (!h) {
      unknown.push_back(key);
      continue;
    }
    try {
      h->set(config, text::trim(value));
    } catch (const InvalidArgument& e) {
      throw ConfigError(key, e.what());
    }
  }
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& h : handlers()) out.push_back(h.key);
    return out;
  }();
  return keys;
}

void RunConfig::validate() const {
  if (format != DatasetFormat::Synth && dataset.empty() && manifest.empty())
    throw ConfigError("dataset", "a dataset path (or manifest) is required for format " +
                                     std::string(to_string(format)));
  if (selectors.empty()) throw ConfigError("selector", "at least one selector is required");
  if (n < 1) throw ConfigError("n", "must be >= 1");
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rho", "must lie in (0, 1), got " + format_double(rho));
  if (!(c > 0.0)) throw ConfigError("c", "must be > 0, got " + format_double(c));
  if (kernel.type == Kernel::Type::Rbf && !(kernel.gamma > 0.0))
    throw ConfigError("gamma", "must be > 0 for the rbf kernel");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("train_fraction", "must lie in (0, 1), got " + format_double(train_fraction));
  if (batches < 1) throw ConfigError("batches", "must be >= 1");
  if (!(kkt_tolerance > 0.0)) throw ConfigError("kkt_tolerance", "must be > 0");
  if (max_passes < 1) throw ConfigError("max_passes", "must be >= 1");
  if (pu.spam_marker.empty()) throw ConfigError("pu_spam_marker", "must not be empty");
  if (pu.legit_marker.empty()) throw ConfigError("pu_legit_marker", "must not be empty");
  if (format == DatasetFormat::Synth) {
    if (synth.vocab_size < 1) throw ConfigError("synth_vocab", "must be >= 1");
    if (synth.n_docs < 2) throw ConfigError("synth_docs", "must be >= 2");
    if (synth.drift_point > synth.n_docs) throw ConfigError("synth_drift_point", "must be <= synth_docs");
    if (!(synth.overlap >= 0.0 && synth.overlap <= 1.0)) throw ConfigError("synth_overlap", "must lie in [0, 1]");
    if (synth.doc_length < 1) throw ConfigError("synth_doc_length", "must be >= 1");
    if (!(synth.background_rate >= 0.0 && synth.background_rate < 1.0))
      throw ConfigError("synth_background_rate", "must lie in [0, 1)");
    if (!(synth.cross_rate >= 0.0 && synth.background_rate + synth.cross_rate < 1.0))
      throw ConfigError("synth_cross_rate", "must be >= 0 with synth_background_rate + synth_cross_rate < 1");
    if (synth.background_rate > 0.0 && synth.background_size < 1)
      throw ConfigError("synth_background_size", "must be >= 1 when synth_background_rate > 0");
    if (!(synth.zipf_exponent >= 0.0)) throw ConfigError("synth_zipf", "must be >= 0");
  }
}

bool RunConfig::effective_chronological() const {
  if (chronological) return *chronological;
  // PU folders carry no usable arrival order.
  return format != DatasetFormat::Pu;
}

DriftConfig RunConfig::drift_config(Selector selector) const {
  DriftConfig d;
  d.rho = rho;
  d.fpr_trigger = fpr_trigger;
  d.feature_dim = n;
  d.selector = selector;
  d.train.c = c;
  d.train.kernel = kernel;
  d.train.kkt_tolerance = kkt_tolerance;
  d.train.max_passes = max_passes;
  return d;
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text, std::string_view source) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(std::string(source), line_no, "expected 'key = value'");
    const auto key = text::trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(std::string(source), line_no, "empty key");
    out.emplace_back(std::string(key), std::string(text::trim(line.substr(eq + 1))));
  }
  return out;
}

RunConfig parse_config(const std::vector<std::pair<std::string, std::string>>& file_entries,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig config;
  std::vector<std::string> unknown;
  apply(config, file_entries, unknown);
  apply(config, overrides, unknown);
  if (!unknown.empty()) {
    std::string list;
    for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError("", "unknown keys: " + list);
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(parse_key_values(ss.str(), path.string()), overrides);
}

std::string dump_config(const RunConfig& config) {
  std::string out;
  for (const auto& h : handlers()) out += h.key + " = " + h.get(config) + "\n";
  return out;
}

}  // namespace spamfilter
