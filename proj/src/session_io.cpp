// JSON rendering of session reports and the checkpoint text format.

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "spamfilter/driftloop.hpp"
#include "spamfilter/error.hpp"
#include "spamfilter/text_format.hpp"

namespace spamfilter {

using json = nlohmann::ordered_json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json cm_to_json(const ConfusionMatrix& cm) {
  return json{{"tp", cm.tp}, {"tn", cm.tn}, {"fp", cm.fp}, {"fn", cm.fn}};
}

ConfusionMatrix cm_from_json(const json& j) {
  return {j.at("tp").get<std::size_t>(), j.at("tn").get<std::size_t>(), j.at("fp").get<std::size_t>(),
          j.at("fn").get<std::size_t>()};
}

TriggerCause parse_cause(const std::string& s) {
  for (auto c : {TriggerCause::None, TriggerCause::AccuracyBelowRho, TriggerCause::FprIncreased})
    if (to_string(c) == s) return c;
  throw InvalidArgument("unknown trigger cause '" + s + "'");
}

}  // namespace

std::string SessionReport::to_json() const {
  json j;
  j["format"] = "spamfilter-session v1";
  j["dataset"] = dataset;
  j["selector"] = selector;
  j["mode"] = std::string(to_string(mode));
  j["partition_checksum"] = text::hex64(partition_checksum);
  j["training_size"] = training_size;
  j["feature_dim"] = feature_dim;
  j["halted"] = halted;
  j["halt_reason"] = halt_reason;
  j["cumulative"] = cm_to_json(cumulative);
  j["average_fpr"] = average_fpr;
  j["average_fnr"] = average_fnr;
  j["batches"] = json::array();
  for (const auto& b : batches) {
    j["batches"].push_back(json{{"index", b.index},
                                {"generation", b.generation},
                                {"size", b.size},
                                {"first_arrival", b.first_arrival},
                                {"confusion", cm_to_json(b.confusion)},
                                {"accuracy", b.metrics.accuracy},
                                {"fpr", optional_number(b.metrics.fpr)},
                                {"fnr", optional_number(b.metrics.fnr)},
                                {"trigger", std::string(to_string(b.trigger))}});
  }
  j["retrains"] = json::array();
  for (const auto& e : retrains) {
    j["retrains"].push_back(json{{"batch_index", e.batch_index},
                                 {"generation", e.generation},
                                 {"cause", std::string(to_string(e.cause))},
                                 {"replaced", e.replaced},
                                 {"added", e.added},
                                 {"removed", e.removed},
                                 {"retrain_size", e.retrain_size},
                                 {"previous_sv_count", e.previous_sv_count},
                                 {"misclassified_count", e.misclassified_count},
                                 {"batch_size", e.batch_size},
                                 {"documents_seen", e.documents_seen},
                                 {"new_sv_count", e.new_sv_count},
                                 {"new_svs_within_retrain_set", e.new_svs_within_retrain_set},
                                 {"accuracy_before", e.accuracy_before},
                                 {"accuracy_after", e.accuracy_after}});
  }
  j["scores"] = scores;
  j["truths"] = json::array();
  for (Label t : truths) j["truths"].push_back(label_sign(t));
  return j.dump(1) + "\n";
}

SessionReport SessionReport::from_json(std::string_view text) {
  SessionReport r;
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "spamfilter-session v1")
      throw InvalidArgument("unsupported session format");
    r.dataset = j.at("dataset").get<std::string>();
    r.selector = j.at("selector").get<std::string>();
    r.mode = parse_session_mode(j.at("mode").get<std::string>());
    const auto checksum = j.at("partition_checksum").get<std::string>();
    r.partition_checksum = std::stoull(checksum, nullptr, 16);
    r.training_size = j.at("training_size").get<std::size_t>();
    r.feature_dim = j.at("feature_dim").get<std::size_t>();
    r.halted = j.at("halted").get<bool>();
    r.halt_reason = j.at("halt_reason").get<std::string>();
    r.cumulative = cm_from_json(j.at("cumulative"));
    r.average_fpr = j.at("average_fpr").get<double>();
    r.average_fnr = j.at("average_fnr").get<double>();
    for (const auto& b : j.at("batches")) {
      BatchReport br;
      br.index = b.at("index").get<std::size_t>();
      br.generation = b.at("generation").get<std::size_t>();
      br.size = b.at("size").get<std::size_t>();
      br.first_arrival = b.at("first_arrival").get<std::size_t>();
      br.confusion = cm_from_json(b.at("confusion"));
      br.metrics = evaluate(br.confusion);
      br.trigger = parse_cause(b.at("trigger").get<std::string>());
      r.batches.push_back(br);
    }
    for (const auto& e : j.at("retrains")) {
      RetrainEvent ev;
      ev.batch_index = e.at("batch_index").get<std::size_t>();
      ev.generation = e.at("generation").get<std::size_t>();
      ev.cause = parse_cause(e.at("cause").get<std::string>());
      ev.replaced = e.at("replaced").get<std::size_t>();
      ev.added = e.at("added").get<std::vector<std::string>>();
      ev.removed = e.at("removed").get<std::vector<std::string>>();
      ev.retrain_size = e.at("retrain_size").get<std::size_t>();
      ev.previous_sv_count = e.at("previous_sv_count").get<std::size_t>();
      ev.misclassified_count = e.at("misclassified_count").get<std::size_t>();
      ev.batch_size = e.at("batch_size").get<std::size_t>();
      ev.documents_seen = e.at("documents_seen").get<std::size_t>();
      ev.new_sv_count = e.at("new_sv_count").get<std::size_t>();
      ev.new_svs_within_retrain_set = e.at("new_svs_within_retrain_set").get<bool>();
      ev.accuracy_before = e.at("accuracy_before").get<double>();
      ev.accuracy_after = e.at("accuracy_after").get<double>();
      r.retrains.push_back(std::move(ev));
    }
    r.scores = j.at("scores").get<std::vector<double>>();
    for (const auto& t : j.at("truths")) r.truths.push_back(label_from_sign(t.get<int>()));
  } catch (const json::exception& e) {
    throw ParseError("<session>", 0, e.what());
  }
  if (r.cumulative.total() > 0) r.final_metrics = evaluate(r.cumulative);
  return r;
}

// ---------------------------------------------------------------------------

namespace {
constexpr std::string_view kCheckpointMagic = "spamfilter-checkpoint v1";
}

std::string checkpoint_to_text(const FilterState& state) {
  std::ostringstream out;
  out << kCheckpointMagic << '\n';
  out << "generation " << state.generation << '\n';
  out << "misclassified " << state.misclassified.size() << '\n';
  for (const auto& d : state.misclassified) out << text::escape_token(d.id) << '\n';
  out << "features " << state.features.size() << '\n';
  out << state.features.to_text();
  out << "model\n";
  out << state.model.to_text();
  return out.str();
}

void save_checkpoint(const FilterState& state, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << checkpoint_to_text(state);
}

Checkpoint checkpoint_from_text(std::string_view text) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::string_view {
    if (pos >= text.size()) throw ParseError("<checkpoint>", line_no + 1, "unexpected end of checkpoint");
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    return line;
  };
  auto counted = [&](std::string_view key) -> std::size_t {
    auto line = next_line();
    if (line.substr(0, key.size()) != key || line.size() <= key.size() + 1 || line[key.size()] != ' ')
      throw ParseError("<checkpoint>", line_no, "expected '" + std::string(key) + " <count>'");
    try {
      return text::parse_u64(line.substr(key.size() + 1));
    } catch (const InvalidArgument& e) {
      throw ParseError("<checkpoint>", line_no, e.what());
    }
  };

  if (next_line() != kCheckpointMagic) throw ParseError("<checkpoint>", 1, "not a spamfilter checkpoint");
  Checkpoint cp;
  cp.generation = counted("generation");
  const std::size_t n_mis = counted("misclassified");
  for (std::size_t i = 0; i < n_mis; ++i) cp.misclassified_ids.push_back(text::unescape_token(next_line()));
  const std::size_t n_features = counted("features");
  std::string feature_text;
  for (std::size_t i = 0; i < n_features; ++i) {
    feature_text += next_line();
    feature_text += '\n';
  }
  cp.features = FeatureSet::from_text(feature_text);
  if (next_line() != "model") throw ParseError("<checkpoint>", line_no, "expected 'model'");
  cp.model = SvmModel::from_text(text.substr(std::min(pos, text.size())));
  if (cp.model.space() != cp.features.fingerprint())
    throw ParseError("<checkpoint>", line_no, "model was trained on a different feature set");
  return cp;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_text(ss.str());
}

FilterState restore_state(const Checkpoint& checkpoint, const LabeledCorpus& corpus) {
  std::unordered_map<std::string, const Document*> by_id;
  for (const auto& d : corpus) by_id.emplace(d.id, &d);
  auto resolve = [&](const std::string& id) -> const Document& {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw LoadError("checkpoint refers to unknown document '" + id + "'");
    return *it->second;
  };
  FilterState s;
  s.generation = checkpoint.generation;
  s.features = checkpoint.features;
  s.model = checkpoint.model;
  for (const auto& id : s.model.doc_ids()) s.sv_documents.push_back(resolve(id));
  for (const auto& id : checkpoint.misclassified_ids) s.misclassified.push_back(resolve(id));
  return s;
}

}  // namespace spamfilter
