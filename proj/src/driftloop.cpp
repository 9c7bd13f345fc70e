#include "spamfilter/driftloop.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "spamfilter/error.hpp"

namespace spamfilter {

std::string_view to_string(FprReference r) {
  return r == FprReference::PrevBatch ? "prev_batch" : "since_retrain";
}

std::string_view to_string(SessionMode m) { return m == SessionMode::Batch ? "batch" : "incremental"; }

FprReference parse_fpr_reference(std::string_view s) {
  if (s == "prev_batch") return FprReference::PrevBatch;
  if (s == "since_retrain") return FprReference::SinceRetrain;
  throw InvalidArgument("unknown FPR reference '" + std::string(s) + "' (prev_batch|since_retrain)");
}

SessionMode parse_session_mode(std::string_view s) {
  if (s == "batch") return SessionMode::Batch;
  if (s == "incremental") return SessionMode::Incremental;
  throw InvalidArgument("unknown mode '" + std::string(s) + "' (batch|incremental)");
}

std::string_view to_string(TriggerCause c) {
  switch (c) {
    case TriggerCause::None:
      return "none";
    case TriggerCause::AccuracyBelowRho:
      return "accuracy_below_rho";
    case TriggerCause::FprIncreased:
      return "fpr_increased";
  }
  return "none";
}

void DriftConfig::validate() const {
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rho", "must lie in (0, 1)");
  if (feature_dim < 1) throw ConfigError("n", "must be at least 1");
  train.validate();
}

namespace {

struct Vectorized {
  std::vector<SparseVector> vectors;
  std::vector<int> labels;
  std::vector<std::string> ids;
  std::unordered_map<std::string, const Document*> by_id;
};

Vectorized vectorize_labeled(const LabeledCorpus& corpus, const FeatureSet& fs) {
  Vectorized v;
  for (const auto& d : corpus) {
    if (d.label == Label::Unlabeled) continue;
    v.vectors.push_back(vectorize(d, fs));
    v.labels.push_back(label_sign(d.label));
    v.ids.push_back(d.id);
    if (!v.by_id.emplace(d.id, &d).second) throw InvalidArgument("duplicate document id '" + d.id + "'");
  }
  return v;
}

FilterState fit(const LabeledCorpus& corpus, FeatureSet features, const TrainConfig& train, std::size_t generation) {
  Vectorized data = vectorize_labeled(corpus, features);
  SmoResult solved = train_smo(data.vectors, data.labels, train, data.ids);
  FilterState state;
  state.generation = generation;
  state.features = std::move(features);
  state.model = std::move(solved.model);
  state.sv_documents.reserve(state.model.size());
  for (const auto& id : state.model.doc_ids()) state.sv_documents.push_back(*data.by_id.at(id));
  return state;
}

}  // namespace

FilterState run_batch_phase(const LabeledCorpus& training, const DriftConfig& config) {
  config.validate();
  if (training.spam_count() == 0 || training.legit_count() == 0)
    throw TrainError("training set must contain both spam and legitimate documents");
  const CorpusCounts counts = count_stats(training);
  return fit(training, select_features(config.selector, counts, config.feature_dim), config.train, 0);
}

BatchEvaluation evaluate_batch(const FilterState& state, const LabeledCorpus& batch) {
  if (batch.empty()) throw InvalidArgument("evaluate_batch: empty batch");
  BatchEvaluation out;
  std::vector<Label> predicted;
  predicted.reserve(batch.size());
  for (const auto& d : batch) {
    if (d.label == Label::Unlabeled) throw InvalidArgument("evaluate_batch: document '" + d.id + "' has no label");
    const Prediction p = predict(state.model, vectorize(d, state.features));
    predicted.push_back(p.label);
    out.result.scores.push_back(p.score);
    out.result.truths.push_back(d.label);
    if (p.label != d.label) out.misclassified.push_back(d);
  }
  out.result.confusion = confusion(predicted, out.result.truths);
  return out;
}

TriggerDecision check_validation(const std::vector<BatchRecord>& history, const DriftConfig& config,
                                 std::size_t batch_index) {
  if (history.empty()) throw InvalidArgument("check_validation: empty history");
  TriggerDecision d;
  d.batch_index = batch_index;
  const BatchRecord& latest = history.back();
  if (latest.accuracy <= config.rho) {
    d.cause = TriggerCause::AccuracyBelowRho;
  } else if (history.size() >= 2) {
    const BatchRecord& reference =
        config.fpr_trigger == FprReference::PrevBatch ? history[history.size() - 2] : history.front();
    if (latest.fpr && reference.fpr && *latest.fpr > *reference.fpr) d.cause = TriggerCause::FprIncreased;
  }
  d.fired = d.cause != TriggerCause::None;
  return d;
}

RetrainOutcome incremental_retrain(const FilterState& state, const TriggerDecision& trigger,
                                   const LabeledCorpus& violating_batch, const DriftConfig& config) {
  if (!trigger.fired) throw InvalidArgument("incremental_retrain: trigger did not fire");

  std::map<std::size_t, Document> by_arrival;
  std::unordered_set<std::string> seen_ids;
  auto add = [&](const Document& d) {
    if (d.label == Label::Unlabeled) throw InvalidArgument("retraining document '" + d.id + "' has no label");
    if (seen_ids.insert(d.id).second) by_arrival.emplace(d.arrival_index, d);
  };
  for (const auto& d : state.misclassified) add(d);
  for (const auto& d : state.sv_documents) add(d);
  for (const auto& d : violating_batch) add(d);
  std::vector<Document> docs;
  docs.reserve(by_arrival.size());
  for (auto& [arrival, d] : by_arrival) docs.push_back(std::move(d));
  const LabeledCorpus retrain_set(std::move(docs));
  if (retrain_set.spam_count() == 0 || retrain_set.legit_count() == 0)
    throw TrainError("retraining set of " + std::to_string(retrain_set.size()) +
                     " documents holds a single class; session halted");

  FeatureUpdate update = update_feature_set(state.features, retrain_set, state.features.size());

  RetrainOutcome out;
  out.state = fit(retrain_set, std::move(update.features), config.train, state.generation + 1);

  RetrainEvent& e = out.event;
  e.batch_index = trigger.batch_index;
  e.generation = out.state.generation;
  e.cause = trigger.cause;
  e.replaced = update.replaced;
  e.added = std::move(update.added);
  e.removed = std::move(update.removed);
  e.retrain_size = retrain_set.size();
  e.previous_sv_count = state.sv_documents.size();
  e.misclassified_count = state.misclassified.size();
  e.batch_size = violating_batch.size();
  e.new_sv_count = out.state.model.size();
  for (const auto& id : out.state.model.doc_ids()) {
    if (!seen_ids.contains(id)) e.new_svs_within_retrain_set = false;
  }
  e.accuracy_before = rates(evaluate_batch(state, violating_batch).result.confusion).accuracy;
  e.accuracy_after = rates(evaluate_batch(out.state, violating_batch).result.confusion).accuracy;
  return out;
}

SessionResult run_session(const StreamPartition& partition, const DriftConfig& config, SessionMode mode) {
  SessionResult result;
  SessionReport& report = result.report;
  report.mode = mode;
  report.partition_checksum = partition.checksum();
  report.training_size = partition.training.size();

  FilterState state = run_batch_phase(partition.training, config);
  report.feature_dim = state.features.size();
  std::size_t seen = partition.training.size();

  for (std::size_t k = 0; k < partition.test_batches.size(); ++k) {
    const LabeledCorpus& batch = partition.test_batches[k];
    BatchEvaluation eval = evaluate_batch(state, batch);
    seen += batch.size();

    BatchReport br;
    br.index = k;
    br.generation = state.generation;
    br.size = batch.size();
    br.first_arrival = batch[0].arrival_index;
    br.confusion = eval.result.confusion;
    br.metrics = evaluate(br.confusion);
    report.cumulative += br.confusion;
    report.scores.insert(report.scores.end(), eval.result.scores.begin(), eval.result.scores.end());
    report.truths.insert(report.truths.end(), eval.result.truths.begin(), eval.result.truths.end());

    if (mode == SessionMode::Incremental) {
      state.misclassified.insert(state.misclassified.end(), eval.misclassified.begin(), eval.misclassified.end());
      state.history.push_back({br.metrics.accuracy, br.metrics.fpr});
      const TriggerDecision decision = check_validation(state.history, config, k);
      br.trigger = decision.cause;
      report.batches.push_back(br);
      if (decision.fired) {
        try {
          RetrainOutcome outcome = incremental_retrain(state, decision, batch, config);
          outcome.event.documents_seen = seen;
          report.retrains.push_back(std::move(outcome.event));
          state = std::move(outcome.state);
        } catch (const TrainError& e) {
          report.halted = true;
          report.halt_reason = e.what();
          break;
        }
      }
    } else {
      report.batches.push_back(br);
    }
  }

  if (report.cumulative.total() > 0) report.final_metrics = evaluate(report.cumulative);
  double fpr_sum = 0.0, fnr_sum = 0.0;
  std::size_t fpr_n = 0, fnr_n = 0;
  for (const auto& b : report.batches) {
    if (b.metrics.fpr) {
      fpr_sum += *b.metrics.fpr;
      ++fpr_n;
    }
    if (b.metrics.fnr) {
      fnr_sum += *b.metrics.fnr;
      ++fnr_n;
    }
  }
  report.average_fpr = fpr_n ? fpr_sum / static_cast<double>(fpr_n) : 0.0;
  report.average_fnr = fnr_n ? fnr_sum / static_cast<double>(fnr_n) : 0.0;
  result.final_state = std::move(state);
  return result;
}

}  // namespace spamfilter
