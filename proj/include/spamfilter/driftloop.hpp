#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spamfilter/corpus.hpp"
#include "spamfilter/features.hpp"
#include "spamfilter/metrics.hpp"
#include "spamfilter/selectors.hpp"
#include "spamfilter/svm.hpp"

namespace spamfilter {

enum class FprReference {
  PrevBatch,    ///< compare with the previous batch of the same generation
  SinceRetrain  ///< compare with the first batch after the last (re)training
};

enum class SessionMode { Batch, Incremental };

std::string_view to_string(FprReference r);
std::string_view to_string(SessionMode m);
FprReference parse_fpr_reference(std::string_view s);
SessionMode parse_session_mode(std::string_view s);

struct DriftConfig {
  double rho = 0.9;  ///< retrain when batch accuracy <= rho
  FprReference fpr_trigger = FprReference::PrevBatch;
  std::size_t feature_dim = 500;
  Selector selector = Selector::Tfdcr;  ///< initial feature selection only
  TrainConfig train;

  void validate() const;
};

struct BatchRecord {
  double accuracy = 0.0;
  std::optional<double> fpr;
};

/// Everything the incremental loop mutates between batches.
struct FilterState {
  std::size_t generation = 0;
  FeatureSet features;
  SvmModel model;
  std::vector<Document> sv_documents;  ///< parallel to model support vectors
  std::vector<Document> misclassified; ///< Mcm since the last retrain, true labels attached
  std::vector<BatchRecord> history;    ///< batches evaluated since the last retrain
};

enum class TriggerCause { None, AccuracyBelowRho, FprIncreased };
std::string_view to_string(TriggerCause c);

struct TriggerDecision {
  bool fired = false;
  TriggerCause cause = TriggerCause::None;
  std::size_t batch_index = 0;
};

struct BatchResult {
  ConfusionMatrix confusion;
  std::vector<double> scores;
  std::vector<Label> truths;
};

struct BatchEvaluation {
  BatchResult result;
  std::vector<Document> misclassified;
};

/// Pass I: select the initial feature set on `training` and fit the SVM.
FilterState run_batch_phase(const LabeledCorpus& training, const DriftConfig& config);

/// Pass II on one batch. Documents must be labeled; the labels stand in for
/// user feedback.
BatchEvaluation evaluate_batch(const FilterState& state, const LabeledCorpus& batch);

/// Accuracy <= rho wins over an FPR increase. The FPR rule needs a reference
/// batch, so it never fires on the first batch after (re)training, nor when
/// either side lacks legitimate documents.
TriggerDecision check_validation(const std::vector<BatchRecord>& history, const DriftConfig& config,
                                 std::size_t batch_index = 0);

struct RetrainEvent {
  std::size_t batch_index = 0;
  std::size_t generation = 0;  ///< generation produced by this retrain
  TriggerCause cause = TriggerCause::None;
  std::size_t replaced = 0;
  std::vector<std::string> added;
  std::vector<std::string> removed;
  std::size_t retrain_size = 0;          ///< |Rtrem|
  std::size_t previous_sv_count = 0;     ///< support vectors before the retrain
  std::size_t misclassified_count = 0;   ///< |Mcm| before the retrain
  std::size_t batch_size = 0;            ///< |Ts_k|
  std::size_t documents_seen = 0;        ///< training plus every batch so far
  std::size_t new_sv_count = 0;
  bool new_svs_within_retrain_set = true;
  double accuracy_before = 0.0;          ///< the violating batch, old model
  double accuracy_after = 0.0;           ///< the violating batch, new model
};

struct RetrainOutcome {
  FilterState state;
  RetrainEvent event;
};

/// Pass III: Rtrem = Mcm u SV documents u Ts_k (collapsed by id), feature
/// update on Rtrem, re-vectorization and a cold SMO solve on Rtrem.
/// Throws TrainError when Rtrem holds a single class.
RetrainOutcome incremental_retrain(const FilterState& state, const TriggerDecision& trigger,
                                   const LabeledCorpus& violating_batch, const DriftConfig& config);

struct BatchReport {
  std::size_t index = 0;
  std::size_t generation = 0;  ///< model generation that classified the batch
  std::size_t size = 0;
  std::size_t first_arrival = 0;
  ConfusionMatrix confusion;
  MetricsReport metrics;
  TriggerCause trigger = TriggerCause::None;
};

struct SessionReport {
  std::string dataset;   ///< display labels set by the experiment driver
  std::string selector;
  SessionMode mode = SessionMode::Batch;
  std::uint64_t partition_checksum = 0;
  std::size_t training_size = 0;
  std::size_t feature_dim = 0;
  std::vector<BatchReport> batches;
  std::vector<RetrainEvent> retrains;
  ConfusionMatrix cumulative;
  MetricsReport final_metrics;
  double average_fpr = 0.0;  ///< mean over batches that contain legitimate mail
  double average_fnr = 0.0;  ///< mean over batches that contain spam
  std::vector<double> scores;  ///< decision values of every test document, in order
  std::vector<Label> truths;
  bool halted = false;
  std::string halt_reason;

  /// Deterministic JSON rendering (also the `report` subcommand input).
  std::string to_json() const;
  static SessionReport from_json(std::string_view text);
};

struct SessionResult {
  SessionReport report;
  FilterState final_state;
};

/// Batch mode is Pass I + II only; Incremental mode runs the full loop,
/// retraining whenever check_validation fires and then moving on to the next
/// batch.
SessionResult run_session(const StreamPartition& partition, const DriftConfig& config, SessionMode mode);

// ---------------------------------------------------------------------------
// Checkpoints

/// Generation, feature set, model dump and Mcm ids.
std::string checkpoint_to_text(const FilterState& state);
void save_checkpoint(const FilterState& state, const std::filesystem::path& path);

struct Checkpoint {
  std::size_t generation = 0;
  FeatureSet features;
  SvmModel model;
  std::vector<std::string> misclassified_ids;
};

Checkpoint checkpoint_from_text(std::string_view text);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Rebuilds a FilterState by resolving document ids against `corpus`.
FilterState restore_state(const Checkpoint& checkpoint, const LabeledCorpus& corpus);

}  // namespace spamfilter
