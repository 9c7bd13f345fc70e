// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Exit status is
// nonzero when any criterion fails.
//
// Criterion 7 needs the PU1 corpus; point SPAMFILTER_PU1 at its directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "qp_oracle.hpp"
#include "random_corpus.hpp"
#include "spamfilter/config.hpp"
#include "spamfilter/driftloop.hpp"
#include "spamfilter/experiment.hpp"
#include "spamfilter/metrics.hpp"
#include "spamfilter/svm.hpp"
#include "temp_dir.hpp"
#include "tfdcr_oracle.hpp"

using namespace spamfilter;

namespace {

// Pinned tolerances.
constexpr double kTfdcrTolerance = 1e-12;
constexpr double kTfdcrSeconds = 5.0;
constexpr double kObjectiveTolerance = 1e-6;
constexpr double kKktTolerance = 1e-3;
constexpr double kBalanceTolerance = 1e-6;
constexpr double kSmoSeconds = 10.0;
constexpr double kMetricTolerance = 1e-12;
constexpr double kDriftGap = 0.10;
constexpr double kMaxReplacedShare = 0.25;
constexpr double kDriftSeconds = 60.0;
constexpr double kPu1Accuracy = 0.9675;
constexpr double kPu1AccuracyBand = 0.04;
constexpr double kPu1Mcc = 0.93;
constexpr double kPu1MccBand = 0.08;

enum class Outcome { Pass, Fail, Skip };

struct Verdict {
  Outcome outcome = Outcome::Pass;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && outcome != Outcome::Fail) {
      outcome = Outcome::Fail;
      detail << "violated: " << what << "; ";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void tfdcr_oracle(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t order_mismatches = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const auto docs = testing::random_docs(rng, 2 + rng.below(49), 1 + rng.below(200), 20);
    const auto counts = count_stats(LabeledCorpus(docs));
    const auto ref = oracle::recount(docs);
    for (const auto& [term, t] : ref.terms) {
      const auto* fc = counts.find(term);
      if (fc == nullptr) {
        ++order_mismatches;
        continue;
      }
      const double w = tfdcr_weight(*fc, counts.n_spam(), counts.n_legit());
      worst = std::max(worst, std::fabs(w - oracle::tfdcr(t, ref.n_spam, ref.n_legit).value()) / std::max(1.0, w));
    }
    const auto order = oracle::ranking(ref);
    const auto top = select_top_n(counts, order.size());
    for (std::size_t i = 0; i < order.size(); ++i)
      if (i >= top.size() || top[i].term != order[i].term) ++order_mismatches;
  }
  const double secs = seconds_since(t0);
  v.require(worst <= kTfdcrTolerance, "weight difference");
  v.require(order_mismatches == 0, "ranking order");
  v.require(secs < kTfdcrSeconds, "runtime");
  v.detail << "max rel diff " << worst << ", order mismatches " << order_mismatches << ", " << secs << " s";
}

void smo_oracle(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_objective = 0.0, worst_kkt = 0.0, worst_balance = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(500 + seed);
    const double gap = static_cast<double>(seed % 5) * 0.15 - 0.3;
    std::vector<SparseVector> x;
    std::vector<int> y;
    for (int i = 0; i < 20; ++i) {
      const int label = i < 10 ? 1 : -1;
      x.push_back(SparseVector::from_dense({label * (gap + rng.uniform()), (rng.uniform() - 0.5) * 2.0}));
      y.push_back(label);
    }
    TrainConfig cfg;
    cfg.kkt_tolerance = 1e-6;
    const auto r = train_smo(x, y, cfg);
    std::vector<std::vector<double>> gram(x.size(), std::vector<double>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < x.size(); ++j) gram[i][j] = kernel_eval(cfg.kernel, x[i], x[j]);
    const auto q = oracle::solve_dual(gram, y, cfg.c);
    const double w = dual_objective(x, y, r.stats.alphas, cfg.kernel);
    worst_objective = std::max(worst_objective, std::fabs(w - q.objective));
    double balance = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double a = r.stats.alphas[i];
      balance += a * y[i];
      const double m = y[i] * r.model.decision_value(x[i]);
      double violation = 0.0;
      if (a < 0.0 || a > cfg.c) violation = 1.0;
      else if (a <= cfg.alpha_epsilon) violation = std::max(0.0, 1.0 - m);
      else if (a >= cfg.c - cfg.alpha_epsilon) violation = std::max(0.0, m - 1.0);
      else violation = std::fabs(m - 1.0);
      worst_kkt = std::max(worst_kkt, violation);
    }
    worst_balance = std::max(worst_balance, std::fabs(balance));
  }
  const double secs = seconds_since(t0);
  v.require(worst_objective <= kObjectiveTolerance, "dual objective");
  v.require(worst_kkt <= kKktTolerance, "KKT");
  v.require(worst_balance <= kBalanceTolerance, "sum alpha y");
  v.require(secs < kSmoSeconds, "runtime");
  v.detail << "objective diff " << worst_objective << ", KKT " << worst_kkt << ", balance " << worst_balance << ", "
           << secs << " s";
}

void metrics_fixtures(Verdict& v) {
  struct Fixture {
    ConfusionMatrix cm;
    double accuracy, fpr, fnr, micro, macro, mcc;
  };
  const Fixture fixtures[] = {
      {{3, 5, 1, 1}, 0.8, 1.0 / 6.0, 0.25, 0.75, (0.75 + 5.0 / 6.0) / 2.0, 14.0 / 24.0},
      {{6, 10, 2, 3}, 16.0 / 21.0, 1.0 / 6.0, 1.0 / 3.0, 12.0 / 17.0, (12.0 / 17.0 + 0.8) / 2.0,
       54.0 / std::sqrt(8.0 * 9.0 * 12.0 * 13.0)},
      {{4, 6, 0, 0}, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0},
      {{0, 0, 6, 4}, 0.0, 1.0, 1.0, 0.0, 0.0, -1.0},
  };
  double worst = 0.0;
  for (const auto& f : fixtures) {
    const auto m = evaluate(f.cm);
    for (const auto& [got, want] : {std::pair{m.accuracy, f.accuracy},
                                    {m.fpr.value_or(NAN), f.fpr},
                                    {m.fnr.value_or(NAN), f.fnr},
                                    {m.micro_f1, f.micro},
                                    {m.macro_f1, f.macro},
                                    {m.mcc, f.mcc}}) {
      const double d = std::fabs(got - want);
      worst = std::isnan(d) ? INFINITY : std::max(worst, d);
    }
  }
  v.require(worst <= kMetricTolerance, "fixture values");
  v.require(mcc({4, 6, 0, 0}) == 1.0 && mcc({0, 0, 6, 4}) == -1.0, "MCC extremes");
  v.detail << "max diff " << worst;
}

RunConfig drift_config() {
  RunConfig cfg;
  cfg.format = DatasetFormat::Synth;
  cfg.n = 200;
  cfg.rho = 0.9;
  cfg.mode = SessionMode::Incremental;
  cfg.synth.n_docs = 2000;
  cfg.synth.drift_point = 1000;
  cfg.synth.overlap = 0.2;
  cfg.validate();
  return cfg;
}

double post_drift_accuracy(const SessionReport& r, std::size_t drift_point) {
  std::size_t correct = 0, total = 0;
  for (const auto& b : r.batches) {
    if (b.first_arrival < drift_point) continue;
    correct += b.confusion.tp + b.confusion.tn;
    total += b.confusion.total();
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

void drift_recovery(Verdict& v, const ExperimentOutput& out, double secs) {
  const RunConfig cfg = drift_config();
  const auto& batch = out.runs.at(0).report;
  const auto& inc = out.runs.at(1).report;
  const double gap = post_drift_accuracy(inc, cfg.synth.drift_point) - post_drift_accuracy(batch, cfg.synth.drift_point);
  v.require(!inc.retrains.empty(), "at least one retrain");
  v.require(gap >= kDriftGap, "post-drift accuracy gap");
  v.require(secs < kDriftSeconds, "runtime");
  v.detail << "retrains " << inc.retrains.size() << ", post-drift accuracy gap " << gap * 100.0 << " pp, replaced/N";
  for (const auto& e : inc.retrains) {
    const double share = static_cast<double>(e.replaced) / static_cast<double>(inc.feature_dim);
    v.detail << " " << share;
    if (share <= 0.0 || share > kMaxReplacedShare) v.detail << "(outside (0, 0.25])";
  }
  v.detail << ", " << secs << " s";
}

void feature_invariants(Verdict& v, const ExperimentOutput& out) {
  const auto& inc = out.runs.at(1);
  v.require(inc.final_state.features.size() == inc.report.feature_dim, "final |FS|");
  std::set<std::string> terms;
  for (const auto& f : inc.final_state.features.features()) terms.insert(f.term);
  v.require(terms.size() == inc.final_state.features.size(), "no duplicates");
  // Replay the feature set through every event.
  std::set<std::string> fs;
  for (const auto& f : out.runs.at(0).final_state.features.features()) fs.insert(f.term);
  for (const auto& e : inc.report.retrains) {
    v.require(e.replaced == e.removed.size() && e.replaced == e.added.size(), "replaced == removed == added");
    for (const auto& t : e.removed) v.require(fs.erase(t) == 1, "removed term was present");
    for (const auto& t : e.added) v.require(fs.insert(t).second, "added term was new");
    v.require(fs.size() == inc.report.feature_dim, "|FS| constant");
  }
  v.require(fs == terms, "replayed set equals final set");
  v.detail << inc.report.retrains.size() << " events, |FS| " << inc.report.feature_dim;
}

void retrain_economy(Verdict& v, const ExperimentOutput& out) {
  const auto& inc = out.runs.at(1).report;
  v.require(!inc.retrains.empty(), "at least one retrain");
  for (const auto& e : inc.retrains) {
    v.require(e.retrain_size <= e.previous_sv_count + e.misclassified_count + e.batch_size, "|Rtrem| bound");
    v.require(e.retrain_size < e.documents_seen, "|Rtrem| below documents seen");
    v.detail << "|Rtrem| " << e.retrain_size << " <= " << e.previous_sv_count << "+" << e.misclassified_count << "+"
             << e.batch_size << " of " << e.documents_seen << " seen; ";
  }
}

void pu1(Verdict& v) {
  const char* dir = std::getenv("SPAMFILTER_PU1");
  if (dir == nullptr || *dir == '\0') {
    v.outcome = Outcome::Skip;
    v.detail << "SPAMFILTER_PU1 not set";
    return;
  }
  RunConfig cfg = parse_config({{"format", "pu"}, {"dataset", dir}});
  const auto exp1 = run_experiment1(cfg);
  const auto& m = exp1.table.rows.at(0).metrics;
  v.require(std::fabs(m.accuracy - kPu1Accuracy) <= kPu1AccuracyBand, "accuracy band");
  v.require(std::fabs(m.mcc - kPu1Mcc) <= kPu1MccBand, "MCC band");
  cfg.mode = SessionMode::Incremental;
  const auto exp2 = run_experiment2(cfg);
  const auto& rows = exp2.table.rows;
  v.require(rows.at(1).average_fpr <= rows.at(0).average_fpr, "incremental avg FPR <= batch avg FPR");
  v.detail << "accuracy " << m.accuracy << ", MCC " << m.mcc << ", avg FPR batch " << rows.at(0).average_fpr
           << " incremental " << rows.at(1).average_fpr;
}

void determinism(Verdict& v) {
  testing::TempDir dir;
  RunConfig cfg = drift_config();
  cfg.synth.n_docs = 900;
  cfg.synth.drift_point = 450;
  cfg.n = 80;
  const auto a = emit_report(run_experiment2(cfg), dir / "a", ReportFormat::Csv);
  const auto b = emit_report(run_experiment2(cfg), dir / "b", ReportFormat::Csv);
  cfg.mode = SessionMode::Batch;
  cfg.selectors = all_selectors();
  const auto c = emit_report(run_experiment1(cfg), dir / "c", ReportFormat::Json);
  const auto d = emit_report(run_experiment1(cfg), dir / "d", ReportFormat::Json);
  v.require(a.size() == b.size() && c.size() == d.size(), "same file list");
  std::size_t compared = 0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i, ++compared)
    v.require(testing::read_text(a[i]) == testing::read_text(b[i]), a[i].filename().string());
  for (std::size_t i = 0; i < std::min(c.size(), d.size()); ++i, ++compared)
    v.require(testing::read_text(c[i]) == testing::read_text(d[i]), c[i].filename().string());
  v.detail << compared << " files compared";
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<void(Verdict&)>& check) {
    Verdict v;
    try {
      check(v);
    } catch (const std::exception& e) {
      v.outcome = Outcome::Fail;
      v.detail << "exception: " << e.what();
    }
    const char* tag = v.outcome == Outcome::Pass ? "PASS" : v.outcome == Outcome::Skip ? "SKIP" : "FAIL";
    if (v.outcome == Outcome::Fail) ++failures;
    std::printf("%s %d %s: %s\n", tag, id, name.c_str(), v.detail.str().c_str());
    std::fflush(stdout);
  };

  report(1, "tfdcr-oracle", tfdcr_oracle);
  report(2, "smo-oracle", smo_oracle);
  report(3, "metrics-fixtures", metrics_fixtures);

  ExperimentOutput drift;
  double drift_secs = 0.0;
  std::string drift_error;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    drift = run_experiment2(drift_config());
    drift_secs = seconds_since(t0);
  } catch (const std::exception& e) {
    drift_error = e.what();
  }
  auto with_drift = [&](const std::function<void(Verdict&)>& f) {
    return [&, f](Verdict& v) {
      if (!drift_error.empty()) throw std::runtime_error(drift_error);
      f(v);
    };
  };
  report(4, "drift-recovery", with_drift([&](Verdict& v) { drift_recovery(v, drift, drift_secs); }));
  report(5, "feature-update-invariants", with_drift([&](Verdict& v) { feature_invariants(v, drift); }));
  report(6, "retraining-economy", with_drift([&](Verdict& v) { retrain_economy(v, drift); }));
  report(7, "pu1-tfdcr", pu1);
  report(8, "determinism", determinism);
  return failures == 0 ? 0 : 1;
}
