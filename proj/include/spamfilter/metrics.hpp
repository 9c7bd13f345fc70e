#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spamfilter/corpus.hpp"

namespace spamfilter {

/// Spam is the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;  ///< spam -> spam
  std::size_t tn = 0;  ///< legitimate -> legitimate
  std::size_t fp = 0;  ///< legitimate -> spam
  std::size_t fn = 0;  ///< spam -> legitimate

  std::size_t n_spam() const { return tp + fn; }
  std::size_t n_legit() const { return tn + fp; }
  std::size_t total() const { return tp + tn + fp + fn; }

  ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const Label> predictions, std::span<const Label> truths);

struct Rates {
  double accuracy = 0.0;
  std::optional<double> fpr;  ///< absent without legitimate documents
  std::optional<double> fnr;  ///< absent without spam documents
};

Rates rates(const ConfusionMatrix& cm);

struct FMeasures {
  double micro_f1 = 0.0;  ///< 2PR/(P+R) of the spam class
  double macro_f1 = 0.0;  ///< mean per-class F1 over both classes
};

FMeasures f_measures(const ConfusionMatrix& cm);

/// Matthews correlation; 0 when any marginal is empty.
double mcc(const ConfusionMatrix& cm);

struct MetricsReport {
  double accuracy = 0.0;
  std::optional<double> fpr;
  std::optional<double> fnr;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double mcc = 0.0;
  double precision_spam = 0.0;
  double recall_spam = 0.0;
  double precision_legit = 0.0;
  double recall_legit = 0.0;
  static constexpr std::size_t kCategories = 2;

  /// Column order of to_csv_row().
  static std::string csv_header();
  std::string to_csv_row() const;
  std::string to_json() const;
};

MetricsReport evaluate(const ConfusionMatrix& cm);

struct RocPoint {
  double fpr;
  double tpr;
  bool operator==(const RocPoint&) const = default;
};

/// Threshold sweep over the distinct scores, highest first, starting at
/// (0,0) and ending at (1,1). Interior points of horizontal or vertical runs
/// are dropped.
std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const Label> truths);

/// Trapezoidal area under a roc_points curve.
double roc_auc(std::span<const RocPoint> points);

/// `fpr<TAB>tpr` lines with a header.
std::string roc_to_tsv(std::span<const RocPoint> points);

}  // namespace spamfilter
