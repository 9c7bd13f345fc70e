#include "spamfilter/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spamfilter/error.hpp"
#include "spamfilter/text_format.hpp"
#include "json.hpp"

namespace spamfilter {

ConfusionMatrix confusion(std::span<const Label> predictions, std::span<const Label> truths) {
  if (predictions.size() != truths.size())
    throw InvalidArgument("confusion: " + std::to_string(predictions.size()) + " predictions vs " +
                          std::to_string(truths.size()) + " truths");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const bool predicted_spam = predictions[i] == Label::Spam;
    switch (truths[i]) {
      case Label::Spam:
        ++(predicted_spam ? cm.tp : cm.fn);
        break;
      case Label::Legitimate:
        ++(predicted_spam ? cm.fp : cm.tn);
        break;
      case Label::Unlabeled:
        throw InvalidArgument("confusion: truth " + std::to_string(i) + " is unlabeled");
    }
  }
  return cm;
}

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double f1(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

void require_nonempty(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw InvalidArgument("metrics of an empty confusion matrix are undefined");
}

}  // namespace

Rates rates(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  Rates r;
  r.accuracy = static_cast<double>(cm.tn + cm.tp) / static_cast<double>(cm.n_legit() + cm.n_spam());
  if (cm.n_legit() > 0) r.fpr = ratio(cm.fp, cm.n_legit());
  if (cm.n_spam() > 0) r.fnr = ratio(cm.fn, cm.n_spam());
  return r;
}

FMeasures f_measures(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  const double f_spam = f1(ratio(cm.tp, cm.tp + cm.fp), ratio(cm.tp, cm.tp + cm.fn));
  const double f_legit = f1(ratio(cm.tn, cm.tn + cm.fn), ratio(cm.tn, cm.tn + cm.fp));
  return {f_spam, (f_spam + f_legit) / static_cast<double>(MetricsReport::kCategories)};
}

double mcc(const ConfusionMatrix& cm) {
  const double tp = static_cast<double>(cm.tp);
  const double tn = static_cast<double>(cm.tn);
  const double fp = static_cast<double>(cm.fp);
  const double fn = static_cast<double>(cm.fn);
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom);
}

MetricsReport evaluate(const ConfusionMatrix& cm) {
  const Rates r = rates(cm);
  const FMeasures f = f_measures(cm);
  MetricsReport m;
  m.accuracy = r.accuracy;
  m.fpr = r.fpr;
  m.fnr = r.fnr;
  m.micro_f1 = f.micro_f1;
  m.macro_f1 = f.macro_f1;
  m.mcc = mcc(cm);
  m.precision_spam = ratio(cm.tp, cm.tp + cm.fp);
  m.recall_spam = ratio(cm.tp, cm.tp + cm.fn);
  m.precision_legit = ratio(cm.tn, cm.tn + cm.fn);
  m.recall_legit = ratio(cm.tn, cm.tn + cm.fp);
  return m;
}

std::string MetricsReport::csv_header() {
  return "accuracy,fpr,fnr,micro_f1,macro_f1,mcc,precision_spam,recall_spam,precision_legit,recall_legit";
}

std::string MetricsReport::to_csv_row() const {
  using text::format_double;
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  return format_double(accuracy) + "," + opt(fpr) + "," + opt(fnr) + "," + format_double(micro_f1) + "," +
         format_double(macro_f1) + "," + format_double(mcc) + "," + format_double(precision_spam) + "," +
         format_double(recall_spam) + "," + format_double(precision_legit) + "," + format_double(recall_legit);
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["accuracy"] = accuracy;
  j["fpr"] = fpr ? nlohmann::ordered_json(*fpr) : nlohmann::ordered_json(nullptr);
  j["fnr"] = fnr ? nlohmann::ordered_json(*fnr) : nlohmann::ordered_json(nullptr);
  j["micro_f1"] = micro_f1;
  j["macro_f1"] = macro_f1;
  j["mcc"] = mcc;
  j["precision_spam"] = precision_spam;
  j["recall_spam"] = recall_spam;
  j["precision_legit"] = precision_legit;
  j["recall_legit"] = recall_legit;
  return j.dump();
}

std::vector<RocPoint> roc_points(std::span<const double> scores, std::span<const Label> truths) {
  if (scores.size() != truths.size()) throw InvalidArgument("roc_points: scores and truths differ in length");
  std::size_t pos = 0, neg = 0;
  for (Label t : truths) {
    if (t == Label::Spam) {
      ++pos;
    } else if (t == Label::Legitimate) {
      ++neg;
    } else {
      throw InvalidArgument("roc_points: unlabeled truth");
    }
  }
  if (pos == 0 || neg == 0) throw InvalidArgument("roc_points: both classes are required");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> raw{{0.0, 0.0}};
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double threshold = scores[order[k]];
    while (k < order.size() && scores[order[k]] == threshold) {
      ++(truths[order[k]] == Label::Spam ? tp : fp);
      ++k;
    }
    raw.push_back({static_cast<double>(fp) / static_cast<double>(neg), static_cast<double>(tp) / static_cast<double>(pos)});
  }

  std::vector<RocPoint> out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (i > 0 && i + 1 < raw.size()) {
      const auto& a = raw[i - 1];
      const auto& b = raw[i];
      const auto& c = raw[i + 1];
      if ((a.fpr == b.fpr && b.fpr == c.fpr) || (a.tpr == b.tpr && b.tpr == c.tpr)) continue;
    }
    out.push_back(raw[i]);
  }
  return out;
}

double roc_auc(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) * 0.5;
  return area;
}

std::string roc_to_tsv(std::span<const RocPoint> points) {
  std::string out = "fpr\ttpr\n";
  for (const auto& p : points) out += text::format_double(p.fpr) + "\t" + text::format_double(p.tpr) + "\n";
  return out;
}

}  // namespace spamfilter
