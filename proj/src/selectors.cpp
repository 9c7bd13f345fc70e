#include "spamfilter/selectors.hpp"

#include <array>
#include <algorithm>
#include <cmath>

#include "spamfilter/error.hpp"

namespace spamfilter {

std::string_view to_string(Selector s) {
  switch (s) {
    case Selector::Tfdcr:
      return "tfdcr";
    case Selector::InfoGain:
      return "ig";
    case Selector::ChiSquare:
      return "chi";
    case Selector::Gini:
      return "gini";
    case Selector::GainRatio:
      return "igr";
    case Selector::Cfs:
      return "cfs";
  }
  return "tfdcr";
}

Selector parse_selector(std::string_view name) {
  for (Selector s : all_selectors())
    if (to_string(s) == name) return s;
  throw InvalidArgument("unsupported feature selector '" + std::string(name) + "'");
}

const std::vector<Selector>& all_selectors() {
  static const std::vector<Selector> v{Selector::Tfdcr, Selector::InfoGain, Selector::ChiSquare,
                                       Selector::Gini,  Selector::GainRatio, Selector::Cfs};
  return v;
}

namespace {

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

double entropy2(double a, double b) {
  const double n = a + b;
  if (n <= 0.0) return 0.0;
  return -(plogp(a / n) + plogp(b / n));
}

struct Table {
  double a, b, c, d;  // spam&t, legit&t, spam&~t, legit&~t
  double n() const { return a + b + c + d; }
};

double info_gain(const Table& t) {
  const double n = t.n();
  const double with = t.a + t.b;
  const double without = t.c + t.d;
  return entropy2(t.a + t.c, t.b + t.d) - (with / n) * entropy2(t.a, t.b) - (without / n) * entropy2(t.c, t.d);
}

double split_entropy(const Table& t) { return entropy2(t.a + t.b, t.c + t.d); }

double chi_square(const Table& t) {
  const double denom = (t.a + t.c) * (t.b + t.d) * (t.a + t.b) * (t.c + t.d);
  if (denom == 0.0) return 0.0;
  const double cross = t.a * t.d - t.b * t.c;
  return t.n() * cross * cross / denom;
}

double gini(const Table& t) {
  const double with = t.a + t.b;
  if (with == 0.0) return 0.0;
  double sum = 0.0;
  const std::array<std::pair<double, double>, 2> cls{{{t.a, t.a + t.c}, {t.b, t.b + t.d}}};
  for (auto [df, nc] : cls) {
    if (nc == 0.0) continue;
    const double p_t_given_c = df / nc;
    const double p_c_given_t = df / with;
    sum += p_t_given_c * p_t_given_c * p_c_given_t * p_c_given_t;
  }
  return sum;
}

double gain_ratio(const Table& t) {
  const double h = split_entropy(t);
  return h > 0.0 ? info_gain(t) / h : 0.0;
}

double symmetric_uncertainty(const Table& t) {
  const double h = entropy2(t.a + t.c, t.b + t.d) + split_entropy(t);
  return h > 0.0 ? 2.0 * info_gain(t) / h : 0.0;
}

}  // namespace

std::map<std::string, double, std::less<>> baseline_score(Selector method, const CorpusCounts& counts) {
  if (method == Selector::Tfdcr) throw InvalidArgument("baseline_score: tfdcr is not a baseline selector");
  const double ns = static_cast<double>(counts.n_spam());
  const double nl = static_cast<double>(counts.n_legit());
  if ((method == Selector::InfoGain || method == Selector::GainRatio) && (ns == 0.0 || nl == 0.0))
    throw InvalidArgument("baseline_score: both classes must be present");

  std::map<std::string, double, std::less<>> out;
  for (const auto& [term, fc] : counts.counts()) {
    const double a = static_cast<double>(fc.docfreq_spam);
    const double b = static_cast<double>(fc.docfreq_legit);
    const Table t{a, b, ns - a, nl - b};
    double score = 0.0;
    switch (method) {
      case Selector::InfoGain:
        score = info_gain(t);
        break;
      case Selector::ChiSquare:
        score = chi_square(t);
        break;
      case Selector::Gini:
        score = gini(t);
        break;
      case Selector::GainRatio:
        score = gain_ratio(t);
        break;
      case Selector::Cfs:
        score = symmetric_uncertainty(t);
        break;
      case Selector::Tfdcr:
        break;
    }
    // Rounding can leave -0 or tiny negatives on independent terms.
    out.emplace(term, std::max(0.0, score));
  }
  return out;
}

FeatureSet select_features(Selector method, const CorpusCounts& counts, std::size_t n) {
  if (method == Selector::Tfdcr) return select_top_n(counts, n);
  return select_top_n_by_score(baseline_score(method, counts), n);
}

}  // namespace spamfilter
