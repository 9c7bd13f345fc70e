#include "spamfilter/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "spamfilter/error.hpp"
#include "spamfilter/text_format.hpp"

namespace spamfilter {

CorpusCounts::CorpusCounts(std::map<std::string, FeatureCounts, std::less<>> counts, std::size_t n_spam,
                           std::size_t n_legit)
    : counts_(std::move(counts)), n_spam_(n_spam), n_legit_(n_legit) {
  if (n_spam_ == 0 && n_legit_ == 0) throw InvalidArgument("corpus counts need at least one labeled document");
}

const FeatureCounts* CorpusCounts::find(std::string_view term) const {
  auto it = counts_.find(term);
  return it == counts_.end() ? nullptr : &it->second;
}

FeatureSet::FeatureSet(std::vector<ScoredFeature> features) : features_(std::move(features)) {
  index_.reserve(features_.size());
  text::Fnv1a h;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (!index_.emplace(features_[i].term, i).second)
      throw InvalidArgument("duplicate feature '" + features_[i].term + "'");
    h.update(features_[i].term);
    h.update(std::string_view("\n", 1));
  }
  fingerprint_ = h.digest();
}

std::optional<std::size_t> FeatureSet::position(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string FeatureSet::to_text() const {
  std::string out;
  for (const auto& f : features_) {
    out += f.term;
    out += '\t';
    out += text::format_double(f.weight);
    out += '\n';
  }
  return out;
}

FeatureSet FeatureSet::from_text(std::string_view text) {
  std::vector<ScoredFeature> features;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) throw ParseError("<features>", line_no, "expected term<TAB>weight");
    try {
      features.push_back({std::string(line.substr(0, tab)), text::parse_double(line.substr(tab + 1))});
    } catch (const InvalidArgument& e) {
      throw ParseError("<features>", line_no, e.what());
    }
  }
  return FeatureSet(std::move(features));
}

void FeatureSet::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_text();
}

FeatureSet FeatureSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

SparseVector SparseVector::from_dense(const std::vector<double>& dense, std::uint64_t space) {
  SparseVector v;
  v.space = space;
  v.dim = dense.size();
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (dense[i] != 0.0) v.entries.push_back({static_cast<std::uint32_t>(i), dense[i]});
  return v;
}

double dot(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->index == ib->index) {
      sum += ia->value * ib->value;
      ++ia;
      ++ib;
    } else if (ia->index < ib->index) {
      ++ia;
    } else {
      ++ib;
    }
  }
  return sum;
}

double squared_norm(const SparseVector& a) {
  double sum = 0.0;
  for (const auto& e : a.entries) sum += e.value * e.value;
  return sum;
}

CorpusCounts count_stats(const LabeledCorpus& corpus) {
  if (corpus.labeled_count() == 0) throw InvalidArgument("count_stats: corpus has no labeled documents");
  std::map<std::string, FeatureCounts, std::less<>> counts;
  std::unordered_map<std::string_view, std::size_t> in_doc;
  for (const auto& doc : corpus) {
    if (doc.label == Label::Unlabeled) continue;
    const bool spam = doc.label == Label::Spam;
    in_doc.clear();
    for (const auto& t : doc.tokens) ++in_doc[t];
    for (const auto& [term, n] : in_doc) {
      auto it = counts.find(term);
      if (it == counts.end()) {
        it = counts.emplace(std::string(term), FeatureCounts{}).first;
        it->second.term = it->first;
      }
      auto& fc = it->second;
      if (spam) {
        fc.termfreq_spam += n;
        ++fc.docfreq_spam;
      } else {
        fc.termfreq_legit += n;
        ++fc.docfreq_legit;
      }
    }
  }
  return CorpusCounts(std::move(counts), corpus.spam_count(), corpus.legit_count());
}

namespace {

void require_both_classes(std::size_t n_spam, std::size_t n_legit, const char* who) {
  if (n_spam == 0 || n_legit == 0)
    throw InvalidArgument(std::string(who) + ": both classes must be present");
}

double freq_diff(std::size_t a, std::size_t b) {
  return std::fabs(static_cast<double>(a) - static_cast<double>(b));
}

}  // namespace

namespace {

// The weight as the exact rational num/den (integers held in doubles). A zero
// document frequency in a denominator counts as 0.5, hence the factor 2.
struct Rational {
  double num;
  double den;
};

Rational category_ratio(const FeatureCounts& fc, std::size_t n_spam, std::size_t n_legit) {
  require_both_classes(n_spam, n_legit, "tfdcr_weight");
  const double ns = static_cast<double>(n_spam);
  const double nl = static_cast<double>(n_legit);
  const double ds = static_cast<double>(fc.docfreq_spam);
  const double dl = static_cast<double>(fc.docfreq_legit);
  // ds/ns > dl/nl, compared without rounding.
  if (ds * nl > dl * ns) return {2.0 * ds * nl, ns * (dl == 0.0 ? 1.0 : 2.0 * dl)};
  return {2.0 * dl * ns, nl * (ds == 0.0 ? 1.0 : 2.0 * ds)};
}

}  // namespace

double tfdcr_category_product(const FeatureCounts& fc, std::size_t n_spam, std::size_t n_legit) {
  const Rational r = category_ratio(fc, n_spam, n_legit);
  // Smoothing can push a rare class-exclusive term below the even-split
  // value of 1 when the classes are unbalanced.
  return r.num > r.den ? r.num / r.den : 1.0;
}

double tfdcr_weight(const FeatureCounts& fc, std::size_t n_spam, std::size_t n_legit) {
  const double diff = freq_diff(fc.termfreq_spam, fc.termfreq_legit);
  if (diff == 0.0) return 0.0;
  const Rational r = category_ratio(fc, n_spam, n_legit);
  // One rounding step, so equal rationals give equal doubles and ties reach
  // the lexicographic rule intact.
  return r.num > r.den ? (diff * r.num) / r.den : diff;
}

namespace {

bool ranks_before(const ScoredFeature& a, const ScoredFeature& b) {
  if (a.weight != b.weight) return a.weight > b.weight;
  return a.term < b.term;
}

FeatureSet top_n(std::vector<ScoredFeature> scored, std::size_t n) {
  if (n < 1) throw InvalidArgument("feature dimensionality must be at least 1");
  const std::size_t keep = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), ranks_before);
  scored.resize(keep);
  return FeatureSet(std::move(scored));
}

}  // namespace

FeatureSet select_top_n(const CorpusCounts& counts, std::size_t n) {
  std::vector<ScoredFeature> scored;
  scored.reserve(counts.vocabulary_size());
  for (const auto& [term, fc] : counts.counts())
    scored.push_back({term, tfdcr_weight(fc, counts.n_spam(), counts.n_legit())});
  return top_n(std::move(scored), n);
}

FeatureSet select_top_n_by_score(const std::map<std::string, double, std::less<>>& scores, std::size_t n) {
  std::vector<ScoredFeature> scored;
  scored.reserve(scores.size());
  for (const auto& [term, s] : scores) scored.push_back({term, s});
  return top_n(std::move(scored), n);
}

SparseVector vectorize(const Document& doc, const FeatureSet& fs) {
  if (fs.empty()) throw InvalidArgument("vectorize: empty feature set");
  std::map<std::uint32_t, double> tf;
  for (const auto& t : doc.tokens) {
    if (auto pos = fs.position(t)) tf[static_cast<std::uint32_t>(*pos)] += 1.0;
  }
  SparseVector v;
  v.space = fs.fingerprint();
  v.dim = fs.size();
  double norm2 = 0.0;
  for (const auto& [idx, w] : tf) norm2 += w * w;
  if (norm2 == 0.0) return v;
  const double inv = 1.0 / std::sqrt(norm2);
  v.entries.reserve(tf.size());
  for (const auto& [idx, w] : tf) v.entries.push_back({idx, w * inv});
  return v;
}

double selection_rank_weight(const FeatureCounts& fc, std::size_t n_spam, std::size_t n_legit) {
  require_both_classes(n_spam, n_legit, "selection_rank_weight");
  const double total = static_cast<double>(fc.termfreq_spam) + static_cast<double>(fc.termfreq_legit);
  if (total == 0.0) throw InvalidArgument("selection_rank_weight: term never occurs");
  const double ratio_gap = std::fabs(static_cast<double>(fc.docfreq_spam) / static_cast<double>(n_spam) -
                                     static_cast<double>(fc.docfreq_legit) / static_cast<double>(n_legit));
  return ratio_gap * (freq_diff(fc.termfreq_spam, fc.termfreq_legit) / total);
}

FeatureUpdate update_feature_set(const FeatureSet& previous, const LabeledCorpus& retrain_corpus, std::size_t n) {
  const CorpusCounts counts = count_stats(retrain_corpus);
  const std::size_t ns = counts.n_spam();
  const std::size_t nl = counts.n_legit();
  require_both_classes(ns, nl, "update_feature_set");

  const FeatureSet candidates = select_top_n(counts, n);

  FeatureUpdate out;
  std::vector<std::pair<const ScoredFeature*, double>> distinct;
  for (const auto& f : candidates.features()) {
    if (previous.contains(f.term)) continue;
    distinct.emplace_back(&f, selection_rank_weight(*counts.find(f.term), ns, nl));
  }
  out.distinct_candidates = distinct.size();

  std::vector<ScoredFeature> added;
  if (!distinct.empty()) {
    double sum = 0.0;
    for (const auto& d : distinct) sum += d.second;
    out.mean_rank_weight = sum / static_cast<double>(distinct.size());
    for (const auto& [f, srw] : distinct)
      if (srw > out.mean_rank_weight) added.push_back(*f);
  }

  std::vector<ScoredFeature> incumbents;
  incumbents.reserve(previous.size());
  for (const auto& f : previous.features()) {
    const FeatureCounts* fc = counts.find(f.term);
    incumbents.push_back({f.term, fc ? tfdcr_weight(*fc, ns, nl) : 0.0});
  }
  // Lowest refreshed dmw goes first; among ties the lexicographically larger
  // term goes, mirroring the selection tie-break.
  std::sort(incumbents.begin(), incumbents.end(), [](const ScoredFeature& a, const ScoredFeature& b) {
    if (a.weight != b.weight) return a.weight < b.weight;
    return a.term > b.term;
  });
  const std::size_t drop = std::min(added.size(), incumbents.size());
  for (std::size_t i = 0; i < drop; ++i) out.removed.push_back(incumbents[i].term);
  added.resize(drop);
  for (const auto& f : added) out.added.push_back(f.term);

  std::vector<ScoredFeature> next(incumbents.begin() + static_cast<std::ptrdiff_t>(drop), incumbents.end());
  next.insert(next.end(), added.begin(), added.end());
  std::sort(next.begin(), next.end(), ranks_before);
  out.features = FeatureSet(std::move(next));
  out.replaced = drop;
  return out;
}

}  // namespace spamfilter
