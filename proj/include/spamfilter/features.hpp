#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "spamfilter/corpus.hpp"

namespace spamfilter {

/// Per-term class statistics: raw occurrence totals and document counts.
struct FeatureCounts {
  std::string term;
  std::size_t termfreq_spam = 0;
  std::size_t termfreq_legit = 0;
  std::size_t docfreq_spam = 0;
  std::size_t docfreq_legit = 0;

  bool operator==(const FeatureCounts&) const = default;
};

class CorpusCounts {
 public:
  CorpusCounts() = default;
  CorpusCounts(std::map<std::string, FeatureCounts, std::less<>> counts, std::size_t n_spam,
               std::size_t n_legit);

  const std::map<std::string, FeatureCounts, std::less<>>& counts() const { return counts_; }
  const FeatureCounts* find(std::string_view term) const;
  std::size_t n_spam() const { return n_spam_; }
  std::size_t n_legit() const { return n_legit_; }
  std::size_t vocabulary_size() const { return counts_.size(); }

 private:
  std::map<std::string, FeatureCounts, std::less<>> counts_;
  std::size_t n_spam_ = 0;
  std::size_t n_legit_ = 0;
};

struct ScoredFeature {
  std::string term;
  double weight = 0.0;  ///< dmw for TFDCR, the selector score otherwise

  bool operator==(const ScoredFeature&) const = default;
};

/// Ordered, duplicate-free feature list. Position i is vector coordinate i.
class FeatureSet {
 public:
  FeatureSet() = default;
  explicit FeatureSet(std::vector<ScoredFeature> features);

  const std::vector<ScoredFeature>& features() const { return features_; }
  std::size_t size() const { return features_.size(); }
  bool empty() const { return features_.empty(); }
  const ScoredFeature& operator[](std::size_t i) const { return features_[i]; }

  std::optional<std::size_t> position(std::string_view term) const;
  bool contains(std::string_view term) const { return position(term).has_value(); }

  /// Digest of the ordered term list. Vectors carry it so a model refuses
  /// inputs built against a different feature space.
  std::uint64_t fingerprint() const { return fingerprint_; }

  /// `term<TAB>weight` lines, weight as shortest round-trip decimal.
  std::string to_text() const;
  static FeatureSet from_text(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static FeatureSet load(const std::filesystem::path& path);

  bool operator==(const FeatureSet& other) const { return features_ == other.features_; }

 private:
  std::vector<ScoredFeature> features_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t fingerprint_ = 0;
};

/// Sparse real vector with strictly increasing indices. `space` is the
/// fingerprint of the feature set it was built against (0 = untagged) and
/// `dim` the dimensionality of that space (0 = unknown).
struct SparseVector {
  struct Entry {
    std::uint32_t index;
    double value;
    bool operator==(const Entry&) const = default;
  };
  std::vector<Entry> entries;
  std::uint64_t space = 0;
  std::size_t dim = 0;

  static SparseVector from_dense(const std::vector<double>& dense, std::uint64_t space = 0);
  bool empty() const { return entries.empty(); }
  bool operator==(const SparseVector&) const = default;
};

double dot(const SparseVector& a, const SparseVector& b);
double squared_norm(const SparseVector& a);

// ---------------------------------------------------------------------------

/// Exact term and document frequencies per class; unlabeled documents are
/// ignored. Throws when the corpus has no labeled document.
CorpusCounts count_stats(const LabeledCorpus& corpus);

/// TFDCR discriminative weight:
///   |tf_s - tf_l| * max(1, ratio)
/// where ratio divides the larger category ratio df_c/N_c by the smaller,
/// with a zero document frequency in a denominator replaced by 0.5.
double tfdcr_weight(const FeatureCounts& fc, std::size_t n_spam, std::size_t n_legit);

/// The category-ratio factor of tfdcr_weight on its own (always >= 1).
double tfdcr_category_product(const FeatureCounts& fc, std::size_t n_spam, std::size_t n_legit);

/// Top-N by TFDCR, weight descending then term ascending.
FeatureSet select_top_n(const CorpusCounts& counts, std::size_t n);

/// Top-N over arbitrary non-negative scores with the same ordering rule.
FeatureSet select_top_n_by_score(const std::map<std::string, double, std::less<>>& scores, std::size_t n);

/// Raw in-document term frequency of each selected feature, L2-normalized.
SparseVector vectorize(const Document& doc, const FeatureSet& fs);

/// |df_s/N_S - df_l/N_L| * |tf_s - tf_l| / (tf_s + tf_l), in [0, 1].
double selection_rank_weight(const FeatureCounts& fc, std::size_t n_spam, std::size_t n_legit);

struct FeatureUpdate {
  FeatureSet features;
  std::size_t replaced = 0;
  std::vector<std::string> added;
  std::vector<std::string> removed;
  std::size_t distinct_candidates = 0;  ///< |DNFS|
  double mean_rank_weight = 0.0;        ///< mean sRW over the distinct candidates
};

/// Feature-set replacement on a retraining corpus:
///  1. candidates = top-N TFDCR terms of the retraining corpus;
///  2. distinct = candidates not already in `previous`;
///  3. each distinct term whose sRW strictly exceeds the mean sRW of the
///     distinct terms is added;
///  4. as many incumbents are dropped, lowest dmw first, with all incumbent
///     dmw values recomputed on the retraining corpus.
/// The dimensionality of `previous` is preserved.
FeatureUpdate update_feature_set(const FeatureSet& previous, const LabeledCorpus& retrain_corpus,
                                 std::size_t n);

}  // namespace spamfilter
