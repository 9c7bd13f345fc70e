#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace spamfilter {

enum class Label : std::uint8_t { Spam, Legitimate, Unlabeled };

/// +1 for spam, -1 for legitimate. Throws for Unlabeled.
int label_sign(Label label);
Label label_from_sign(int sign);
std::string_view to_string(Label label);

struct Document {
  std::string id;
  Label label = Label::Unlabeled;
  std::vector<std::string> tokens;
  std::size_t arrival_index = 0;

  bool operator==(const Document&) const = default;
};

/// Documents ordered by arrival_index with cached class totals.
/// Arrival indices must be unique; construction sorts and validates.
class LabeledCorpus {
 public:
  LabeledCorpus() = default;
  explicit LabeledCorpus(std::vector<Document> documents);

  const std::vector<Document>& documents() const { return documents_; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }
  std::size_t spam_count() const { return spam_count_; }
  std::size_t legit_count() const { return legit_count_; }
  std::size_t labeled_count() const { return spam_count_ + legit_count_; }

  auto begin() const { return documents_.begin(); }
  auto end() const { return documents_.end(); }
  const Document& operator[](std::size_t i) const { return documents_[i]; }

  /// Order-sensitive digest of ids, labels, arrival indices and tokens.
  std::uint64_t checksum() const;

  bool operator==(const LabeledCorpus&) const = default;

 private:
  std::vector<Document> documents_;
  std::size_t spam_count_ = 0;
  std::size_t legit_count_ = 0;
};

struct StreamPartition {
  LabeledCorpus training;
  std::vector<LabeledCorpus> test_batches;

  std::size_t total_size() const;
  std::uint64_t checksum() const;
};

// ---------------------------------------------------------------------------
// Preprocessing

class StopList {
 public:
  StopList() = default;
  explicit StopList(std::unordered_set<std::string> words) : words_(std::move(words)) {}

  /// The ~300-word English list shipped in data/stopwords.txt.
  static const StopList& english();
  /// One lowercase word per line; blank lines and '#' comments ignored.
  static StopList from_file(const std::filesystem::path& path);
  static StopList parse(std::string_view text);

  bool contains(std::string_view word) const { return words_.contains(std::string(word)); }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

/// Lowercased alphanumeric runs; everything else (including non-ASCII
/// bytes) separates tokens. Pure-digit tokens and tokens shorter than two
/// characters are dropped.
std::vector<std::string> tokenize(std::string_view raw_text);

std::vector<std::string> remove_stopwords(std::vector<std::string> tokens, const StopList& stoplist);

/// Porter stemmer. Tokens that are not purely lowercase alphabetic are
/// returned unchanged.
std::string stem(std::string_view token);

/// tokenize -> stop-word removal -> stemming (iterated to a fixed point)
/// -> a final stop-word/length filter. Applying the pipeline to the joined
/// output reproduces the output.
std::vector<std::string> preprocess(std::string_view raw_text,
                                    const StopList& stoplist = StopList::english());

// ---------------------------------------------------------------------------
// Loaders

struct LoadResult {
  LabeledCorpus corpus;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

/// `dir/spam` and `dir/ham` of plain-text files. Arrival order is the merged
/// sort of file names (Enron names begin with a sequence number).
LoadResult load_enron(const std::filesystem::path& dir,
                      const StopList& stoplist = StopList::english());

struct PuOptions {
  std::string spam_marker = "spmsg";
  std::string legit_marker = "legit";
  /// PU corpora ship with words replaced by integer ids. When set, tokens
  /// are kept verbatim (digits included) and stop-word removal and
  /// stemming are skipped.
  bool encoded_tokens = true;

  bool operator==(const PuOptions&) const = default;
};

/// Fold subdirectories (part1, part2, ...) of files whose names carry the
/// class marker. Arrival order is the sort of relative paths.
LoadResult load_pu(const std::filesystem::path& dir, const PuOptions& options = {},
                   const StopList& stoplist = StopList::english());

/// One document per line: `label tokenId:count ...` with label 1 (spam),
/// -1 (legitimate) or 0 (unlabeled). Tokens are used as-is.
LoadResult load_ecml(const std::filesystem::path& file);
LabeledCorpus parse_ecml(std::string_view text, std::string_view source_name = "<ecml>");

/// Writes the Enron directory layout; `load_enron` on the result reproduces
/// the corpus tokens (given already-preprocessed tokens).
void write_enron_layout(const LabeledCorpus& corpus, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Partitioning and synthetic streams

/// First ceil(train_fraction * n) documents (arrival order, or a seeded
/// shuffle) train; the rest splits into `n_batches` contiguous batches whose
/// sizes differ by at most one, larger batches first.
StreamPartition partition_stream(const LabeledCorpus& corpus, double train_fraction,
                                 std::size_t n_batches, bool chronological,
                                 std::uint64_t seed = 0);

/// Splits a corpus (arrival order) into `n_batches` contiguous batches,
/// larger batches first. Used when test documents come from a separate file.
std::vector<LabeledCorpus> split_batches(const LabeledCorpus& corpus, std::size_t n_batches);

struct SynthParams {
  std::size_t vocab_size = 400;      ///< tokens per class pool
  std::size_t n_docs = 2000;
  std::size_t drift_point = 1000;    ///< first arrival index of phase two
  double overlap = 0.2;              ///< share of the spam pool kept after drift
  std::size_t doc_length = 40;       ///< mean tokens per document
  std::size_t background_size = 200; ///< class-neutral pool
  double background_rate = 0.2;
  double cross_rate = 0.15;          ///< spam draws from the legitimate pool
  double zipf_exponent = 1.0;

  bool operator==(const SynthParams&) const = default;
};

/// Two-phase corpus. Phase one draws spam and legitimate tokens from
/// disjoint pools, spam padded with legitimate words at `cross_rate`. From
/// `drift_point` on, a (1 - overlap) share of the spam ranks is replaced by
/// fresh tokens. Labels are balanced within each phase.
LabeledCorpus synth_drift(std::uint64_t seed, const SynthParams& params = {});

}  // namespace spamfilter
