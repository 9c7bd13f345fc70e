#include "spamfilter/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "spamfilter/error.hpp"
#include "spamfilter/random.hpp"
#include "spamfilter/text_format.hpp"

namespace spamfilter {

int label_sign(Label label) {
  switch (label) {
    case Label::Spam:
      return +1;
    case Label::Legitimate:
      return -1;
    case Label::Unlabeled:
      break;
  }
  throw InvalidArgument("unlabeled document has no class sign");
}

Label label_from_sign(int sign) { return sign > 0 ? Label::Spam : Label::Legitimate; }

std::string_view to_string(Label label) {
  switch (label) {
    case Label::Spam:
      return "spam";
    case Label::Legitimate:
      return "legitimate";
    case Label::Unlabeled:
      return "unlabeled";
  }
  return "unlabeled";
}

LabeledCorpus::LabeledCorpus(std::vector<Document> documents) : documents_(std::move(documents)) {
  std::stable_sort(documents_.begin(), documents_.end(),
                   [](const Document& a, const Document& b) { return a.arrival_index < b.arrival_index; });
  for (std::size_t i = 1; i < documents_.size(); ++i) {
    if (documents_[i].arrival_index == documents_[i - 1].arrival_index)
      throw InvalidArgument("duplicate arrival index " + std::to_string(documents_[i].arrival_index));
  }
  for (const auto& d : documents_) {
    if (d.label == Label::Spam) ++spam_count_;
    if (d.label == Label::Legitimate) ++legit_count_;
  }
}

std::uint64_t LabeledCorpus::checksum() const {
  text::Fnv1a h;
  h.update_u64(documents_.size());
  for (const auto& d : documents_) {
    h.update(d.id);
    h.update_u64(static_cast<std::uint64_t>(d.label));
    h.update_u64(d.arrival_index);
    h.update_u64(d.tokens.size());
    for (const auto& t : d.tokens) {
      h.update(t);
      h.update(std::string_view("\0", 1));
    }
  }
  return h.digest();
}

std::size_t StreamPartition::total_size() const {
  std::size_t n = training.size();
  for (const auto& b : test_batches) n += b.size();
  return n;
}

std::uint64_t StreamPartition::checksum() const {
  text::Fnv1a h;
  h.update_u64(training.checksum());
  h.update_u64(test_batches.size());
  for (const auto& b : test_batches) h.update_u64(b.checksum());
  return h.digest();
}

StreamPartition partition_stream(const LabeledCorpus& corpus, double train_fraction,
                                 std::size_t n_batches, bool chronological, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw InvalidArgument("train_fraction must lie in (0, 1)");
  if (n_batches < 1) throw InvalidArgument("n_batches must be at least 1");
  if (corpus.empty()) throw InvalidArgument("cannot partition an empty corpus");

  const std::size_t n = corpus.size();
  // The epsilon keeps exact products such as 5172 * (1/3) from rounding up.
  auto n_train = static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(n) - 1e-9));
  n_train = std::clamp<std::size_t>(n_train, 1, n);
  const std::size_t n_test = n - n_train;
  if (n_batches > n_test)
    throw InvalidArgument("n_batches (" + std::to_string(n_batches) + ") exceeds test size (" +
                          std::to_string(n_test) + ")");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (!chronological) {
    Rng rng(seed);
    rng.shuffle(order);
  }

  auto take = [&](std::size_t from, std::size_t to) {
    std::vector<Document> docs;
    docs.reserve(to - from);
    for (std::size_t i = from; i < to; ++i) docs.push_back(corpus[order[i]]);
    return LabeledCorpus(std::move(docs));
  };

  StreamPartition out;
  out.training = take(0, n_train);
  const std::size_t base = n_test / n_batches;
  const std::size_t extra = n_test % n_batches;
  std::size_t pos = n_train;
  for (std::size_t b = 0; b < n_batches; ++b) {
    const std::size_t len = base + (b < extra ? 1 : 0);
    out.test_batches.push_back(take(pos, pos + len));
    pos += len;
  }
  return out;
}

std::vector<LabeledCorpus> split_batches(const LabeledCorpus& corpus, std::size_t n_batches) {
  if (n_batches < 1) throw InvalidArgument("n_batches must be at least 1");
  if (n_batches > corpus.size())
    throw InvalidArgument("n_batches (" + std::to_string(n_batches) + ") exceeds corpus size (" +
                          std::to_string(corpus.size()) + ")");
  const std::size_t base = corpus.size() / n_batches;
  const std::size_t extra = corpus.size() % n_batches;
  std::vector<LabeledCorpus> out;
  std::size_t pos = 0;
  for (std::size_t b = 0; b < n_batches; ++b) {
    const std::size_t len = base + (b < extra ? 1 : 0);
    out.emplace_back(std::vector<Document>(corpus.begin() + static_cast<std::ptrdiff_t>(pos),
                                           corpus.begin() + static_cast<std::ptrdiff_t>(pos + len)));
    pos += len;
  }
  return out;
}

}  // namespace spamfilter
