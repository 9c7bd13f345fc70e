#include <algorithm>
#include <cmath>
#include <cstdio>

#include "spamfilter/corpus.hpp"
#include "spamfilter/error.hpp"
#include "spamfilter/random.hpp"

namespace spamfilter {
namespace {

std::string pool_token(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%05zu", prefix, i);
  return buf;
}

std::vector<std::string> make_pool(const char* prefix, std::size_t n) {
  std::vector<std::string> pool;
  pool.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pool.push_back(pool_token(prefix, i));
  return pool;
}

class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double exponent) : cumulative_(n) {
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      total += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
      cumulative_[r] = total;
    }
  }

  std::size_t operator()(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace

LabeledCorpus synth_drift(std::uint64_t seed, const SynthParams& p) {
  if (!(p.overlap >= 0.0 && p.overlap <= 1.0)) throw InvalidArgument("overlap must lie in [0, 1]");
  if (p.vocab_size == 0) throw InvalidArgument("vocab_size must be positive");
  if (p.n_docs == 0) throw InvalidArgument("n_docs must be positive");
  if (p.drift_point > p.n_docs) throw InvalidArgument("drift_point exceeds n_docs");
  if (p.doc_length == 0) throw InvalidArgument("doc_length must be positive");
  if (p.background_rate < 0.0 || p.cross_rate < 0.0 || p.background_rate + p.cross_rate >= 1.0)
    throw InvalidArgument("background_rate + cross_rate must lie in [0, 1)");
  if (p.background_rate > 0.0 && p.background_size == 0)
    throw InvalidArgument("background_size must be positive when background_rate > 0");

  Rng rng(seed);
  const auto spam_before = make_pool("sp", p.vocab_size);
  const auto legit = make_pool("lg", p.vocab_size);
  const auto background = make_pool("bg", std::max<std::size_t>(p.background_size, 1));

  // Keep evenly spaced frequency ranks so the surviving share of spam mass
  // tracks `overlap` regardless of seed; overlap == 1 keeps the whole pool.
  auto spam_after = spam_before;
  for (std::size_t i = 0; i < p.vocab_size; ++i) {
    const auto lo = std::floor(static_cast<double>(i) * p.overlap);
    const auto hi = std::floor(static_cast<double>(i + 1) * p.overlap);
    if (!(hi > lo)) spam_after[i] = pool_token("sn", i);
  }

  const ZipfSampler class_rank(p.vocab_size, p.zipf_exponent);
  const ZipfSampler background_rank(background.size(), p.zipf_exponent);

  std::vector<Document> docs;
  docs.reserve(p.n_docs);
  auto emit_phase = [&](std::size_t begin, std::size_t end, const std::vector<std::string>& spam_pool) {
    const std::size_t n = end - begin;
    std::vector<Label> labels(n, Label::Legitimate);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n / 2), Label::Spam);
    rng.shuffle(labels);
    for (std::size_t i = 0; i < n; ++i) {
      Document d;
      d.arrival_index = begin + i;
      d.label = labels[i];
      d.id = pool_token(d.label == Label::Spam ? "synth-spam-" : "synth-ham-", d.arrival_index);
      const auto& own = d.label == Label::Spam ? spam_pool : legit;
      // Only spam borrows from the other class (padding with ham words).
      const double cross = d.label == Label::Spam ? p.cross_rate : 0.0;
      const std::size_t len = p.doc_length / 2 + static_cast<std::size_t>(rng.below(p.doc_length + 1));
      d.tokens.reserve(len);
      for (std::size_t t = 0; t < len; ++t) {
        const double u = rng.uniform();
        if (u < p.background_rate) {
          d.tokens.push_back(background[background_rank(rng)]);
        } else if (u < p.background_rate + cross) {
          d.tokens.push_back(legit[class_rank(rng)]);
        } else {
          d.tokens.push_back(own[class_rank(rng)]);
        }
      }
      docs.push_back(std::move(d));
    }
  };
  emit_phase(0, p.drift_point, spam_before);
  emit_phase(p.drift_point, p.n_docs, spam_after);
  return LabeledCorpus(std::move(docs));
}

}  // namespace spamfilter
