#pragma once

#include <string>
#include <vector>

#include "spamfilter/corpus.hpp"
#include "spamfilter/random.hpp"

namespace testing {

/// Documents over terms w0..w{vocab-1}; the first two are one spam and one
/// legitimate document so both classes are always present.
inline std::vector<spamfilter::Document> random_docs(spamfilter::Rng& rng, std::size_t n_docs, std::size_t vocab,
                                                     std::size_t max_len) {
  using spamfilter::Label;
  std::vector<spamfilter::Document> docs;
  for (std::size_t i = 0; i < n_docs; ++i) {
    spamfilter::Document d;
    d.id = "d" + std::to_string(i);
    d.arrival_index = i;
    d.label = i == 0 ? Label::Spam : i == 1 ? Label::Legitimate : (rng.below(2) ? Label::Spam : Label::Legitimate);
    const std::size_t len = 1 + rng.below(max_len);
    for (std::size_t t = 0; t < len; ++t) d.tokens.push_back("w" + std::to_string(rng.below(vocab)));
    docs.push_back(std::move(d));
  }
  return docs;
}

}  // namespace testing
