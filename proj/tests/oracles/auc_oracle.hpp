#pragma once

// Wilcoxon-Mann-Whitney pair count: P(score_spam > score_legit) + ties / 2.

#include <vector>

#include "spamfilter/corpus.hpp"

namespace oracle {

inline double pairwise_auc(const std::vector<double>& scores, const std::vector<spamfilter::Label>& truths) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (truths[i] != spamfilter::Label::Spam) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (truths[j] != spamfilter::Label::Legitimate) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / pairs;
}

}  // namespace oracle
