#pragma once

// Brute-force TFDCR reference: naive recount straight from the documents and
// exact rational weights compared by cross-multiplication.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "spamfilter/corpus.hpp"

namespace oracle {

using i128 = __int128;

struct Tally {
  long long tf_s = 0, tf_l = 0, df_s = 0, df_l = 0;
};

struct Recount {
  std::map<std::string, Tally> terms;
  long long n_spam = 0, n_legit = 0;
};

inline Recount recount(const std::vector<spamfilter::Document>& docs) {
  Recount r;
  std::set<std::string> vocabulary;
  for (const auto& d : docs) {
    if (d.label == spamfilter::Label::Spam) ++r.n_spam;
    if (d.label == spamfilter::Label::Legitimate) ++r.n_legit;
    if (d.label != spamfilter::Label::Unlabeled) vocabulary.insert(d.tokens.begin(), d.tokens.end());
  }
  for (const auto& term : vocabulary) {
    Tally t;
    for (const auto& d : docs) {
      if (d.label == spamfilter::Label::Unlabeled) continue;
      const long long occurrences = std::count(d.tokens.begin(), d.tokens.end(), term);
      const bool spam = d.label == spamfilter::Label::Spam;
      (spam ? t.tf_s : t.tf_l) += occurrences;
      if (occurrences > 0) ++(spam ? t.df_s : t.df_l);
    }
    r.terms.emplace(term, t);
  }
  return r;
}

/// weight == num / den exactly.
struct Exact {
  i128 num = 0;
  i128 den = 1;
  double value() const { return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den)); }
};

inline bool operator<(const Exact& a, const Exact& b) { return a.num * b.den < b.num * a.den; }
inline bool operator==(const Exact& a, const Exact& b) { return a.num * b.den == b.num * a.den; }

/// |tf_s - tf_l| * max(1, r_big / r_small); a zero df in the denominator
/// counts as one half.
inline Exact tfdcr(const Tally& t, long long ns, long long nl) {
  const long long diff = t.tf_s > t.tf_l ? t.tf_s - t.tf_l : t.tf_l - t.tf_s;
  // r_s = df_s/ns, r_l = df_l/nl. Work in halves to keep integers.
  i128 num, den;
  if (static_cast<i128>(t.df_s) * nl > static_cast<i128>(t.df_l) * ns) {
    num = static_cast<i128>(2 * t.df_s) * nl;                          // 2 df_s / ns ...
    den = static_cast<i128>(ns) * (t.df_l == 0 ? 1 : 2 * t.df_l);      // ... over 2 df_l / nl
  } else {
    num = static_cast<i128>(2 * t.df_l) * ns;
    den = static_cast<i128>(nl) * (t.df_s == 0 ? 1 : 2 * t.df_s);
  }
  if (num < den) {
    num = 1;
    den = 1;
  }
  return {num * diff, den};
}

struct Ranked {
  std::string term;
  Exact weight;
};

/// Full sort of every term: weight descending, then term ascending.
inline std::vector<Ranked> ranking(const Recount& r) {
  std::vector<Ranked> all;
  for (const auto& [term, t] : r.terms) all.push_back({term, tfdcr(t, r.n_spam, r.n_legit)});
  std::sort(all.begin(), all.end(), [](const Ranked& a, const Ranked& b) {
    if (!(a.weight == b.weight)) return b.weight < a.weight;
    return a.term < b.term;
  });
  return all;
}

}  // namespace oracle
