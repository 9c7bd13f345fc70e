#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "spamfilter/features.hpp"

namespace spamfilter {

enum class Selector { Tfdcr, InfoGain, ChiSquare, Gini, GainRatio, Cfs };

std::string_view to_string(Selector s);
Selector parse_selector(std::string_view name);
const std::vector<Selector>& all_selectors();

/// Document-frequency baseline scores. With A = df_s, B = df_l,
/// C = N_S - A, D = N_L - B, N = N_S + N_L and base-2 logarithms:
///
///   IG   = H(class) - P(t) H(class | t) - P(~t) H(class | ~t)
///   CHI  = N (AD - BC)^2 / ((A+C)(B+D)(A+B)(C+D))
///   GINI = sum_c P(t|c)^2 P(c|t)^2           (improved Gini index)
///   IGR  = IG / H(t), H(t) the entropy of the present/absent split
///   CFS  = 2 IG / (H(class) + H(t))          (symmetrical uncertainty,
///          the single-feature merit of correlation-based selection)
///
/// Any 0/0 term is scored 0. Selector::Tfdcr is rejected here.
std::map<std::string, double, std::less<>> baseline_score(Selector method, const CorpusCounts& counts);

/// Scores every term with `method` (TFDCR included) and keeps the top N.
FeatureSet select_features(Selector method, const CorpusCounts& counts, std::size_t n);

}  // namespace spamfilter
