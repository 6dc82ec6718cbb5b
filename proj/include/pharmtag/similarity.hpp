#pragma once

// String similarity for gazetteer matching. Both measures operate on code
// points and return values in [0, 1]. match_score takes the maximum of the
// two so either measure can clear the matching threshold on its own.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pharmtag/unicode.hpp"

namespace pharmtag {

enum class Measure { levenshtein_norm, cosine_bigram, max_of_both };

struct SimilarityScore {
  double value = 0.0;
  Measure measure = Measure::max_of_both;
};

inline std::vector<CodePoint> decode_cps(std::string_view s) {
  return Utf8View(s).cps;
}

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  const auto ca = decode_cps(a);
  const auto cb = decode_cps(b);
  const std::size_t m = ca.size(), n = cb.size();
  if (m == 0) return n;
  if (n == 0) return m;
  std::vector<std::size_t> prev(n + 1), cur(n + 1);
  for (std::size_t j = 0; j <= n; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= m; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t sub = prev[j - 1] + (ca[i - 1] == cb[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

// 1 - d/max(|a|,|b|); two empty strings count as identical.
inline SimilarityScore levenshtein_similarity(std::string_view a, std::string_view b) {
  const std::size_t la = cp_length(a), lb = cp_length(b);
  if (la == 0 && lb == 0) return {1.0, Measure::levenshtein_norm};
  const double d = static_cast<double>(edit_distance(a, b));
  return {1.0 - d / static_cast<double>(std::max(la, lb)), Measure::levenshtein_norm};
}

namespace detail {

// Character bigram counts over the boundary-padded code-point sequence
// ("^abc$" -> ^a, ab, bc, c$). Empty input yields an empty vector.
inline std::unordered_map<std::uint64_t, double> bigram_counts(std::string_view s) {
  std::unordered_map<std::uint64_t, double> counts;
  const auto cps = decode_cps(s);
  if (cps.empty()) return counts;
  constexpr CodePoint kBegin = 0x110000, kEnd = 0x110001;  // beyond Unicode range
  std::vector<CodePoint> padded;
  padded.reserve(cps.size() + 2);
  padded.push_back(kBegin);
  padded.insert(padded.end(), cps.begin(), cps.end());
  padded.push_back(kEnd);
  for (std::size_t i = 0; i + 1 < padded.size(); ++i) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(padded[i]) << 21) | padded[i + 1];
    counts[key] += 1.0;
  }
  return counts;
}

}  // namespace detail

inline SimilarityScore cosine_similarity(std::string_view a, std::string_view b) {
  const auto va = detail::bigram_counts(a);
  const auto vb = detail::bigram_counts(b);
  if (va.empty() || vb.empty()) return {0.0, Measure::cosine_bigram};
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [k, c] : va) {
    na += c * c;
    if (auto it = vb.find(k); it != vb.end()) dot += c * it->second;
  }
  for (const auto& [k, c] : vb) nb += c * c;
  const double value = dot / (std::sqrt(na) * std::sqrt(nb));
  return {std::clamp(value, 0.0, 1.0), Measure::cosine_bigram};
}

// Inputs are expected pre-normalized (see pharmtag::normalize).
inline SimilarityScore match_score(std::string_view candidate, std::string_view entry) {
  if (candidate == entry && !candidate.empty())
    return {1.0, Measure::max_of_both};
  const double lev = levenshtein_similarity(candidate, entry).value;
  const double cos = cosine_similarity(candidate, entry).value;
  return {std::max(lev, cos), Measure::max_of_both};
}

}  // namespace pharmtag
