#pragma once

// Independent oracles the tests freeze expected values against. These stay
// deliberately separate from the library implementations: the edit distance
// is a memoized top-down recursion (the library uses an iterative two-row
// table), the cosine oracle enumerates bigrams into a plain map, and the
// BIOUL->BIO rewrite is the textbook tag substitution.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace testsupport {

// Top-down recursive edit distance with memoization over (i, j). The library
// computes the same quantity with an iterative two-row table; this stays a
// plain recursion so the two can disagree if either is wrong.
class EditDistanceOracle {
 public:
  EditDistanceOracle(const std::string& a, const std::string& b)
      : a_(a), b_(b), cols_(b.size() + 1), memo_((a.size() + 1) * (b.size() + 1), -1) {}

  std::size_t value() { return static_cast<std::size_t>(solve(a_.size(), b_.size())); }

 private:
  int solve(std::size_t i, std::size_t j) {
    if (i == 0) return static_cast<int>(j);
    if (j == 0) return static_cast<int>(i);
    int& slot = memo_[i * cols_ + j];
    if (slot >= 0) return slot;
    const int same = a_[i - 1] == b_[j - 1] ? 0 : 1;
    slot = std::min({solve(i - 1, j) + 1, solve(i, j - 1) + 1, solve(i - 1, j - 1) + same});
    return slot;
  }

  std::string a_, b_;
  std::size_t cols_;
  std::vector<int> memo_;
};

inline std::size_t edit_distance_oracle(const std::string& a, const std::string& b) {
  return EditDistanceOracle(a, b).value();
}

inline double levenshtein_oracle(const std::string& a, const std::string& b) {
  if (a.empty() && b.empty()) return 1.0;
  const double d = static_cast<double>(edit_distance_oracle(a, b));
  return 1.0 - d / static_cast<double>(std::max(a.size(), b.size()));
}

// Brute-force bigram cosine over ASCII strings with explicit '^'/'$' padding.
inline double cosine_oracle(const std::string& a, const std::string& b) {
  auto bigrams = [](const std::string& s) {
    std::map<std::string, int> counts;
    if (s.empty()) return counts;
    const std::string padded = "^" + s + "$";
    for (std::size_t i = 0; i + 1 < padded.size(); ++i)
      counts[padded.substr(i, 2)] += 1;
    return counts;
  };
  const auto va = bigrams(a);
  const auto vb = bigrams(b);
  if (va.empty() || vb.empty()) return 0.0;
  double dot = 0, na = 0, nb = 0;
  for (const auto& [k, c] : va) {
    na += static_cast<double>(c) * c;
    if (const auto it = vb.find(k); it != vb.end()) dot += static_cast<double>(c) * it->second;
  }
  for (const auto& [k, c] : vb) nb += static_cast<double>(c) * c;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline double match_score_oracle(const std::string& a, const std::string& b) {
  return std::max(levenshtein_oracle(a, b), cosine_oracle(a, b));
}

// Textbook BIOUL -> BIO rewrite: U becomes B, L becomes I.
inline std::vector<std::pair<std::string, std::string>> bioul_to_bio_oracle(
    const std::vector<std::pair<std::string, std::string>>& tagged) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [token, tag] : tagged) {
    std::string rewritten = tag;
    if (tag.rfind("U-", 0) == 0) rewritten = "B-" + tag.substr(2);
    else if (tag.rfind("L-", 0) == 0) rewritten = "I-" + tag.substr(2);
    out.emplace_back(token, rewritten);
  }
  return out;
}

}  // namespace testsupport
