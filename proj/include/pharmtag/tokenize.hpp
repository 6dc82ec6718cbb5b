#pragma once

// Deterministic tokenizer with exact code-point offsets. Raw text is never
// mutated; case folding, stop-word flags and lemmatization are views carried
// on the token. Rule set: split on Unicode whitespace, then peel leading and
// trailing punctuation into single-character tokens, keeping intra-word
// punctuation ("GmbH," -> "GmbH" + ",", "U.S" stays whole).

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "pharmtag/corpus.hpp"
#include "pharmtag/unicode.hpp"

namespace pharmtag {

struct Token {
  std::string text;   // exact surface, text[start..end)
  std::size_t start;  // code-point index, inclusive
  std::size_t end;    // code-point index, exclusive
  std::string norm;   // case-folded, lemmatized view
  bool is_punct;
  bool is_stop;
};

inline const std::unordered_set<std::string>& default_stop_words() {
  static const std::unordered_set<std::string> words = {
      "a", "an", "the", "and", "or", "but", "of", "in", "on", "at", "to",
      "for", "with", "by", "from", "as", "is", "are", "was", "were", "be",
      "been", "being", "it", "its", "this", "that", "these", "those", "he",
      "she", "they", "we", "you", "i", "his", "her", "their", "our", "had",
      "has", "have", "not", "no", "so", "if", "than", "then", "into", "over",
  };
  return words;
}

struct TokenizerOptions {
  std::unordered_set<std::string> stop_words = default_stop_words();
  std::unordered_map<std::string, std::string> lemma_exceptions;
};

inline std::unordered_set<std::string> load_stop_words(const std::filesystem::path& path) {
  std::unordered_set<std::string> words;
  for (const auto& line : detail::read_lines(path)) {
    const auto w = trim_view(line);
    if (!w.empty()) words.insert(fold_ascii(w));
  }
  return words;
}

// TSV: surface<TAB>lemma, one pair per line. Keys are case-folded.
inline std::unordered_map<std::string, std::string> load_lemma_exceptions(
    const std::filesystem::path& path) {
  std::unordered_map<std::string, std::string> table;
  for (const auto& line : detail::read_lines(path)) {
    if (trim_view(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw error(path.string() + ": expected surface<TAB>lemma, got \"" + line + "\"");
    table[fold_ascii(trim_view(line.substr(0, tab)))] =
        std::string(trim_view(line.substr(tab + 1)));
  }
  return table;
}

// Case fold, strip trailing periods and possessive 's, then apply the fixed
// plural suffix rules (exceptions table wins over the rules).
inline std::string normalize(std::string_view surface,
                             const std::unordered_map<std::string, std::string>& exceptions) {
  std::string s = fold_ascii(surface);
  while (!s.empty() && s.back() == '.') s.pop_back();
  if (auto it = exceptions.find(s); it != exceptions.end()) return it->second;
  auto ends_with = [&](std::string_view suffix) {
    return s.size() >= suffix.size() &&
           std::string_view(s).substr(s.size() - suffix.size()) == suffix;
  };
  if (ends_with("'s") || ends_with("\xE2\x80\x99s")) {  // ' or U+2019
    s.erase(s.size() - (ends_with("'s") ? 2 : 4));
    return s;
  }
  if (s.size() >= 5 && ends_with("ies")) {
    s.replace(s.size() - 3, 3, "y");
  } else if (s.size() >= 5 && ends_with("es") &&
             (s[s.size() - 3] == 's' || s[s.size() - 3] == 'x' || s[s.size() - 3] == 'z' ||
              ends_with("ches") || ends_with("shes"))) {
    s.erase(s.size() - 2);
  } else if (s.size() >= 4 && s.back() == 's' && !ends_with("ss") && !ends_with("us") &&
             !ends_with("is")) {
    s.pop_back();
  }
  return s;
}

inline std::string normalize(std::string_view surface) {
  static const std::unordered_map<std::string, std::string> none;
  return normalize(surface, none);
}

inline std::vector<Token> tokenize_text(std::string_view text,
                                        const TokenizerOptions& opts = {}) {
  std::vector<Token> tokens;
  const Utf8View view(text);
  const std::size_t n = view.size();

  auto emit = [&](std::size_t a, std::size_t b) {
    Token t;
    t.text = view.substr(a, b);
    t.start = a;
    t.end = b;
    t.norm = normalize(t.text, opts.lemma_exceptions);
    t.is_punct = true;
    for (std::size_t k = a; k < b; ++k)
      if (!is_punct_cp(view.cps[k])) { t.is_punct = false; break; }
    t.is_stop = opts.stop_words.count(fold_ascii(t.text)) > 0;
    tokens.push_back(std::move(t));
  };

  std::size_t i = 0;
  while (i < n) {
    while (i < n && is_space_cp(view.cps[i])) ++i;
    if (i >= n) break;
    std::size_t j = i;
    while (j < n && !is_space_cp(view.cps[j])) ++j;
    // peel leading punctuation, one code point per token
    std::size_t a = i;
    while (a + 1 < j && is_punct_cp(view.cps[a])) {
      emit(a, a + 1);
      ++a;
    }
    // find trailing punctuation
    std::size_t b = j;
    while (b > a + 1 && is_punct_cp(view.cps[b - 1])) --b;
    emit(a, b);
    for (std::size_t k = b; k < j; ++k) emit(k, k + 1);
    i = j;
  }
  return tokens;
}

inline std::vector<Token> tokenize(const Document& doc, const TokenizerOptions& opts = {}) {
  return tokenize_text(doc.text, opts);
}

inline std::vector<Token> tokenize(const Document& doc,
                                   const std::unordered_set<std::string>& stop_words) {
  TokenizerOptions opts;
  opts.stop_words = stop_words;
  return tokenize_text(doc.text, opts);
}

inline const std::unordered_set<std::string>& default_abbreviations() {
  static const std::unordered_set<std::string> abbrevs = {
      "ltd.", "inc.", "dr.", "mr.", "mrs.", "ms.", "co.", "corp.", "vs.",
      "e.g.", "i.e.", "etc.", "st.", "no.", "approx.",
  };
  return abbrevs;
}

// Sentence ranges as code-point [start, end) pairs. A sentence ends at
// terminal punctuation (. ! ?) followed by whitespace and an uppercase
// letter or digit, unless the word ending there is a known abbreviation.
inline std::vector<std::pair<std::size_t, std::size_t>> split_sentences(
    std::string_view text,
    const std::unordered_set<std::string>& abbreviations = default_abbreviations()) {
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  const Utf8View view(text);
  const std::size_t n = view.size();

  std::size_t start = 0;
  while (start < n && is_space_cp(view.cps[start])) ++start;
  if (start >= n) return ranges;

  for (std::size_t i = start; i < n; ++i) {
    const CodePoint c = view.cps[i];
    if (c != '.' && c != '!' && c != '?') continue;
    // run of terminal punctuation
    std::size_t e = i;
    while (e + 1 < n && (view.cps[e + 1] == '.' || view.cps[e + 1] == '!' ||
                         view.cps[e + 1] == '?'))
      ++e;
    std::size_t ws = e + 1;
    if (ws >= n || !is_space_cp(view.cps[ws])) { i = e; continue; }
    std::size_t next = ws;
    while (next < n && is_space_cp(view.cps[next])) ++next;
    if (next >= n || !is_upper_or_digit_cp(view.cps[next])) { i = e; continue; }
    if (c == '.') {
      std::size_t w = i;
      while (w > start && !is_space_cp(view.cps[w - 1])) --w;
      if (abbreviations.count(fold_ascii(view.substr(w, e + 1)))) { i = e; continue; }
    }
    ranges.emplace_back(start, e + 1);
    start = next;
    i = e;
  }
  if (start < n) {
    std::size_t end = n;
    while (end > start && is_space_cp(view.cps[end - 1])) --end;
    if (end > start) ranges.emplace_back(start, end);
  }
  return ranges;
}

}  // namespace pharmtag
