#pragma once

// Dataset serializers for the downstream trainer formats: sentence-local
// span offsets, BIO, BIOUL and single-tag (I/O) token labeling, plus the
// CoNLL-style two-column parser used for round-trip verification.
//
// Spans must align to token boundaries; misalignment is a hard error so
// labeling bugs surface here instead of silently corrupting training data.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "pharmtag/annotate.hpp"
#include "pharmtag/corpus.hpp"
#include "pharmtag/tokenize.hpp"

namespace pharmtag {

enum class TagScheme { bio, bioul, token_tag };

inline std::string_view scheme_name(TagScheme s) {
  switch (s) {
    case TagScheme::bio: return "bio";
    case TagScheme::bioul: return "bioul";
    case TagScheme::token_tag: return "token_tag";
  }
  return "?";
}

struct TaggedSentence {
  std::vector<std::pair<std::string, std::string>> tokens;  // (surface, tag)
  TagScheme scheme = TagScheme::bio;

  friend bool operator==(const TaggedSentence&, const TaggedSentence&) = default;
};

struct SpanSentence {
  std::string text;
  std::vector<std::tuple<std::size_t, std::size_t, std::string>> entities;

  friend bool operator==(const SpanSentence&, const SpanSentence&) = default;
};

namespace detail {

struct SentenceTokens {
  std::size_t sent_start = 0;
  std::size_t sent_end = 0;
  std::vector<Token> tokens;                // sentence-local copy, document offsets
  std::vector<const EntitySpan*> spans;     // spans contained in this sentence
};

inline std::vector<SentenceTokens> sentence_partition(const Document& doc,
                                                      const std::vector<EntitySpan>& spans) {
  std::vector<SentenceTokens> out;
  const auto ranges = split_sentences(doc.text);
  const auto tokens = tokenize(doc);
  for (const auto& [s, e] : ranges) {
    SentenceTokens st;
    st.sent_start = s;
    st.sent_end = e;
    for (const auto& t : tokens)
      if (t.start >= s && t.end <= e) st.tokens.push_back(t);
    out.push_back(std::move(st));
  }
  for (const auto& span : spans) {
    bool placed = false;
    for (auto& st : out) {
      if (span.start >= st.sent_start && span.start < st.sent_end) {
        if (span.end > st.sent_end)
          throw error("document \"" + doc.id + "\": span [" + std::to_string(span.start) +
                      ", " + std::to_string(span.end) + ") \"" + span.surface +
                      "\" crosses a sentence boundary");
        st.spans.push_back(&span);
        placed = true;
        break;
      }
    }
    if (!placed)
      throw error("document \"" + doc.id + "\": span [" + std::to_string(span.start) + ", " +
                  std::to_string(span.end) + ") lies outside every sentence");
  }
  return out;
}

// Token index range [first, last] exactly covering the span, or error.
inline std::pair<std::size_t, std::size_t> aligned_token_range(const Document& doc,
                                                               const SentenceTokens& st,
                                                               const EntitySpan& span) {
  std::size_t first = st.tokens.size(), last = st.tokens.size();
  for (std::size_t k = 0; k < st.tokens.size(); ++k) {
    if (st.tokens[k].start == span.start) first = k;
    if (st.tokens[k].end == span.end) last = k;
  }
  if (first >= st.tokens.size() || last >= st.tokens.size() || last < first)
    throw error("document \"" + doc.id + "\": span [" + std::to_string(span.start) + ", " +
                std::to_string(span.end) + ") \"" + span.surface +
                "\" does not align to token boundaries");
  return {first, last};
}

}  // namespace detail

inline std::vector<SpanSentence> to_span_format(const LabeledDataset& ds, const Corpus& corpus) {
  std::vector<SpanSentence> out;
  static const std::vector<EntitySpan> kNone;
  for (const auto& doc : corpus.documents) {
    const auto it = ds.annotations.find(doc.id);
    const auto& spans = it == ds.annotations.end() ? kNone : it->second;
    const Utf8View view(doc.text);
    for (const auto& st : detail::sentence_partition(doc, spans)) {
      SpanSentence ss;
      ss.text = view.substr(st.sent_start, st.sent_end);
      for (const EntitySpan* span : st.spans)
        ss.entities.emplace_back(span->start - st.sent_start, span->end - st.sent_start,
                                 span->label);
      out.push_back(std::move(ss));
    }
  }
  return out;
}

namespace detail {

inline std::vector<TaggedSentence> tag_sentences(const LabeledDataset& ds, const Corpus& corpus,
                                                 TagScheme scheme) {
  std::vector<TaggedSentence> out;
  static const std::vector<EntitySpan> kNone;
  for (const auto& doc : corpus.documents) {
    const auto it = ds.annotations.find(doc.id);
    const auto& spans = it == ds.annotations.end() ? kNone : it->second;
    for (const auto& st : sentence_partition(doc, spans)) {
      std::vector<std::string> tags(st.tokens.size(), "O");
      for (const EntitySpan* span : st.spans) {
        const auto [first, last] = aligned_token_range(doc, st, *span);
        for (std::size_t k = first; k <= last; ++k) {
          switch (scheme) {
            case TagScheme::token_tag:
              tags[k] = "I-" + span->label;
              break;
            case TagScheme::bio:
              tags[k] = (k == first ? "B-" : "I-") + span->label;
              break;
            case TagScheme::bioul:
              if (first == last) tags[k] = "U-" + span->label;
              else if (k == first) tags[k] = "B-" + span->label;
              else if (k == last) tags[k] = "L-" + span->label;
              else tags[k] = "I-" + span->label;
              break;
          }
        }
      }
      TaggedSentence ts;
      ts.scheme = scheme;
      for (std::size_t k = 0; k < st.tokens.size(); ++k)
        ts.tokens.emplace_back(st.tokens[k].text, tags[k]);
      out.push_back(std::move(ts));
    }
  }
  return out;
}

}  // namespace detail

inline std::vector<TaggedSentence> to_bioul(const LabeledDataset& ds, const Corpus& corpus) {
  return detail::tag_sentences(ds, corpus, TagScheme::bioul);
}

inline std::vector<TaggedSentence> to_bio(const LabeledDataset& ds, const Corpus& corpus) {
  return detail::tag_sentences(ds, corpus, TagScheme::bio);
}

inline std::vector<TaggedSentence> to_token_tag(const LabeledDataset& ds, const Corpus& corpus) {
  return detail::tag_sentences(ds, corpus, TagScheme::token_tag);
}

// Scheme well-formedness. BIOUL: B- must be continued by I-* and closed by
// L- of the same label; U and O stand alone. BIO: I- must continue a B-/I-
// of the same label. token_tag: only O and I- tags are allowed.
inline void validate_tagged(const TaggedSentence& sentence, const std::string& where) {
  std::string open;  // label of an open B run (bioul)
  std::string prev;  // previous entity label (bio)
  for (std::size_t k = 0; k < sentence.tokens.size(); ++k) {
    const std::string& tag = sentence.tokens[k].second;
    const std::string here = where + " token " + std::to_string(k + 1);
    if (tag == "O") {
      if (!open.empty()) throw error(here + ": O inside an unterminated B run");
      prev.clear();
      continue;
    }
    if (tag.size() < 3 || tag[1] != '-')
      throw error(here + ": malformed tag \"" + tag + "\"");
    const char kind = tag[0];
    const std::string label = tag.substr(2);
    switch (sentence.scheme) {
      case TagScheme::token_tag:
        if (kind != 'I') throw error(here + ": tag \"" + tag + "\" not allowed in token_tag");
        break;
      case TagScheme::bio:
        if (kind == 'B') prev = label;
        else if (kind == 'I') {
          if (prev != label)
            throw error(here + ": I-" + label + " does not continue a B/I of the same label");
        } else {
          throw error(here + ": tag \"" + tag + "\" not allowed in bio");
        }
        break;
      case TagScheme::bioul:
        if (kind == 'B') {
          if (!open.empty()) throw error(here + ": B inside an unterminated B run");
          open = label;
        } else if (kind == 'I' || kind == 'L') {
          if (open != label)
            throw error(here + ": " + tag + " without a matching open B-" + label);
          if (kind == 'L') open.clear();
        } else if (kind == 'U') {
          if (!open.empty()) throw error(here + ": U inside an unterminated B run");
        } else {
          throw error(here + ": tag \"" + tag + "\" not allowed in bioul");
        }
        break;
    }
  }
  if (!open.empty())
    throw error(where + ": sentence ends inside an unterminated B-" + open + " run");
}

// Two-column UTF-8 text: token TAB tag, one blank line after each sentence.
inline void write_tagged(const std::filesystem::path& path,
                         const std::vector<TaggedSentence>& sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot write file: " + path.string());
  for (const auto& s : sentences) {
    for (const auto& [token, tag] : s.tokens) out << token << '\t' << tag << '\n';
    out << '\n';
  }
}

inline std::vector<TaggedSentence> parse_tagged_text(std::string_view content, TagScheme scheme,
                                                     const std::string& origin = "input") {
  std::vector<TaggedSentence> sentences;
  TaggedSentence current;
  current.scheme = scheme;
  std::size_t lineno = 0;

  auto flush = [&]() {
    if (current.tokens.empty()) return;
    validate_tagged(current, origin + " sentence " + std::to_string(sentences.size() + 1));
    sentences.push_back(std::move(current));
    current = TaggedSentence{};
    current.scheme = scheme;
  };

  std::size_t pos = 0;
  while (pos <= content.size()) {
    const auto nl = content.find('\n', pos);
    std::string_view line = content.substr(pos, nl == std::string_view::npos ? content.size() - pos
                                                                             : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++lineno;
    if (line.empty()) {
      flush();
    } else {
      const auto tab = line.find('\t');
      if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos)
        throw error(origin + " line " + std::to_string(lineno) +
                    ": expected exactly two TAB-separated columns");
      current.tokens.emplace_back(std::string(line.substr(0, tab)),
                                  std::string(line.substr(tab + 1)));
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  flush();
  return sentences;
}

inline std::vector<TaggedSentence> parse_tagged(const std::filesystem::path& path,
                                                TagScheme scheme) {
  return parse_tagged_text(detail::read_file(path), scheme, path.filename().string());
}

// JSON array of {"text": ..., "entities": [[start, end, "LABEL"], ...]}.
inline void write_span_format(const std::filesystem::path& path,
                              const std::vector<SpanSentence>& sentences) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& s : sentences) {
    nlohmann::ordered_json entities = nlohmann::ordered_json::array();
    for (const auto& [start, end, label] : s.entities)
      entities.push_back({start, end, label});
    arr.push_back({{"text", s.text}, {"entities", std::move(entities)}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot write file: " + path.string());
  out << arr.dump(2) << "\n";
}

}  // namespace pharmtag
