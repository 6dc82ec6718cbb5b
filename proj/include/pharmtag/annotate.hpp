#pragma once

// The labeling engine. Builds the labeled dataset by matching document
// tokens against gazetteer core names, extending matches over neighbouring
// entry tokens, concatenating consecutive same-label spans across connector
// tokens, and merging annotation sets with source precedence.
//
// Core name: the residue of a gazetteer entry after dropping punctuation and
// non-entity tokens ("Sanofi Pharmaceuticals Ltd. Spain" -> "Sanofi").
// A token matches an entry when its normalized form scores at least
// cfg.threshold against any core token of that entry; the winning entry is
// the one with the highest score, ties broken by longer entry, then by
// lexicographic entry order.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pharmtag/corpus.hpp"
#include "pharmtag/error.hpp"
#include "pharmtag/similarity.hpp"
#include "pharmtag/tokenize.hpp"

namespace pharmtag {

struct EntitySpan {
  std::size_t start = 0;  // code-point index, inclusive
  std::size_t end = 0;    // exclusive
  std::string surface;    // always equals document text[start..end)
  std::string label;
  double score = 0.0;
  std::string source;

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

inline bool spans_overlap(const EntitySpan& a, const EntitySpan& b) {
  return a.start < b.end && b.start < a.end;
}

struct LabeledDataset {
  std::map<std::string, std::vector<EntitySpan>> annotations;
};

struct MatchConfig {
  double threshold = 0.9;
  std::size_t max_gap_tokens = 1;
  bool enable_neighbor_extension = true;
  std::vector<std::string> connector_words = {"&", "and"};
  std::string source = "gazetteer";
};

inline void validate(const MatchConfig& cfg) {
  if (!(cfg.threshold > 0.0 && cfg.threshold <= 1.0))
    throw error("match threshold must be in (0, 1]");
}

// Entry with all non-entity and punctuation tokens removed, original token
// order preserved; empty result means the entry has no matchable core.
inline std::string core_name(std::string_view entry, const NonEntityList& nel,
                             const TokenizerOptions& opts = {}) {
  std::string out;
  for (const auto& tok : tokenize_text(entry, opts)) {
    if (tok.is_punct || nel.contains(tok.text)) continue;
    if (!out.empty()) out += ' ';
    out += tok.text;
  }
  return out;
}

// Normalized core identity, used to decide whether two surfaces name the
// same entity (evaluation splits key on this).
inline std::string core_key(std::string_view entry, const NonEntityList& nel,
                            const TokenizerOptions& opts = {}) {
  std::string out;
  for (const auto& tok : tokenize_text(entry, opts)) {
    if (tok.is_punct || nel.contains(tok.text)) continue;
    if (!out.empty()) out += ' ';
    out += tok.norm;
  }
  return out;
}

namespace detail {

struct PreparedEntry {
  std::string entry;                     // original gazetteer entry
  std::vector<std::string> token_norms;  // all entry tokens, normalized
  std::vector<std::size_t> core_idx;     // indices into token_norms
  std::string core_surface;
  std::string core_key;
  std::size_t entry_cp_len = 0;
};

struct PreparedGazetteer {
  std::string label;
  std::vector<PreparedEntry> entries;
};

inline PreparedGazetteer prepare_gazetteer(const Gazetteer& gaz, const NonEntityList& nel,
                                           const TokenizerOptions& opts) {
  PreparedGazetteer prepared;
  prepared.label = gaz.label;
  for (const auto& entry : gaz.entries) {  // std::set: lexicographic order
    PreparedEntry pe;
    pe.entry = entry;
    pe.entry_cp_len = cp_length(entry);
    std::string core, key;
    for (const auto& tok : tokenize_text(entry, opts)) {
      const bool is_core = !tok.is_punct && !nel.contains(tok.text) && !tok.norm.empty();
      if (is_core) {
        pe.core_idx.push_back(pe.token_norms.size());
        if (!core.empty()) { core += ' '; key += ' '; }
        core += tok.text;
        key += tok.norm;
      }
      pe.token_norms.push_back(tok.norm);
    }
    if (pe.core_idx.empty()) continue;  // nothing matchable
    pe.core_surface = std::move(core);
    pe.core_key = std::move(key);
    prepared.entries.push_back(std::move(pe));
  }
  return prepared;
}

inline std::vector<EntitySpan> annotate_prepared(const Document& doc,
                                                 const std::vector<Token>& tokens,
                                                 const PreparedGazetteer& gaz,
                                                 const MatchConfig& cfg) {
  std::vector<EntitySpan> spans;
  const Utf8View view(doc.text);

  std::size_t i = 0;
  while (i < tokens.size()) {
    const Token& t = tokens[i];
    if (t.is_punct || t.is_stop || t.norm.empty()) { ++i; continue; }

    const PreparedEntry* best = nullptr;
    double best_score = 0.0;
    std::size_t best_core = 0;  // index into best->token_norms
    for (const auto& e : gaz.entries) {
      for (const std::size_t ci : e.core_idx) {
        const double s = match_score(t.norm, e.token_norms[ci]).value;
        if (s < cfg.threshold) continue;
        const bool better =
            !best || s > best_score ||
            (s == best_score && (e.entry_cp_len > best->entry_cp_len ||
                                 (e.entry_cp_len == best->entry_cp_len && e.entry < best->entry)));
        if (better) { best = &e; best_score = s; best_core = ci; }
      }
    }
    if (!best) { ++i; continue; }

    std::size_t lo = i, hi = i;
    if (cfg.enable_neighbor_extension && best->token_norms.size() > 1) {
      std::vector<bool> used(best->token_norms.size(), false);
      used[best_core] = true;
      auto try_extend = [&](std::size_t j) {
        double s_best = 0.0;
        std::size_t k_best = best->token_norms.size();
        for (std::size_t k = 0; k < best->token_norms.size(); ++k) {
          if (used[k]) continue;
          const double s = match_score(tokens[j].norm, best->token_norms[k]).value;
          if (s > s_best) { s_best = s; k_best = k; }
        }
        if (s_best < cfg.threshold) return false;
        used[k_best] = true;
        return true;
      };
      for (std::size_t j = i + 1; j < tokens.size() && try_extend(j); ++j) hi = j;
      for (std::size_t j = i; j > 0 && try_extend(j - 1); --j) lo = j - 1;
    }
    // never extend backwards into an already emitted span
    if (!spans.empty()) {
      while (tokens[lo].start < spans.back().end) ++lo;
    }

    EntitySpan span;
    span.start = tokens[lo].start;
    span.end = tokens[hi].end;
    span.surface = view.substr(span.start, span.end);
    span.label = gaz.label;
    span.score = best_score;
    span.source = cfg.source;
    spans.push_back(std::move(span));
    i = hi + 1;
  }
  return spans;
}

}  // namespace detail

// Token-level gazetteer matching over one document. Tokens must come from
// pharmtag::tokenize on the same document.
inline std::vector<EntitySpan> annotate_document(const Document& doc,
                                                 const std::vector<Token>& tokens,
                                                 const Gazetteer& gaz, const NonEntityList& nel,
                                                 const MatchConfig& cfg,
                                                 const TokenizerOptions& opts = {}) {
  validate(cfg);
  const auto prepared = detail::prepare_gazetteer(gaz, nel, opts);
  return detail::annotate_prepared(doc, tokens, prepared, cfg);
}

// Merge same-label spans separated by at most cfg.max_gap_tokens connector
// tokens ("&", "and", single punctuation) into one span; the surface is
// re-read from the document text.
inline std::vector<EntitySpan> concatenate_consecutive(const Document& doc,
                                                       std::vector<EntitySpan> spans,
                                                       const std::vector<Token>& tokens,
                                                       const MatchConfig& cfg) {
  if (spans.size() < 2) return spans;
  const Utf8View view(doc.text);
  auto is_connector = [&](const Token& t) {
    if (t.is_punct && t.end - t.start == 1) return true;
    const std::string folded = fold_ascii(t.text);
    return std::find(cfg.connector_words.begin(), cfg.connector_words.end(), folded) !=
           cfg.connector_words.end();
  };

  std::vector<EntitySpan> out;
  out.push_back(spans.front());
  for (std::size_t s = 1; s < spans.size(); ++s) {
    EntitySpan& prev = out.back();
    const EntitySpan& cur = spans[s];
    bool merged = false;
    if (cur.label == prev.label && cur.start >= prev.end) {
      std::size_t gap = 0;
      bool all_connectors = true;
      for (const auto& t : tokens) {
        if (t.start >= prev.end && t.end <= cur.start) {
          ++gap;
          if (!is_connector(t)) { all_connectors = false; break; }
        }
      }
      if (all_connectors && gap <= cfg.max_gap_tokens) {
        prev.end = cur.end;
        prev.surface = view.substr(prev.start, prev.end);
        prev.score = std::max(prev.score, cur.score);
        merged = true;
      }
    }
    if (!merged) out.push_back(cur);
  }
  return out;
}

// Collision rule: every primary span survives; a secondary span is kept only
// when it overlaps no primary span.
inline std::vector<EntitySpan> merge_with_precedence(std::vector<EntitySpan> primary,
                                                     const std::vector<EntitySpan>& secondary) {
  for (const auto& s : secondary) {
    const bool collides = std::any_of(primary.begin(), primary.end(),
                                      [&](const EntitySpan& p) { return spans_overlap(p, s); });
    if (!collides) primary.push_back(s);
  }
  std::sort(primary.begin(), primary.end(),
            [](const EntitySpan& a, const EntitySpan& b) { return a.start < b.start; });
  return primary;
}

struct BuildReport {
  std::size_t documents = 0;
  std::size_t total_spans = 0;
  std::map<std::string, std::size_t> spans_per_label;
};

// Full pipeline over a corpus: annotate per gazetteer, concatenate, merge
// with precedence in gazetteer list order (first gazetteer wins collisions).
// Documents are processed in parallel; results are combined in corpus order.
inline LabeledDataset build_labeled_dataset(const Corpus& corpus,
                                            const std::vector<Gazetteer>& gazetteers,
                                            const NonEntityList& nel, const MatchConfig& cfg,
                                            const TokenizerOptions& opts = {},
                                            BuildReport* report = nullptr,
                                            std::size_t threads = 0) {
  validate(cfg);
  {
    std::set<std::string> labels;
    for (const auto& g : gazetteers)
      if (!labels.insert(g.label).second)
        throw error("duplicate gazetteer label \"" + g.label + "\"");
  }
  std::vector<detail::PreparedGazetteer> prepared;
  prepared.reserve(gazetteers.size());
  for (const auto& g : gazetteers) prepared.push_back(detail::prepare_gazetteer(g, nel, opts));

  const std::size_t n = corpus.documents.size();
  std::vector<std::vector<EntitySpan>> results(n);
  auto work = [&](std::size_t d) {
    const Document& doc = corpus.documents[d];
    const auto tokens = tokenize(doc, opts);
    std::vector<EntitySpan> merged;
    for (const auto& pg : prepared) {
      auto spans = detail::annotate_prepared(doc, tokens, pg, cfg);
      spans = concatenate_consecutive(doc, std::move(spans), tokens, cfg);
      merged = merge_with_precedence(std::move(merged), spans);
    }
    results[d] = std::move(merged);
  };

  std::size_t nthreads = threads ? threads : std::thread::hardware_concurrency();
  nthreads = std::max<std::size_t>(1, std::min(nthreads, n ? n : 1));
  if (nthreads <= 1 || n < 2) {
    for (std::size_t d = 0; d < n; ++d) work(d);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t d = t; d < n; d += nthreads) work(d);
      });
    }
    for (auto& th : pool) th.join();
  }

  LabeledDataset ds;
  for (std::size_t d = 0; d < n; ++d)
    ds.annotations[corpus.documents[d].id] = std::move(results[d]);

  if (report) {
    report->documents = n;
    report->total_spans = 0;
    report->spans_per_label.clear();
    for (const auto& [id, spans] : ds.annotations) {
      for (const auto& s : spans) {
        ++report->spans_per_label[s.label];
        ++report->total_spans;
      }
    }
  }
  return ds;
}

// MD dataset on disk: JSONL, one object per document, spans sorted by start.
inline void save_dataset(const std::filesystem::path& path, const LabeledDataset& ds,
                         const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot write file: " + path.string());
  for (const auto& doc : corpus.documents) {
    nlohmann::ordered_json j;
    j["id"] = doc.id;
    j["spans"] = nlohmann::ordered_json::array();
    if (auto it = ds.annotations.find(doc.id); it != ds.annotations.end()) {
      for (const auto& s : it->second) {
        j["spans"].push_back({{"start", s.start},
                              {"end", s.end},
                              {"surface", s.surface},
                              {"label", s.label},
                              {"score", s.score},
                              {"source", s.source}});
      }
    }
    out << j.dump() << "\n";
  }
}

inline EntitySpan span_from_json(const nlohmann::json& js, const std::string& where) {
  EntitySpan s;
  try {
    s.start = js.at("start").get<std::size_t>();
    s.end = js.at("end").get<std::size_t>();
    s.surface = js.at("surface").get<std::string>();
    s.label = js.at("label").get<std::string>();
    s.score = js.value("score", 1.0);
    s.source = js.value("source", "unknown");
  } catch (const nlohmann::json::exception& e) {
    throw error(where + ": bad span object: " + e.what());
  }
  if (s.start >= s.end) throw error(where + ": span start must be < end");
  return s;
}

// Reads the MD JSONL shape; also accepts a single AnalysisExport-style
// object ({"id": ..., "entities": [...]}) so exports can be scored directly.
inline LabeledDataset load_dataset(const std::filesystem::path& path) {
  LabeledDataset ds;
  const auto lines = detail::read_lines(path);

  auto add_doc = [&](const nlohmann::json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("id"))
      throw error(where + ": expected object with \"id\"");
    const std::string id = j.at("id").get<std::string>();
    const char* field = j.contains("spans") ? "spans" : "entities";
    if (!j.contains(field)) throw error(where + ": missing \"spans\"");
    std::vector<EntitySpan> spans;
    for (const auto& js : j.at(field)) spans.push_back(span_from_json(js, where));
    std::sort(spans.begin(), spans.end(),
              [](const EntitySpan& a, const EntitySpan& b) { return a.start < b.start; });
    if (!ds.annotations.emplace(id, std::move(spans)).second)
      throw error(where + ": duplicate document id \"" + id + "\"");
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim_view(lines[i]).empty()) continue;
    const std::string where = path.filename().string() + " line " + std::to_string(i + 1);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error& e) {
      // maybe a pretty-printed single-object export; try whole file once
      if (i == 0) {
        try {
          j = nlohmann::json::parse(detail::read_file(path));
          add_doc(j, path.filename().string());
          return ds;
        } catch (const nlohmann::json::parse_error&) {
        }
      }
      throw error(where + ": malformed JSON: " + e.what());
    }
    add_doc(j, where);
  }
  return ds;
}

}  // namespace pharmtag
