#pragma once

// Evaluation machinery: the plain random split, the entity-disjoint split
// with entity replacement, and exact-span precision/recall/F1 scoring.
//
// All seeded draws are made with an explicit Fisher-Yates shuffle over
// mt19937_64 so split results are reproducible across platforms; std::shuffle
// is implementation-defined and deliberately avoided.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "pharmtag/annotate.hpp"
#include "pharmtag/corpus.hpp"

namespace pharmtag {

struct SplitResult {
  struct Replacement {
    std::string doc_id;
    std::string old_surface;
    std::string new_surface;
    std::size_t start = 0;  // position of the new surface, post-rewrite offsets
    std::size_t end = 0;
  };

  std::vector<std::string> train_ids;  // corpus order
  std::vector<std::string> test_ids;   // corpus order
  std::vector<Replacement> replaced;
  std::uint64_t seed = 0;
};

namespace detail {

template <typename T>
inline void fisher_yates(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng() % i]);
}

inline std::size_t portion_size(double ratio, std::size_t n) {
  const auto k = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  return std::clamp<std::size_t>(k, 1, n - 1);
}

}  // namespace detail

inline SplitResult random_split(const Corpus& corpus, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw error("split ratio must be in (0, 1)");
  const std::size_t n = corpus.documents.size();
  if (n < 2) throw error("corpus must contain at least 2 documents to split");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  detail::fisher_yates(order, rng);

  const std::size_t k = detail::portion_size(ratio, n);
  std::vector<bool> in_test(n, false);
  for (std::size_t i = 0; i < k; ++i) in_test[order[i]] = true;

  SplitResult result;
  result.seed = seed;
  for (std::size_t i = 0; i < n; ++i)
    (in_test[i] ? result.test_ids : result.train_ids).push_back(corpus.documents[i].id);
  return result;
}

struct DisjointSplit {
  SplitResult split;
  Corpus corpus;           // training documents rewritten, test documents untouched
  LabeledDataset dataset;  // spans consistent with the rewritten corpus
  std::vector<std::string> test_entities;  // sampled core keys (E_test), sorted
};

// Entity-disjoint split: sample a test-entity subset of the gazetteer core
// names, collect the documents that mention them, force the test portion to
// round(ratio * N) documents, and rewrite every leftover test-entity mention
// in the training portion to a seeded draw from the training entities. The
// guarantee checked at the end: no training span carries a test core name.
inline DisjointSplit entity_disjoint_split(const Corpus& corpus, const LabeledDataset& ds,
                                           const Gazetteer& gaz, const NonEntityList& nel,
                                           double ratio, std::uint64_t seed,
                                           const TokenizerOptions& opts = {}) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw error("split ratio must be in (0, 1)");
  const std::size_t n = corpus.documents.size();
  if (n < 2) throw error("corpus must contain at least 2 documents to split");

  // entity set = distinct core keys of the gazetteer; keep one representative
  // core surface per key for replacements
  std::vector<std::string> entity_keys;
  std::map<std::string, std::string> core_surface_of;
  for (const auto& entry : gaz.entries) {
    const std::string key = core_key(entry, nel, opts);
    if (key.empty()) continue;
    if (core_surface_of.emplace(key, core_name(entry, nel, opts)).second)
      entity_keys.push_back(key);
  }
  std::sort(entity_keys.begin(), entity_keys.end());
  if (entity_keys.size() < 2) throw error("gazetteer yields fewer than 2 distinct core names");

  std::mt19937_64 rng(seed);
  detail::fisher_yates(entity_keys, rng);
  const std::size_t k_entities = detail::portion_size(ratio, entity_keys.size());
  std::unordered_set<std::string> test_entities(entity_keys.begin(),
                                                entity_keys.begin() + k_entities);
  std::vector<std::string> train_entity_list(entity_keys.begin() + k_entities,
                                             entity_keys.end());
  std::sort(train_entity_list.begin(), train_entity_list.end());

  // classify documents by whether they mention a test entity
  auto span_key = [&](const EntitySpan& s) { return core_key(s.surface, nel, opts); };
  std::vector<std::size_t> candidates, others;
  for (std::size_t d = 0; d < n; ++d) {
    const auto it = ds.annotations.find(corpus.documents[d].id);
    bool has_test_entity = false;
    if (it != ds.annotations.end()) {
      for (const auto& s : it->second)
        if (test_entities.count(span_key(s))) { has_test_entity = true; break; }
    }
    (has_test_entity ? candidates : others).push_back(d);
  }

  const std::size_t k_docs = detail::portion_size(ratio, n);
  std::vector<std::size_t> test_docs;
  if (candidates.size() > k_docs) {
    detail::fisher_yates(candidates, rng);
    test_docs.assign(candidates.begin(), candidates.begin() + k_docs);
  } else {
    test_docs = candidates;
    // not enough carriers: top up with documents that mention no test entity
    detail::fisher_yates(others, rng);
    for (std::size_t i = 0; i < others.size() && test_docs.size() < k_docs; ++i)
      test_docs.push_back(others[i]);
  }
  std::sort(test_docs.begin(), test_docs.end());
  std::vector<bool> in_test(n, false);
  for (const std::size_t d : test_docs) in_test[d] = true;

  DisjointSplit out;
  out.split.seed = seed;
  out.corpus = corpus;
  out.dataset = ds;
  out.test_entities.assign(test_entities.begin(), test_entities.end());
  std::sort(out.test_entities.begin(), out.test_entities.end());

  for (std::size_t d = 0; d < n; ++d) {
    Document& doc = out.corpus.documents[d];
    if (in_test[d]) {
      out.split.test_ids.push_back(doc.id);
      continue;
    }
    out.split.train_ids.push_back(doc.id);
    auto it = out.dataset.annotations.find(doc.id);
    if (it == out.dataset.annotations.end()) continue;

    std::vector<EntitySpan>& spans = it->second;
    Utf8View view(doc.text);
    for (std::size_t si = 0; si < spans.size(); ++si) {
      EntitySpan& span = spans[si];
      if (!test_entities.count(span_key(span))) continue;
      if (train_entity_list.empty())
        throw error("training entity set too small to supply replacements for document \"" +
                    doc.id + "\"");
      const std::string& repl_key = train_entity_list[rng() % train_entity_list.size()];
      const std::string& repl = core_surface_of.at(repl_key);

      const std::string old_surface = span.surface;
      const std::size_t old_len = span.end - span.start;
      const std::size_t new_len = cp_length(repl);
      doc.text = view.substr(0, span.start) + repl + view.substr(span.end, view.size());
      view = Utf8View(doc.text);

      span.surface = repl;
      span.end = span.start + new_len;
      const std::ptrdiff_t delta =
          static_cast<std::ptrdiff_t>(new_len) - static_cast<std::ptrdiff_t>(old_len);
      for (std::size_t sj = si + 1; sj < spans.size(); ++sj) {
        spans[sj].start = static_cast<std::size_t>(
            static_cast<std::ptrdiff_t>(spans[sj].start) + delta);
        spans[sj].end = static_cast<std::size_t>(
            static_cast<std::ptrdiff_t>(spans[sj].end) + delta);
      }
      out.split.replaced.push_back(
          {doc.id, old_surface, repl, span.start, span.end});
    }
  }

  // postcondition: no training span carries a test core name
  for (const std::string& id : out.split.train_ids) {
    const auto it = out.dataset.annotations.find(id);
    if (it == out.dataset.annotations.end()) continue;
    for (const auto& s : it->second) {
      if (test_entities.count(span_key(s)))
        throw error("internal: training document \"" + id +
                    "\" still mentions a test entity after replacement");
    }
  }
  return out;
}

enum class MatchMode { exact_span };

struct LabelMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

struct EvalReport {
  std::map<std::string, LabelMetrics> per_label;
  LabelMetrics micro;
};

namespace detail {

// 0/0 is defined as 0 throughout.
inline void finish_metrics(LabelMetrics& m) {
  m.precision = (m.tp + m.fp) ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp) : 0.0;
  m.recall = (m.tp + m.fn) ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn) : 0.0;
  m.f1 = (m.precision + m.recall > 0.0)
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
}

}  // namespace detail

// Exact-span scoring: a prediction is a true positive iff its (start, end,
// label) triple equals a gold span of the same document. Predicted document
// ids must be a subset of the gold ids; gold documents without predictions
// count as all-missed.
inline EvalReport score(const LabeledDataset& gold, const LabeledDataset& predicted,
                        MatchMode mode = MatchMode::exact_span) {
  (void)mode;
  for (const auto& [id, spans] : predicted.annotations) {
    if (!gold.annotations.count(id))
      throw error("predicted document id \"" + id + "\" does not exist in the gold dataset");
  }

  EvalReport report;
  using Key = std::tuple<std::size_t, std::size_t, std::string>;
  for (const auto& [id, gold_spans] : gold.annotations) {
    std::set<Key> gold_set;
    for (const auto& s : gold_spans) gold_set.emplace(s.start, s.end, s.label);

    std::set<Key> pred_set;
    if (const auto it = predicted.annotations.find(id); it != predicted.annotations.end())
      for (const auto& s : it->second) pred_set.emplace(s.start, s.end, s.label);

    for (const auto& k : pred_set) {
      auto& m = report.per_label[std::get<2>(k)];
      if (gold_set.count(k)) ++m.tp;
      else ++m.fp;
    }
    for (const auto& k : gold_set) {
      if (!pred_set.count(k)) ++report.per_label[std::get<2>(k)].fn;
    }
  }

  for (auto& [label, m] : report.per_label) {
    detail::finish_metrics(m);
    report.micro.tp += m.tp;
    report.micro.fp += m.fp;
    report.micro.fn += m.fn;
  }
  detail::finish_metrics(report.micro);
  return report;
}

inline nlohmann::ordered_json to_json(const SplitResult& r) {
  nlohmann::ordered_json j;
  j["seed"] = r.seed;
  j["train_ids"] = r.train_ids;
  j["test_ids"] = r.test_ids;
  j["replaced"] = nlohmann::ordered_json::array();
  for (const auto& rep : r.replaced) {
    j["replaced"].push_back({{"doc", rep.doc_id},
                             {"old", rep.old_surface},
                             {"new", rep.new_surface},
                             {"start", rep.start},
                             {"end", rep.end}});
  }
  return j;
}

inline void save_split(const std::filesystem::path& path, const SplitResult& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot write file: " + path.string());
  out << to_json(r).dump(2) << "\n";
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  auto metrics = [](const LabelMetrics& m) {
    return nlohmann::ordered_json{{"precision", m.precision}, {"recall", m.recall},
                                  {"f1", m.f1},               {"tp", m.tp},
                                  {"fp", m.fp},               {"fn", m.fn}};
  };
  nlohmann::ordered_json j;
  j["per_label"] = nlohmann::ordered_json::object();
  for (const auto& [label, m] : r.per_label) j["per_label"][label] = metrics(m);
  j["micro"] = metrics(r.micro);
  return j;
}

inline std::string render_eval_table(const EvalReport& r) {
  char line[160];
  std::string out;
  std::snprintf(line, sizeof(line), "%-16s %9s %9s %9s %6s %6s %6s\n", "Label", "Precision",
                "Recall", "F1", "TP", "FP", "FN");
  out += line;
  auto row = [&](const std::string& label, const LabelMetrics& m) {
    std::snprintf(line, sizeof(line), "%-16s %9.4f %9.4f %9.4f %6zu %6zu %6zu\n", label.c_str(),
                  m.precision, m.recall, m.f1, m.tp, m.fp, m.fn);
    out += line;
  };
  for (const auto& [label, m] : r.per_label) row(label, m);
  row("micro", r.micro);
  return out;
}

}  // namespace pharmtag
