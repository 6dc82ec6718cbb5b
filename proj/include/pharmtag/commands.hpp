#pragma once

// Implementations behind the CLI subcommands. Each run_* function does the
// whole job of one subcommand (load inputs, compute, write outputs into the
// output directory) and returns a process exit code, reporting failures on
// the error stream. Keeping them here lets tests drive the exact pipeline
// the binary runs.

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pharmtag/annotate.hpp"
#include "pharmtag/corpus.hpp"
#include "pharmtag/evalsplit.hpp"
#include "pharmtag/kg.hpp"
#include "pharmtag/serialize.hpp"
#include "pharmtag/spotlight_client.hpp"
#include "pharmtag/tokenize.hpp"
#include "pharmtag/version.hpp"

namespace pharmtag::cli {

namespace fs = std::filesystem;

// "news.jsonl" -> "news"; "news.md.jsonl" -> "news" (the .md marker is ours).
inline std::string output_stem(const fs::path& path) {
  std::string stem = path.stem().string();
  if (stem.size() > 3 && stem.ends_with(".md")) stem.erase(stem.size() - 3);
  return stem;
}

inline void ensure_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw error("cannot create output directory " + dir.string() + ": " + ec.message());
}

struct CommonOptions {
  fs::path out_dir = "out";
  std::uint64_t seed = 42;
};

struct AnnotateOptions {
  CommonOptions common;
  fs::path corpus_path;
  CorpusFormat corpus_format = CorpusFormat::jsonl;
  std::vector<std::pair<std::string, fs::path>> gazetteers;  // (label, path)
  fs::path non_entity_path;  // optional
  fs::path stop_words_path;  // optional
  fs::path lemma_exceptions_path;  // optional
  MatchConfig match;
};

inline TokenizerOptions tokenizer_options(const AnnotateOptions& o) {
  TokenizerOptions opts;
  if (!o.stop_words_path.empty()) opts.stop_words = load_stop_words(o.stop_words_path);
  if (!o.lemma_exceptions_path.empty())
    opts.lemma_exceptions = load_lemma_exceptions(o.lemma_exceptions_path);
  return opts;
}

inline int run_annotate(const AnnotateOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const Corpus corpus = load_corpus(o.corpus_path, o.corpus_format);
    std::vector<Gazetteer> gazetteers;
    for (const auto& [label, path] : o.gazetteers)
      gazetteers.push_back(load_gazetteer(path, label));
    if (gazetteers.empty()) throw error("at least one gazetteer is required");
    const NonEntityList nel =
        o.non_entity_path.empty() ? NonEntityList{} : load_non_entity_list(o.non_entity_path);
    const TokenizerOptions opts = tokenizer_options(o);

    BuildReport report;
    const LabeledDataset ds =
        build_labeled_dataset(corpus, gazetteers, nel, o.match, opts, &report);

    ensure_out_dir(o.common.out_dir);
    const fs::path md_path =
        o.common.out_dir / (output_stem(o.corpus_path) + ".md.jsonl");
    save_dataset(md_path, ds, corpus);

    out << "documents: " << report.documents << "\n";
    for (const auto& [label, count] : report.spans_per_label)
      out << "spans " << label << ": " << count << "\n";
    out << "spans total: " << report.total_spans << "\n";
    out << "wrote " << md_path.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

struct SerializeOptions {
  CommonOptions common;
  fs::path md_path;
  fs::path corpus_path;
  std::string format;  // span | bio | bioul | token-tag
};

inline int run_serialize(const SerializeOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const Corpus corpus = load_corpus(o.corpus_path, CorpusFormat::jsonl);
    const LabeledDataset ds = load_dataset(o.md_path);
    ensure_out_dir(o.common.out_dir);
    const std::string stem = output_stem(o.md_path);

    fs::path path;
    if (o.format == "span") {
      path = o.common.out_dir / (stem + ".span.json");
      write_span_format(path, to_span_format(ds, corpus));
    } else if (o.format == "bio") {
      path = o.common.out_dir / (stem + ".bio.txt");
      write_tagged(path, to_bio(ds, corpus));
    } else if (o.format == "bioul") {
      path = o.common.out_dir / (stem + ".bioul.txt");
      write_tagged(path, to_bioul(ds, corpus));
    } else if (o.format == "token-tag") {
      path = o.common.out_dir / (stem + ".token_tag.txt");
      write_tagged(path, to_token_tag(ds, corpus));
    } else {
      throw error("unknown format \"" + o.format + "\" (want span|bio|bioul|token-tag)");
    }
    out << "wrote " << path.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

struct SplitOptions {
  CommonOptions common;
  fs::path md_path;
  fs::path corpus_path;
  std::string mode = "random";  // random | entity-disjoint
  double ratio = 0.3;
  std::string gazetteer_label;  // entity-disjoint only
  fs::path gazetteer_path;
  fs::path non_entity_path;
};

namespace detail {

inline Corpus select_documents(const Corpus& corpus, const std::vector<std::string>& ids) {
  std::unordered_set<std::string> want(ids.begin(), ids.end());
  Corpus out;
  for (const auto& doc : corpus.documents)
    if (want.count(doc.id)) out.documents.push_back(doc);
  return out;
}

inline LabeledDataset select_annotations(const LabeledDataset& ds,
                                         const std::vector<std::string>& ids) {
  LabeledDataset out;
  for (const auto& id : ids) {
    if (const auto it = ds.annotations.find(id); it != ds.annotations.end())
      out.annotations[id] = it->second;
  }
  return out;
}

}  // namespace detail

inline int run_split(const SplitOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const Corpus corpus = load_corpus(o.corpus_path, CorpusFormat::jsonl);
    const LabeledDataset ds = load_dataset(o.md_path);

    SplitResult split;
    Corpus effective = corpus;
    LabeledDataset effective_ds = ds;
    if (o.mode == "random") {
      split = random_split(corpus, o.ratio, o.common.seed);
    } else if (o.mode == "entity-disjoint") {
      if (o.gazetteer_path.empty())
        throw error("entity-disjoint mode requires --gazetteer LABEL=PATH");
      const Gazetteer gaz = load_gazetteer(o.gazetteer_path, o.gazetteer_label);
      const NonEntityList nel =
          o.non_entity_path.empty() ? NonEntityList{} : load_non_entity_list(o.non_entity_path);
      DisjointSplit result =
          entity_disjoint_split(corpus, ds, gaz, nel, o.ratio, o.common.seed);
      split = std::move(result.split);
      effective = std::move(result.corpus);
      effective_ds = std::move(result.dataset);
    } else {
      throw error("unknown split mode \"" + o.mode + "\" (want random|entity-disjoint)");
    }

    ensure_out_dir(o.common.out_dir);
    const std::string stem = output_stem(o.corpus_path);
    save_split(o.common.out_dir / (stem + ".split.json"), split);
    save_corpus(o.common.out_dir / (stem + ".train.jsonl"),
                detail::select_documents(effective, split.train_ids));
    save_corpus(o.common.out_dir / (stem + ".test.jsonl"),
                detail::select_documents(effective, split.test_ids));
    save_dataset(o.common.out_dir / (stem + ".train.md.jsonl"),
                 detail::select_annotations(effective_ds, split.train_ids),
                 detail::select_documents(effective, split.train_ids));
    save_dataset(o.common.out_dir / (stem + ".test.md.jsonl"),
                 detail::select_annotations(effective_ds, split.test_ids),
                 detail::select_documents(effective, split.test_ids));
    out << "train: " << split.train_ids.size() << " documents, test: " << split.test_ids.size()
        << " documents, replacements: " << split.replaced.size() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

struct EvaluateOptions {
  CommonOptions common;
  fs::path gold_path;
  fs::path predictions_path;
};

inline int run_evaluate(const EvaluateOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const LabeledDataset gold = load_dataset(o.gold_path);
    const LabeledDataset predicted = load_dataset(o.predictions_path);
    const EvalReport report = score(gold, predicted);

    ensure_out_dir(o.common.out_dir);
    const std::string stem = output_stem(o.gold_path);
    {
      std::ofstream f(o.common.out_dir / (stem + ".eval.json"), std::ios::binary);
      f << to_json(report).dump(2) << "\n";
    }
    const std::string table = render_eval_table(report);
    {
      std::ofstream f(o.common.out_dir / (stem + ".eval.txt"), std::ios::binary);
      f << table;
    }
    out << table;
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

struct EnrichOptions {
  CommonOptions common;
  fs::path spotlight_path;        // directory of <doc-id>.json files, or one file
  std::string spotlight_endpoint;  // optional; falls back to PHARMTAG_SPOTLIGHT_URL
  double spotlight_confidence = 0.5;
  fs::path md_path;
  fs::path corpus_path;
  kg::EnrichOptions kg;
};

inline int run_enrich(const EnrichOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const Corpus corpus = load_corpus(o.corpus_path, CorpusFormat::jsonl);
    const LabeledDataset ds = load_dataset(o.md_path);
    ensure_out_dir(o.common.out_dir);

    const std::string endpoint = o.spotlight_endpoint.empty()
                                     ? kg::spotlight_endpoint_from_env()
                                     : o.spotlight_endpoint;
    if (o.spotlight_path.empty() && endpoint.empty())
      throw error("enrich needs --spotlight files or a configured endpoint");

    auto spotlight_file = [&](const std::string& id) -> std::optional<fs::path> {
      if (o.spotlight_path.empty()) return std::nullopt;
      if (fs::is_directory(o.spotlight_path)) {
        const fs::path p = o.spotlight_path / (id + ".json");
        return fs::exists(p) ? std::optional(p) : std::nullopt;
      }
      return o.spotlight_path.stem().string() == id ? std::optional(o.spotlight_path)
                                                    : std::nullopt;
    };

    static const std::vector<EntitySpan> kNone;
    std::vector<std::pair<std::string, double>> per_doc;
    for (const auto& doc : corpus.documents) {
      kg::SpotlightIngest ingest;
      if (const auto file = spotlight_file(doc.id)) {
        ingest = kg::ingest_spotlight(*file);
      } else if (!endpoint.empty()) {
        ingest = kg::fetch_spotlight(doc.text, endpoint, o.spotlight_confidence);
      } else {
        continue;  // file mode and no file for this document
      }
      const auto it = ds.annotations.find(doc.id);
      const auto& spans = it == ds.annotations.end() ? kNone : it->second;
      const kg::TripleGraph enriched =
          kg::enrich(ingest.graph, ingest.annotations, spans, doc, o.kg);
      kg::emit_turtle(enriched, o.common.out_dir / (doc.id + ".ttl"));
      if (ingest.graph.size() == 0) {
        err << "warning: document \"" << doc.id
            << "\" has an empty base graph; excluded from the report\n";
        continue;
      }
      per_doc.emplace_back(doc.id, kg::enrichment_percentage(ingest.graph, enriched));
    }
    if (per_doc.empty())
      throw error("no documents with usable entity-linking annotations found");

    const kg::EnrichmentReport report = kg::enrichment_report(per_doc);
    {
      std::ofstream f(o.common.out_dir / "enrichment.json", std::ios::binary);
      f << kg::to_json(report).dump(2) << "\n";
    }
    const std::string text = kg::render_report(report);
    {
      std::ofstream f(o.common.out_dir / "enrichment.txt", std::ios::binary);
      f << text;
    }
    out << text;
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

struct ExportOptions {
  CommonOptions common;
  fs::path md_path;
  fs::path corpus_path;
  std::string doc_id;
  fs::path spotlight_path;  // optional, adds graph statistics
};

inline int run_export(const ExportOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const Corpus corpus = load_corpus(o.corpus_path, CorpusFormat::jsonl);
    const LabeledDataset ds = load_dataset(o.md_path);
    const Document* doc = corpus.find(o.doc_id);
    if (!doc) throw error("unknown document id \"" + o.doc_id + "\"");

    static const std::vector<EntitySpan> kNone;
    const auto it = ds.annotations.find(o.doc_id);
    const auto& spans = it == ds.annotations.end() ? kNone : it->second;

    nlohmann::ordered_json j;
    j["id"] = doc->id;
    j["text"] = doc->text;
    j["entities"] = nlohmann::ordered_json::array();
    for (const auto& s : spans) {
      j["entities"].push_back({{"start", s.start},
                               {"end", s.end},
                               {"surface", s.surface},
                               {"label", s.label},
                               {"score", s.score},
                               {"source", s.source}});
    }
    if (!o.spotlight_path.empty()) {
      const kg::SpotlightIngest ingest = kg::ingest_spotlight(o.spotlight_path);
      const kg::TripleGraph enriched =
          kg::enrich(ingest.graph, ingest.annotations, spans, *doc);
      nlohmann::ordered_json g;
      g["base_triples"] = ingest.graph.size();
      g["enriched_triples"] = enriched.size();
      if (ingest.graph.size() > 0)
        g["enrichment_percentage"] = kg::enrichment_percentage(ingest.graph, enriched);
      else
        g["enrichment_percentage"] = nullptr;
      j["graph"] = std::move(g);
    }
    j["tool_version"] = kVersion;

    ensure_out_dir(o.common.out_dir);
    const fs::path path = o.common.out_dir / (o.doc_id + ".export.json");
    {
      std::ofstream f(path, std::ios::binary);
      if (!f) throw error("cannot write file: " + path.string());
      f << j.dump(2) << "\n";
    }
    out << "wrote " << path.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pharmtag::cli
