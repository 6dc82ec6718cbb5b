// pharmtag command-line front end. Subcommands wire the library into the
// full pipeline: annotate a corpus against gazetteers, serialize the labeled
// dataset for downstream trainers, produce evaluation splits, score
// predictions, enrich entity-linking graphs and export per-document
// analyses. Flags override values from the optional --config file.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pharmtag/commands.hpp"
#include "pharmtag/version.hpp"

namespace {

// "LABEL=path/to/file" -> (LABEL, path)
std::pair<std::string, std::filesystem::path> parse_gazetteer_spec(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
    throw CLI::ValidationError("--gazetteer", "expected LABEL=PATH, got \"" + spec + "\"");
  return {spec.substr(0, eq), spec.substr(eq + 1)};
}

}  // namespace

int main(int argc, char** argv) {
  using namespace pharmtag;

  CLI::App app{"pharmtag: gazetteer-driven NER dataset toolkit"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML-like key=value config file; flags take precedence");
  app.fallthrough();
  app.require_subcommand(1);

  cli::CommonOptions common;
  app.add_option("--out", common.out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", common.seed, "seed for all randomized operations")
      ->capture_default_str();

  // annotate
  cli::AnnotateOptions annotate_opts;
  std::vector<std::string> gazetteer_specs;
  std::string corpus_format = "jsonl";
  auto* annotate = app.add_subcommand("annotate", "label a corpus against gazetteers");
  annotate->add_option("--corpus", annotate_opts.corpus_path, "corpus file or directory")
      ->required();
  annotate->add_option("--format", corpus_format, "corpus format")
      ->check(CLI::IsMember({"jsonl", "dir"}))
      ->capture_default_str();
  annotate->add_option("--gazetteer", gazetteer_specs, "gazetteer as LABEL=PATH (repeatable)")
      ->required();
  annotate->add_option("--non-entity-list", annotate_opts.non_entity_path,
                       "sectioned non-entity list file");
  annotate->add_option("--stop-words", annotate_opts.stop_words_path,
                       "stop word file (replaces the built-in list)");
  annotate->add_option("--lemma-exceptions", annotate_opts.lemma_exceptions_path,
                       "TSV surface<TAB>lemma exceptions");
  annotate->add_option("--threshold", annotate_opts.match.threshold, "similarity threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  annotate->add_option("--max-gap", annotate_opts.match.max_gap_tokens,
                       "max connector tokens bridged when concatenating spans")
      ->capture_default_str();
  annotate->add_flag("--no-neighbor-extension",
                     [&](std::int64_t) { annotate_opts.match.enable_neighbor_extension = false; },
                     "disable multi-token neighbor extension");

  // serialize
  cli::SerializeOptions serialize_opts;
  auto* serialize = app.add_subcommand("serialize", "write a training-data format");
  serialize->add_option("--md", serialize_opts.md_path, "labeled dataset (MD JSONL)")->required();
  serialize->add_option("--corpus", serialize_opts.corpus_path, "corpus JSONL")->required();
  serialize->add_option("--format", serialize_opts.format, "output format")
      ->check(CLI::IsMember({"span", "bio", "bioul", "token-tag"}))
      ->required();

  // split
  cli::SplitOptions split_opts;
  std::string split_gazetteer_spec;
  auto* split = app.add_subcommand("split", "produce train/test evaluation splits");
  split->add_option("--md", split_opts.md_path, "labeled dataset (MD JSONL)")->required();
  split->add_option("--corpus", split_opts.corpus_path, "corpus JSONL")->required();
  split->add_option("--mode", split_opts.mode, "split mode")
      ->check(CLI::IsMember({"random", "entity-disjoint"}))
      ->capture_default_str();
  split->add_option("--ratio", split_opts.ratio, "test portion ratio")
      ->check(CLI::Range(0.0, 1.0).description("FLOAT in (0,1)"))
      ->capture_default_str();
  split->add_option("--gazetteer", split_gazetteer_spec,
                    "gazetteer as LABEL=PATH (entity-disjoint mode)");
  split->add_option("--non-entity-list", split_opts.non_entity_path,
                    "sectioned non-entity list file");

  // evaluate
  cli::EvaluateOptions evaluate_opts;
  auto* evaluate = app.add_subcommand("evaluate", "score predictions against gold annotations");
  evaluate->add_option("--gold", evaluate_opts.gold_path, "gold dataset (MD JSONL)")->required();
  evaluate->add_option("--pred", evaluate_opts.predictions_path, "predicted dataset (MD JSONL)")
      ->required();

  // enrich
  cli::EnrichOptions enrich_opts;
  auto* enrich = app.add_subcommand("enrich", "enrich entity-linking graphs with type triples");
  enrich->add_option("--spotlight", enrich_opts.spotlight_path,
                     "directory of <doc-id>.json annotation files, or a single file");
  enrich->add_option("--spotlight-endpoint", enrich_opts.spotlight_endpoint,
                     "annotate endpoint URL for documents without a file "
                     "(default: $PHARMTAG_SPOTLIGHT_URL)");
  enrich->add_option("--spotlight-confidence", enrich_opts.spotlight_confidence,
                     "confidence passed to the endpoint")
      ->capture_default_str();
  enrich->add_option("--md", enrich_opts.md_path, "labeled dataset (MD JSONL)")->required();
  enrich->add_option("--corpus", enrich_opts.corpus_path, "corpus JSONL")->required();
  enrich->add_option("--local-namespace", enrich_opts.kg.local_namespace,
                     "namespace for minted entity IRIs")
      ->capture_default_str();

  // export
  cli::ExportOptions export_opts;
  auto* exp = app.add_subcommand("export", "export one document's analysis as JSON");
  exp->add_option("--md", export_opts.md_path, "labeled dataset (MD JSONL)")->required();
  exp->add_option("--corpus", export_opts.corpus_path, "corpus JSONL")->required();
  exp->add_option("--doc", export_opts.doc_id, "document id")->required();
  exp->add_option("--spotlight", export_opts.spotlight_path,
                  "optional annotation file for graph statistics");

  CLI11_PARSE(app, argc, argv);

  if (annotate->parsed()) {
    annotate_opts.common = common;
    annotate_opts.corpus_format =
        corpus_format == "dir" ? CorpusFormat::plaintext_dir : CorpusFormat::jsonl;
    for (const auto& spec : gazetteer_specs)
      annotate_opts.gazetteers.push_back(parse_gazetteer_spec(spec));
    return cli::run_annotate(annotate_opts, std::cout, std::cerr);
  }
  if (serialize->parsed()) {
    serialize_opts.common = common;
    return cli::run_serialize(serialize_opts, std::cout, std::cerr);
  }
  if (split->parsed()) {
    split_opts.common = common;
    if (!split_gazetteer_spec.empty()) {
      auto [label, path] = parse_gazetteer_spec(split_gazetteer_spec);
      split_opts.gazetteer_label = label;
      split_opts.gazetteer_path = path;
    }
    return cli::run_split(split_opts, std::cout, std::cerr);
  }
  if (evaluate->parsed()) {
    evaluate_opts.common = common;
    return cli::run_evaluate(evaluate_opts, std::cout, std::cerr);
  }
  if (enrich->parsed()) {
    enrich_opts.common = common;
    return cli::run_enrich(enrich_opts, std::cout, std::cerr);
  }
  if (exp->parsed()) {
    export_opts.common = common;
    return cli::run_export(export_opts, std::cout, std::cerr);
  }
  return 1;
}
