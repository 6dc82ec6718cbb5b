#pragma once

// Shared fixtures: a news-style article whose PH_ORG mentions exercise the
// whole matching pipeline (repeats, multi-token "J & J"), a non-entity list,
// and a synthetic 50-document corpus over 20 invented entity names for the
// split and end-to-end tests.

#include <string>
#include <vector>

#include "pharmtag/annotate.hpp"
#include "pharmtag/corpus.hpp"

namespace testsupport {

inline std::string article_text() {
  return "Sanofi announced a new partnership this week. "
         "Analysts said GlaxoSmithKline remained cautious about the deal. "
         "Meanwhile Regeneron posted strong quarterly results, and later Regeneron shares "
         "climbed again. "
         "Gilead confirmed that Sanofi had approached it about licensing. "
         "The agreement also involves J & J according to people familiar with the matter.";
}

inline pharmtag::Document article_document() {
  return {"news1", article_text(), std::nullopt};
}

inline pharmtag::Gazetteer ph_org_gazetteer() {
  pharmtag::Gazetteer gaz;
  gaz.label = "PH_ORG";
  gaz.entries = {"Sanofi", "GlaxoSmithKline", "Regeneron", "Gilead", "J & J"};
  return gaz;
}

inline std::string non_entity_file_content() {
  return "[countries]\n"
         "Spain\nFrance\nGermany\nSwitzerland\nDenmark\nIndia\nJapan\n"
         "\n"
         "[legal_forms]\n"
         "Ltd\nInc\nGmbH\nCorp\nAG\nSA\nPLC\nLLC\nCo\n"
         "\n"
         "[domain_keywords]\n"
         "Pharmaceuticals\nPharma\nMedical\nBiotech\nLaboratories\nTherapeutics\nHealth\n";
}

inline pharmtag::NonEntityList non_entity_list() {
  pharmtag::NonEntityList nel;
  for (const char* c : {"spain", "france", "germany", "switzerland", "denmark", "india", "japan"})
    nel.countries.insert(c);
  for (const char* f : {"ltd", "inc", "gmbh", "corp", "ag", "sa", "plc", "llc", "co"})
    nel.legal_forms.insert(f);
  for (const char* k : {"pharmaceuticals", "pharma", "medical", "biotech", "laboratories",
                        "therapeutics", "health"})
    nel.domain_keywords.insert(k);
  return nel;
}

inline const std::vector<std::string>& synthetic_entities() {
  static const std::vector<std::string> entities = {
      "Zorvantra", "Melixor",  "Qantrel",  "Bioverta", "Nuvexis",
      "Draxium",   "Celorin",  "Vantrix",  "Omnipharm", "Kestrelon",
      "Altherix",  "Pyranol",  "Getrovax", "Sileron",  "Marvexa",
      "Tandrel",   "Ublixane", "Wrenovia", "Xylocort", "Feronate",
  };
  return entities;
}

// 50 documents, each mentioning one to three of the 20 entities in separate
// sentences. Several entities recur across many documents so the
// entity-disjoint split has to trim and rewrite.
inline pharmtag::Corpus synthetic_corpus(std::size_t n_docs = 50) {
  const auto& entities = synthetic_entities();
  pharmtag::Corpus corpus;
  for (std::size_t i = 0; i < n_docs; ++i) {
    std::string text;
    text += "The " + entities[i % entities.size()] +
            " group reported new figures on Monday morning. ";
    if (i % 2 == 0) {
      text += "Regulators reviewed the filing from " +
              entities[(i * 7 + 3) % entities.size()] + " without further delay. ";
    }
    if (i % 3 == 0) {
      text += "Markets watched " + entities[(i * 3 + 11) % entities.size()] +
              " closely during the quarter. ";
    }
    text += "Nothing else of note happened this cycle.";
    char id[32];
    std::snprintf(id, sizeof(id), "doc%02zu", i);
    corpus.documents.push_back({id, text, std::nullopt});
  }
  return corpus;
}

inline pharmtag::Gazetteer synthetic_gazetteer() {
  pharmtag::Gazetteer gaz;
  gaz.label = "PH_ORG";
  for (const auto& e : synthetic_entities()) gaz.entries.insert(e);
  return gaz;
}

// Spotlight-style annotation JSON covering the first gazetteer mention in
// the document, plus one unrelated resource so base graphs are never tiny.
inline std::string spotlight_json_for(const pharmtag::Document& doc,
                                      const std::vector<pharmtag::EntitySpan>& spans) {
  nlohmann::ordered_json j;
  j["@text"] = doc.text;
  j["Resources"] = nlohmann::ordered_json::array();
  if (!spans.empty()) {
    const auto& s = spans.front();
    j["Resources"].push_back({{"@URI", "http://dbpedia.org/resource/" + s.surface},
                              {"@surfaceForm", s.surface},
                              {"@offset", std::to_string(s.start)},
                              {"@types", "Schema:Organization,DBpedia:Company"},
                              {"@similarityScore", "0.9971"}});
  }
  const auto monday = doc.text.find("Monday");  // fixtures are ASCII: byte == code point
  j["Resources"].push_back({{"@URI", "http://dbpedia.org/resource/Monday"},
                            {"@surfaceForm", "Monday"},
                            {"@offset", std::to_string(monday == std::string::npos ? 0 : monday)},
                            {"@types", ""},
                            {"@similarityScore", "0.5712"}});
  return j.dump(2);
}

}  // namespace testsupport
