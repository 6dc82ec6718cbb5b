#pragma once

// RDF knowledge-graph enrichment: ingest entity-linking annotations in the
// Spotlight JSON shape, add type triples for recognized PH_ORG and DRUG
// spans, emit deterministic Turtle, and compute enrichment statistics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "pharmtag/annotate.hpp"
#include "pharmtag/corpus.hpp"
#include "pharmtag/error.hpp"
#include "pharmtag/unicode.hpp"

namespace pharmtag::kg {

inline constexpr const char* kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr const char* kRdfsLabel = "http://www.w3.org/2000/01/rdf-schema#label";
inline constexpr const char* kSchemaMedicalOrganization = "http://schema.org/MedicalOrganization";
inline constexpr const char* kSchemaDrug = "http://schema.org/Drug";
inline constexpr const char* kDbpediaDrug = "http://dbpedia.org/ontology/Drug";

enum class Provenance { base, enriched };

struct RdfObject {
  enum class Kind { iri, literal } kind = Kind::iri;
  std::string value;
  std::string lang;      // literal language tag, optional
  std::string datatype;  // literal datatype IRI, optional

  friend auto operator<=>(const RdfObject&, const RdfObject&) = default;

  static RdfObject iri(std::string v) { return {Kind::iri, std::move(v), {}, {}}; }
  static RdfObject literal(std::string v, std::string lang = {}, std::string datatype = {}) {
    return {Kind::literal, std::move(v), std::move(lang), std::move(datatype)};
  }
};

struct Triple {
  std::string subject;  // absolute IRI or "_:"-prefixed blank node
  std::string predicate;
  RdfObject object;
  Provenance provenance = Provenance::base;
};

// Orders and deduplicates on (s, p, o) only; provenance is bookkeeping.
struct SpoLess {
  bool operator()(const Triple& a, const Triple& b) const {
    return std::tie(a.subject, a.predicate, a.object) <
           std::tie(b.subject, b.predicate, b.object);
  }
};

inline std::map<std::string, std::string> default_namespaces() {
  return {
      {"schema", "http://schema.org/"},
      {"dbpedia", "http://dbpedia.org/ontology/"},
      {"rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"},
      {"rdfs", "http://www.w3.org/2000/01/rdf-schema#"},
      {"local", "http://example.org/entity/"},
  };
}

struct TripleGraph {
  std::set<Triple, SpoLess> triples;
  std::map<std::string, std::string> namespaces = default_namespaces();

  std::size_t size() const { return triples.size(); }

  // Set semantics: an (s, p, o) already present is not re-added, whatever
  // its provenance.
  bool insert(Triple t) { return triples.insert(std::move(t)).second; }

  bool contains(const Triple& t) const { return triples.count(t) > 0; }
};

struct LinkedAnnotation {
  std::string surface;
  std::size_t offset = 0;  // code-point index into the document text
  std::string uri;
  std::vector<std::string> types;
  double confidence = 0.0;
};

namespace detail {

inline bool is_absolute_iri(std::string_view s) {
  return s.find("://") != std::string_view::npos || s.rfind("urn:", 0) == 0;
}

// Expands "Schema:Organization"-style curies (prefix match is
// case-insensitive because Spotlight capitalizes its prefixes). Returns an
// empty string when the prefix is unknown.
inline std::string expand_curie(std::string_view curie,
                                const std::map<std::string, std::string>& prefixes) {
  if (is_absolute_iri(curie)) return std::string(curie);
  const auto colon = curie.find(':');
  if (colon == std::string_view::npos) return {};
  const std::string prefix = fold_ascii(curie.substr(0, colon));
  const auto it = prefixes.find(prefix);
  if (it == prefixes.end()) return {};
  return it->second + std::string(curie.substr(colon + 1));
}

inline double json_number(const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return std::stod(v.get<std::string>());
    } catch (...) {
      throw error("not a number: \"" + v.get<std::string>() + "\"");
    }
  }
  throw error("expected a number");
}

}  // namespace detail

struct SpotlightIngest {
  std::vector<LinkedAnnotation> annotations;
  TripleGraph graph;
};

// Parses an annotate-response document: a top-level "Resources" array of
// {@URI, @surfaceForm, @offset, @types, @similarityScore}. Each resource
// yields one annotation plus base triples: one rdf:type per listed type and
// an rdfs:label for the surface form. Types with prefixes missing from the
// expansion table are dropped (they cannot become absolute IRIs).
inline SpotlightIngest parse_spotlight(const nlohmann::json& j, const std::string& path,
                                       const std::map<std::string, std::string>& prefixes =
                                           default_namespaces()) {
  if (!j.is_object() || !j.contains("Resources"))
    throw error(path + ": missing \"Resources\" array");

  SpotlightIngest out;
  out.graph.namespaces = prefixes;
  for (const auto& res : j.at("Resources")) {
    LinkedAnnotation ann;
    ann.uri = res.value("@URI", "");
    ann.surface = res.value("@surfaceForm", "");
    if (ann.uri.empty() || ann.surface.empty())
      throw error(path + ": resource missing @URI or @surfaceForm");
    double offset = 0;
    try {
      offset = detail::json_number(res.at("@offset"));
    } catch (const std::exception& e) {
      throw error(path + ": malformed @offset: " + e.what());
    }
    if (offset < 0 || offset != std::floor(offset))
      throw error(path + ": malformed @offset for \"" + ann.surface + "\"");
    ann.offset = static_cast<std::size_t>(offset);
    if (res.contains("@similarityScore"))
      ann.confidence = detail::json_number(res.at("@similarityScore"));

    const std::string types = res.value("@types", "");
    std::size_t pos = 0;
    while (pos <= types.size()) {
      auto comma = types.find(',', pos);
      if (comma == std::string::npos) comma = types.size();
      const auto piece = trim_view(std::string_view(types).substr(pos, comma - pos));
      if (!piece.empty()) {
        const std::string iri = detail::expand_curie(piece, prefixes);
        if (!iri.empty()) ann.types.push_back(iri);
      }
      pos = comma + 1;
    }

    for (const auto& type : ann.types)
      out.graph.insert({ann.uri, kRdfType, RdfObject::iri(type), Provenance::base});
    out.graph.insert({ann.uri, kRdfsLabel, RdfObject::literal(ann.surface), Provenance::base});
    out.annotations.push_back(std::move(ann));
  }
  return out;
}

inline SpotlightIngest ingest_spotlight(const std::filesystem::path& path,
                                        const std::map<std::string, std::string>& prefixes =
                                            default_namespaces()) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(pharmtag::detail::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw error(path.string() + ": malformed JSON: " + e.what());
  }
  return parse_spotlight(j, path.string(), prefixes);
}

struct EnrichOptions {
  std::string local_namespace = "http://example.org/entity/";
};

// Lowercased, hyphenated slug for minting local IRIs.
inline std::string slugify(std::string_view surface) {
  std::string slug;
  bool pending_dash = false;
  for (const char ch : fold_ascii(surface)) {
    const bool alnum = (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9');
    if (alnum) {
      if (pending_dash && !slug.empty()) slug += '-';
      pending_dash = false;
      slug += ch;
    } else {
      pending_dash = true;
    }
  }
  return slug.empty() ? "entity" : slug;
}

// Adds type triples for recognized spans: schema:MedicalOrganization for
// PH_ORG, schema:Drug + dbpedia:Drug for DRUG. The entity IRI is the URI of
// the Spotlight annotation with the largest character overlap (ties by
// confidence, then offset); spans with no overlapping annotation mint a
// local IRI and get a label triple.
inline TripleGraph enrich(const TripleGraph& base, const std::vector<LinkedAnnotation>& annotations,
                          const std::vector<EntitySpan>& spans, const Document& doc,
                          const EnrichOptions& options = {}) {
  (void)doc;
  TripleGraph out = base;
  for (const auto& span : spans) {
    const bool is_org = span.label == "PH_ORG";
    const bool is_drug = span.label == "DRUG";
    if (!is_org && !is_drug) continue;

    const LinkedAnnotation* linked = nullptr;
    std::size_t best_overlap = 0;
    for (const auto& ann : annotations) {
      const std::size_t a0 = ann.offset;
      const std::size_t a1 = ann.offset + cp_length(ann.surface);
      const std::size_t lo = std::max(a0, span.start);
      const std::size_t hi = std::min(a1, span.end);
      if (lo >= hi) continue;
      const std::size_t overlap = hi - lo;
      const bool better = !linked || overlap > best_overlap ||
                          (overlap == best_overlap &&
                           (ann.confidence > linked->confidence ||
                            (ann.confidence == linked->confidence && a0 < linked->offset)));
      if (better) { linked = &ann; best_overlap = overlap; }
    }

    std::string iri;
    if (linked) {
      iri = linked->uri;
    } else {
      iri = options.local_namespace + slugify(span.surface);
      out.insert({iri, kRdfsLabel, RdfObject::literal(span.surface), Provenance::enriched});
    }
    if (is_org) {
      out.insert({iri, kRdfType, RdfObject::iri(kSchemaMedicalOrganization),
                  Provenance::enriched});
    } else {
      out.insert({iri, kRdfType, RdfObject::iri(kSchemaDrug), Provenance::enriched});
      out.insert({iri, kRdfType, RdfObject::iri(kDbpediaDrug), Provenance::enriched});
    }
  }
  return out;
}

// 100 * (|enriched| - |base|) / |base|.
inline double enrichment_percentage(const TripleGraph& base, const TripleGraph& enriched) {
  if (base.size() == 0) throw error("enrichment percentage undefined on an empty base graph");
  return 100.0 * static_cast<double>(enriched.size() - base.size()) /
         static_cast<double>(base.size());
}

namespace detail {

inline std::string escape_literal(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (const char ch : s) {
    switch (ch) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04X", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out;
}

inline bool pn_local_safe(std::string_view local) {
  if (local.empty()) return false;
  return std::all_of(local.begin(), local.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-';
  });
}

// Longest-prefix curie shortening; falls back to <iri> form.
inline std::string term_iri(const std::string& iri,
                            const std::map<std::string, std::string>& namespaces) {
  if (iri.rfind("_:", 0) == 0) return iri;
  const std::string* best_prefix = nullptr;
  const std::string* best_ns = nullptr;
  for (const auto& [prefix, ns] : namespaces) {
    if (iri.size() > ns.size() && iri.compare(0, ns.size(), ns) == 0) {
      if (!best_ns || ns.size() > best_ns->size()) { best_prefix = &prefix; best_ns = &ns; }
    }
  }
  if (best_ns && pn_local_safe(std::string_view(iri).substr(best_ns->size())))
    return *best_prefix + ":" + iri.substr(best_ns->size());
  return "<" + iri + ">";
}

inline std::string term_object(const RdfObject& o,
                               const std::map<std::string, std::string>& namespaces) {
  if (o.kind == RdfObject::Kind::iri) return term_iri(o.value, namespaces);
  std::string out = "\"" + escape_literal(o.value) + "\"";
  if (!o.lang.empty()) out += "@" + o.lang;
  else if (!o.datatype.empty()) out += "^^" + term_iri(o.datatype, namespaces);
  return out;
}

}  // namespace detail

// Deterministic Turtle: prefix block, subject groups with ';' predicate
// continuation and ',' object lists, everything in lexicographic order.
inline std::string to_turtle(const TripleGraph& graph) {
  for (const auto& t : graph.triples) {
    if (!detail::is_absolute_iri(t.subject) && t.subject.rfind("_:", 0) != 0)
      throw error("not an absolute IRI or blank node: " + t.subject);
    if (!detail::is_absolute_iri(t.predicate))
      throw error("predicate is not an absolute IRI: " + t.predicate);
  }
  std::string out;
  for (const auto& [prefix, ns] : graph.namespaces)
    out += "@prefix " + prefix + ": <" + ns + "> .\n";

  const std::string* cur_subject = nullptr;
  const std::string* cur_predicate = nullptr;
  for (const auto& t : graph.triples) {
    if (!cur_subject || *cur_subject != t.subject) {
      if (cur_subject) out += " .\n";
      out += "\n" + detail::term_iri(t.subject, graph.namespaces);
      cur_subject = &t.subject;
      cur_predicate = nullptr;
    }
    const std::string pred =
        t.predicate == kRdfType ? "a" : detail::term_iri(t.predicate, graph.namespaces);
    if (!cur_predicate || *cur_predicate != t.predicate) {
      if (cur_predicate) out += " ;";
      out += (cur_predicate ? "\n    " : " ") + pred + " ";
      cur_predicate = &t.predicate;
    } else {
      out += ", ";
    }
    out += detail::term_object(t.object, graph.namespaces);
  }
  if (cur_subject) out += " .\n";
  return out;
}

inline void emit_turtle(const TripleGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot write file: " + path.string());
  out << to_turtle(graph);
}

struct EnrichmentReport {
  struct Bucket {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
  };

  std::vector<std::pair<std::string, double>> per_doc;
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;  // population
  std::vector<Bucket> histogram;  // non-empty buckets only, ascending
};

inline EnrichmentReport enrichment_report(
    const std::vector<std::pair<std::string, double>>& per_doc, double bucket_width = 10.0) {
  if (per_doc.empty()) throw error("enrichment report requires at least one document");
  EnrichmentReport report;
  report.per_doc = per_doc;

  std::vector<double> values;
  values.reserve(per_doc.size());
  double sum = 0.0;
  for (const auto& [id, v] : per_doc) {
    if (v < 0.0) throw error("negative enrichment percentage for document \"" + id + "\"");
    values.push_back(v);
    sum += v;
  }
  report.mean = sum / static_cast<double>(values.size());

  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  report.median = (n % 2) ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;

  double var = 0.0;
  for (const double v : values) var += (v - report.mean) * (v - report.mean);
  report.stddev = std::sqrt(var / static_cast<double>(n));

  std::map<std::size_t, std::size_t> buckets;
  for (const double v : values)
    ++buckets[static_cast<std::size_t>(std::floor(v / bucket_width))];
  for (const auto& [idx, count] : buckets) {
    report.histogram.push_back(
        {static_cast<double>(idx) * bucket_width, static_cast<double>(idx + 1) * bucket_width,
         count});
  }
  return report;
}

inline nlohmann::ordered_json to_json(const EnrichmentReport& r) {
  nlohmann::ordered_json j;
  j["per_doc"] = nlohmann::ordered_json::array();
  for (const auto& [id, v] : r.per_doc) j["per_doc"].push_back({{"id", id}, {"percentage", v}});
  j["mean"] = r.mean;
  j["median"] = r.median;
  j["stddev"] = r.stddev;
  j["histogram"] = nlohmann::ordered_json::array();
  for (const auto& b : r.histogram)
    j["histogram"].push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
  return j;
}

inline std::string render_report(const EnrichmentReport& r) {
  char line[160];
  std::string out = "enrichment distribution\n";
  for (const auto& b : r.histogram) {
    std::snprintf(line, sizeof(line), "[%6.1f, %6.1f)  %6zu  ", b.lo, b.hi, b.count);
    out += line;
    out.append(std::min<std::size_t>(b.count, 60), '#');
    out += '\n';
  }
  std::snprintf(line, sizeof(line), "documents %zu  mean %.2f  median %.2f  stddev %.2f\n",
                r.per_doc.size(), r.mean, r.median, r.stddev);
  out += line;
  return out;
}

}  // namespace pharmtag::kg
