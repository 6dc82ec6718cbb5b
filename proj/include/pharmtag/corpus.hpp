#pragma once

// Corpus ingestion: documents, gazetteers and the non-entity stop list.
// Everything loaded here is immutable after construction and safe for
// concurrent read-only access.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "pharmtag/error.hpp"
#include "pharmtag/unicode.hpp"

namespace pharmtag {

struct Document {
  std::string id;
  std::string text;
  std::optional<std::string> source;
};

struct Corpus {
  std::vector<Document> documents;

  const Document* find(std::string_view id) const {
    for (const auto& d : documents)
      if (d.id == id) return &d;
    return nullptr;
  }
};

enum class CorpusFormat { jsonl, plaintext_dir };

// Gazetteer: the closed set of known surface names for one entity class.
struct Gazetteer {
  std::string label;
  std::set<std::string> entries;  // sorted; iteration order is part of the contract
};

inline bool valid_label(std::string_view label) {
  if (label.empty() || label[0] < 'A' || label[0] > 'Z') return false;
  return std::all_of(label.begin(), label.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

// Countries, legal entity forms and domain keywords that never belong to an
// entity core name. Membership is case-insensitive and ignores trailing
// periods ("Ltd." == "ltd").
struct NonEntityList {
  std::unordered_set<std::string> countries;
  std::unordered_set<std::string> legal_forms;
  std::unordered_set<std::string> domain_keywords;

  static std::string key(std::string_view term) {
    std::string k = fold_ascii(trim_view(term));
    while (!k.empty() && k.back() == '.') k.pop_back();
    return k;
  }

  bool contains(std::string_view term) const {
    const std::string k = key(term);
    if (k.empty()) return false;
    return countries.count(k) || legal_forms.count(k) || domain_keywords.count(k);
  }

  bool empty() const {
    return countries.empty() && legal_forms.empty() && domain_keywords.empty();
  }
};

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open file: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace detail

inline Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  Corpus corpus;
  std::unordered_set<std::string> seen;

  auto add = [&](Document doc, const std::string& where) {
    if (doc.id.empty()) throw error(where + ": empty document id");
    if (doc.text.empty()) throw error(where + ": document \"" + doc.id + "\" has empty text");
    if (!seen.insert(doc.id).second)
      throw error(where + ": duplicate document id \"" + doc.id + "\"");
    corpus.documents.push_back(std::move(doc));
  };

  if (format == CorpusFormat::jsonl) {
    const auto lines = detail::read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (trim_view(lines[i]).empty()) continue;
      const std::string where = path.filename().string() + " line " + std::to_string(i + 1);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(lines[i]);
      } catch (const nlohmann::json::parse_error& e) {
        throw error(where + ": malformed JSON: " + e.what());
      }
      if (!j.is_object() || !j.contains("id") || !j.contains("text"))
        throw error(where + ": expected object with \"id\" and \"text\" fields");
      Document doc;
      doc.id = j.at("id").get<std::string>();
      doc.text = j.at("text").get<std::string>();
      if (j.contains("source") && !j.at("source").is_null())
        doc.source = j.at("source").get<std::string>();
      add(std::move(doc), where);
    }
  } else {
    if (!std::filesystem::is_directory(path))
      throw error("not a directory: " + path.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt")
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());  // ids in lexicographic order
    for (const auto& file : files) {
      Document doc;
      doc.id = file.stem().string();
      doc.text = detail::read_file(file);
      add(std::move(doc), file.filename().string());
    }
  }
  return corpus;
}

inline void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot write file: " + path.string());
  for (const auto& doc : corpus.documents) {
    nlohmann::ordered_json j;
    j["id"] = doc.id;
    j["text"] = doc.text;
    if (doc.source) j["source"] = *doc.source;
    out << j.dump() << "\n";
  }
}

inline Gazetteer load_gazetteer(const std::filesystem::path& path, const std::string& label) {
  if (!valid_label(label))
    throw error("invalid gazetteer label \"" + label + "\" (want [A-Z][A-Z0-9_]*)");
  Gazetteer gaz;
  gaz.label = label;
  for (const auto& line : detail::read_lines(path)) {
    const auto entry = trim_view(line);
    if (entry.empty()) continue;
    gaz.entries.insert(std::string(entry));
  }
  if (gaz.entries.empty())
    throw error("gazetteer " + path.string() + ": zero usable entries");
  return gaz;
}

inline NonEntityList load_non_entity_list(const std::filesystem::path& path) {
  NonEntityList nel;
  std::unordered_set<std::string>* section = nullptr;
  for (const auto& raw : detail::read_lines(path)) {
    const auto line = trim_view(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      const auto name = line.substr(1, line.size() - 2);
      if (name == "countries") section = &nel.countries;
      else if (name == "legal_forms") section = &nel.legal_forms;
      else if (name == "domain_keywords") section = &nel.domain_keywords;
      else throw error(path.string() + ": unknown section header [" + std::string(name) + "]");
      continue;
    }
    if (!section)
      throw error(path.string() + ": term \"" + std::string(line) + "\" before any section header");
    section->insert(NonEntityList::key(line));
  }
  if (nel.empty()) throw error(path.string() + ": empty non-entity list");
  return nel;
}

}  // namespace pharmtag
