#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "pharmtag/tokenize.hpp"
#include "support/fixtures.hpp"
#include "support/tempdir.hpp"

using namespace pharmtag;
using testsupport::TempDir;

namespace {

// surface/offset fidelity plus the no-overlap and "gaps are whitespace"
// conditions; together these imply the original text can be reconstructed.
void check_token_invariants(const std::string& text, const std::vector<Token>& tokens) {
  const Utf8View view(text);
  std::vector<bool> covered(view.size(), false);
  std::size_t prev_end = 0;
  for (const auto& t : tokens) {
    REQUIRE(t.start < t.end);
    REQUIRE(t.end <= view.size());
    CHECK(view.substr(t.start, t.end) == t.text);
    CHECK(t.start >= prev_end);
    prev_end = t.end;
    for (std::size_t k = t.start; k < t.end; ++k) covered[k] = true;
  }
  for (std::size_t k = 0; k < view.size(); ++k) {
    if (!covered[k]) CHECK(is_space_cp(view.cps[k]));
  }
}

std::string encode_cp(CodePoint cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

}  // namespace

TEST_CASE("tokenize: terminal punctuation splits off with exact offsets") {
  const Document doc{"d", "Sanofi wins.", std::nullopt};
  const auto tokens = tokenize(doc);
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[0].text == "Sanofi");
  CHECK(tokens[0].start == 0);
  CHECK(tokens[0].end == 6);
  CHECK(tokens[1].text == "wins");
  CHECK(tokens[1].start == 7);
  CHECK(tokens[1].end == 11);
  CHECK(tokens[2].text == ".");
  CHECK(tokens[2].start == 11);
  CHECK(tokens[2].end == 12);
  CHECK(tokens[2].is_punct);
  CHECK_FALSE(tokens[0].is_punct);
}

TEST_CASE("tokenize: whitespace-only text yields no tokens") {
  CHECK(tokenize_text("").empty());
  CHECK(tokenize_text("   \t\n ").empty());
}

TEST_CASE("tokenize: ampersand stands alone") {
  const auto tokens = tokenize_text("J & J");
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[0].text == "J");
  CHECK(tokens[0].start == 0);
  CHECK(tokens[0].end == 1);
  CHECK(tokens[1].text == "&");
  CHECK(tokens[1].start == 2);
  CHECK(tokens[1].end == 3);
  CHECK(tokens[1].is_punct);
  CHECK(tokens[2].text == "J");
  CHECK(tokens[2].start == 4);
  CHECK(tokens[2].end == 5);
}

TEST_CASE("tokenize: trailing and leading punctuation peel off, inner stays") {
  const auto tokens = tokenize_text("(GmbH, U.S. deal)");
  std::vector<std::string> surfaces;
  for (const auto& t : tokens) surfaces.push_back(t.text);
  CHECK(surfaces == std::vector<std::string>{"(", "GmbH", ",", "U.S", ".", "deal", ")"});
}

TEST_CASE("tokenize: stop words are flagged, never removed") {
  const auto tokens = tokenize_text("the deal and it");
  REQUIRE(tokens.size() == 4);
  CHECK(tokens[0].is_stop);
  CHECK_FALSE(tokens[1].is_stop);
  CHECK(tokens[2].is_stop);
  CHECK(tokens[3].is_stop);
}

TEST_CASE("tokenize: offsets count code points, not bytes") {
  const auto tokens = tokenize_text("naïve Bayer test");
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[0].text == "naïve");
  CHECK(tokens[0].end == 5);
  CHECK(tokens[1].start == 6);
  CHECK(tokens[1].text == "Bayer");
  CHECK(tokens[2].start == 12);
}

TEST_CASE("tokenize: deterministic and invariant-preserving on fixtures") {
  const std::string article = testsupport::article_text();
  const auto a = tokenize_text(article);
  const auto b = tokenize_text(article);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].text == b[i].text);
    CHECK(a[i].start == b[i].start);
  }
  check_token_invariants(article, a);
  for (const auto& doc : testsupport::synthetic_corpus(10).documents)
    check_token_invariants(doc.text, tokenize(doc));
}

TEST_CASE("tokenize: invariants hold on random unicode soup") {
  std::mt19937 rng(7);
  const std::vector<CodePoint> pool = {'a', 'b', 'Z', '1', '.', ',', '&', '(', ')',
                                       ' ', ' ', '\t', '\n', 0xE9 /* e acute */,
                                       0x2014 /* em dash */, 0x4E2D /* CJK */};
  for (int round = 0; round < 200; ++round) {
    std::string text;
    const std::size_t len = rng() % 40;
    for (std::size_t k = 0; k < len; ++k) text += encode_cp(pool[rng() % pool.size()]);
    check_token_invariants(text, tokenize_text(text));
  }
}

TEST_CASE("normalize: strip and fold") {
  CHECK(normalize("Ltd.") == "ltd");
  CHECK(normalize("Sanofi") == "sanofi");
  CHECK(normalize("GILEAD") == "gilead");
}

TEST_CASE("normalize: plural suffix rules") {
  CHECK(normalize("Pharmaceuticals") == "pharmaceutical");
  CHECK(normalize("companies") == "company");
  CHECK(normalize("boxes") == "box");
  CHECK(normalize("glass") == "glass");    // -ss guarded
  CHECK(normalize("Novartis") == "novartis");  // -is guarded
  CHECK(normalize("virus") == "virus");    // -us guarded
  CHECK(normalize("Humira's") == "humira");
}

TEST_CASE("normalize: exceptions table wins over suffix rules") {
  const std::unordered_map<std::string, std::string> exceptions = {{"media", "medium"}};
  CHECK(normalize("Media", exceptions) == "medium");
  CHECK(normalize("media", exceptions) == "medium");
}

TEST_CASE("lemma exceptions file: TSV loads case-folded, bad rows error") {
  TempDir tmp;
  const auto good = tmp.file("lemma.tsv", "Media\tmedium\nDatums\tdatum\n");
  const auto table = load_lemma_exceptions(good);
  CHECK(table.at("media") == "medium");
  const auto bad = tmp.file("bad.tsv", "no-tab-here\n");
  CHECK_THROWS_AS(load_lemma_exceptions(bad), error);
}

TEST_CASE("stop word file replaces the built-in list") {
  TempDir tmp;
  const auto path = tmp.file("stops.txt", "Foo\nbar\n");
  const auto words = load_stop_words(path);
  TokenizerOptions opts;
  opts.stop_words = words;
  const auto tokens = tokenize_text("foo the BAR", opts);
  REQUIRE(tokens.size() == 3);
  CHECK(tokens[0].is_stop);
  CHECK_FALSE(tokens[1].is_stop);  // "the" is no longer a stop word
  CHECK(tokens[2].is_stop);
}

TEST_CASE("sentence split: terminal punctuation before an uppercase start") {
  const auto ranges = split_sentences("Sanofi wins. Gilead loses.");
  REQUIRE(ranges.size() == 2);
  CHECK(ranges[0] == std::pair<std::size_t, std::size_t>{0, 12});
  CHECK(ranges[1] == std::pair<std::size_t, std::size_t>{13, 26});
}

TEST_CASE("sentence split: abbreviations do not split") {
  const auto ranges = split_sentences("Sanofi Ltd. Spain won. Gilead lost.");
  REQUIRE(ranges.size() == 2);
  CHECK(cp_substr("Sanofi Ltd. Spain won. Gilead lost.", ranges[0].first, ranges[0].second) ==
        "Sanofi Ltd. Spain won.");
}

TEST_CASE("sentence split: lowercase continuation does not split") {
  const auto ranges = split_sentences("approx. 4.5 million doses shipped");
  CHECK(ranges.size() == 1);
}

TEST_CASE("sentence split: trailing text without terminal punctuation is a sentence") {
  const auto ranges = split_sentences("First one. second half without end");
  REQUIRE(ranges.size() == 1);  // ". s" is not a boundary (lowercase)
  const auto two = split_sentences("First one! Second half without end");
  REQUIRE(two.size() == 2);
  CHECK(two[1].second == 34);
}
