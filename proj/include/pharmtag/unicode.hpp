#pragma once

// Code-point level helpers for UTF-8 text. All offsets in this library
// (tokens, entity spans, sentence ranges, linked-annotation offsets) count
// Unicode code points, not bytes. Invalid UTF-8 bytes are consumed one at a
// time so that indexing stays total over arbitrary input.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pharmtag {

using CodePoint = std::uint32_t;

inline std::size_t utf8_seq_len(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) return 2;
  if ((lead & 0xF0) == 0xE0) return 3;
  if ((lead & 0xF8) == 0xF0) return 4;
  return 1;  // invalid lead byte
}

inline CodePoint decode_cp(std::string_view s, std::size_t byte, std::size_t len) {
  const auto b0 = static_cast<unsigned char>(s[byte]);
  if (len == 1) return b0;
  CodePoint cp = b0 & (0x7F >> len);
  for (std::size_t k = 1; k < len && byte + k < s.size(); ++k) {
    const auto bk = static_cast<unsigned char>(s[byte + k]);
    if ((bk & 0xC0) != 0x80) return b0;  // truncated sequence
    cp = (cp << 6) | (bk & 0x3F);
  }
  return cp;
}

// Decoded view of a UTF-8 string: code points plus the byte offset of each,
// with a trailing sentinel equal to the byte length.
struct Utf8View {
  std::string_view text;
  std::vector<CodePoint> cps;
  std::vector<std::size_t> byte_of;

  explicit Utf8View(std::string_view s) : text(s) {
    cps.reserve(s.size());
    byte_of.reserve(s.size() + 1);
    std::size_t i = 0;
    while (i < s.size()) {
      const std::size_t len = utf8_seq_len(static_cast<unsigned char>(s[i]));
      byte_of.push_back(i);
      cps.push_back(decode_cp(s, i, len));
      i += (i + len <= s.size()) ? len : 1;
    }
    byte_of.push_back(s.size());
  }

  std::size_t size() const { return cps.size(); }

  // Substring by code-point range [a, b).
  std::string substr(std::size_t a, std::size_t b) const {
    return std::string(text.substr(byte_of[a], byte_of[b] - byte_of[a]));
  }
};

inline std::size_t cp_length(std::string_view s) {
  std::size_t n = 0, i = 0;
  while (i < s.size()) {
    const std::size_t len = utf8_seq_len(static_cast<unsigned char>(s[i]));
    i += (i + len <= s.size()) ? len : 1;
    ++n;
  }
  return n;
}

inline std::string cp_substr(std::string_view s, std::size_t a, std::size_t b) {
  return Utf8View(s).substr(a, b);
}

inline bool is_space_cp(CodePoint c) {
  switch (c) {
    case ' ': case '\t': case '\n': case '\r': case '\v': case '\f':
    case 0x00A0: case 0x1680: case 0x2028: case 0x2029: case 0x202F:
    case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

inline bool is_punct_cp(CodePoint c) {
  if (c < 0x80) {
    return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') ||
           (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
  }
  switch (c) {
    case 0x00A1: case 0x00AB: case 0x00BB: case 0x00BF:
    case 0x2013: case 0x2014: case 0x2026:
      return true;
    default:
      return c >= 0x2018 && c <= 0x201F;  // curly quotes
  }
}

inline bool is_upper_or_digit_cp(CodePoint c) {
  if ((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) return true;
  return c >= 0x00C0 && c <= 0x00DE && c != 0x00D7;  // Latin-1 uppercase
}

// ASCII-only case fold; multi-byte UTF-8 sequences pass through untouched.
inline std::string fold_ascii(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

inline std::string_view trim_view(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (static_cast<unsigned char>(s[b]) <= ' ')) ++b;
  while (e > b && (static_cast<unsigned char>(s[e - 1]) <= ' ')) --e;
  return s.substr(b, e - b);
}

}  // namespace pharmtag
