#pragma once

// Matching-oriented text normalization: ASCII casefold, punctuation to
// space, whitespace collapsed. Keeps a map back to source byte offsets so
// evidence can point into the original text.

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace oacite::text {

struct NormalizedText {
  std::string text;
  std::vector<std::size_t> source_offset;  // source byte of text[i]
};

namespace detail {
inline bool word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }
}  // namespace detail

inline NormalizedText normalize_with_offsets(std::string_view src) {
  NormalizedText out;
  out.text.reserve(src.size());
  out.source_offset.reserve(src.size());
  bool pending_space = false;
  std::size_t space_at = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto c = static_cast<unsigned char>(src[i]);
    if (!detail::word_byte(c)) {
      if (!pending_space) space_at = i;
      pending_space = !out.text.empty();
      continue;
    }
    if (pending_space) {
      out.text.push_back(' ');
      out.source_offset.push_back(space_at);
      pending_space = false;
    }
    out.text.push_back(static_cast<char>(std::tolower(c)));
    out.source_offset.push_back(i);
  }
  return out;
}

inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (unsigned char ch : s) {
    if (std::isspace(ch)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(ch));
  }
  return out;
}

inline std::string normalize(std::string_view src) { return normalize_with_offsets(src).text; }

inline std::vector<std::string> tokens(std::string_view normalized) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < normalized.size()) {
    auto j = normalized.find(' ', i);
    if (j == std::string_view::npos) j = normalized.size();
    if (j > i) out.emplace_back(normalized.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

// Whole-token occurrence of `needle` (already normalized) in `hay`, starting
// at or after `from` and ending at or before `to`. Token boundaries are
// judged against the whole of `hay`, so shrinking the window never creates a
// match that a larger window would not also contain.
inline std::size_t find_token(std::string_view hay, std::string_view needle, std::size_t from,
                              std::size_t to) {
  if (needle.empty() || to > hay.size()) return std::string_view::npos;
  std::size_t pos = hay.find(needle, from);
  while (pos != std::string_view::npos && pos + needle.size() <= to) {
    const bool left_ok = pos == 0 || hay[pos - 1] == ' ';
    const bool right_ok = pos + needle.size() == hay.size() || hay[pos + needle.size()] == ' ';
    if (left_ok && right_ok) return pos;
    pos = hay.find(needle, pos + 1);
  }
  return std::string_view::npos;
}

inline bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2, cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3, cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4, cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
      return false;
    i += len;
  }
  return true;
}

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace oacite::text
