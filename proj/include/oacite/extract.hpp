#pragma once

// Document format tags, HTML linearization and the text-extraction entry
// point. Formats without a built-in reader go through a TextConverter.

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "oacite/expected.hpp"
#include "oacite/text.hpp"
#include "oacite/url.hpp"

namespace oacite {

enum class Format { Html, Text, Pdf, PostScript, Latex, Xml, Rtf, Word, Unknown };

inline std::string_view to_string(Format f) {
  switch (f) {
    case Format::Html: return "html";
    case Format::Text: return "text";
    case Format::Pdf: return "pdf";
    case Format::PostScript: return "ps";
    case Format::Latex: return "latex";
    case Format::Xml: return "xml";
    case Format::Rtf: return "rtf";
    case Format::Word: return "word";
    case Format::Unknown: return "unknown";
  }
  return "unknown";
}

inline Format parse_format(std::string_view tag) {
  for (Format f : {Format::Html, Format::Text, Format::Pdf, Format::PostScript, Format::Latex,
                   Format::Xml, Format::Rtf, Format::Word})
    if (to_string(f) == tag) return f;
  return Format::Unknown;
}

inline Format format_from_extension(std::string_view ext) {
  if (ext == "html" || ext == "htm" || ext == "xhtml" || ext == "shtml") return Format::Html;
  if (ext == "txt" || ext == "text") return Format::Text;
  if (ext == "pdf") return Format::Pdf;
  if (ext == "ps") return Format::PostScript;
  if (ext == "tex" || ext == "latex") return Format::Latex;
  if (ext == "xml") return Format::Xml;
  if (ext == "rtf") return Format::Rtf;
  if (ext == "doc" || ext == "docx") return Format::Word;
  return Format::Unknown;
}

// Content-Type wins; the URL extension is the fallback.
inline Format detect_format(std::string_view content_type, std::string_view url) {
  std::string ct;
  for (char c : content_type.substr(0, content_type.find(';')))
    if (!std::isspace(static_cast<unsigned char>(c)))
      ct.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (ct == "text/html" || ct == "application/xhtml+xml") return Format::Html;
  if (ct == "text/plain") return Format::Text;
  if (ct == "application/pdf") return Format::Pdf;
  if (ct == "application/postscript") return Format::PostScript;
  if (ct == "application/x-latex" || ct == "application/x-tex" || ct == "text/x-tex")
    return Format::Latex;
  if (ct == "text/xml" || ct == "application/xml") return Format::Xml;
  if (ct == "application/rtf" || ct == "text/rtf") return Format::Rtf;
  if (ct == "application/msword" ||
      ct == "application/vnd.openxmlformats-officedocument.wordprocessingml.document")
    return Format::Word;
  return format_from_extension(url::path_extension(url));
}

struct ExtractError {
  // CONVERTER_UNAVAILABLE, CONVERTER_FAILED, CONVERTER_TIMEOUT, UNDECODABLE
  std::string code;
  std::string message;
};

struct Anchor {
  std::string href;  // entity-decoded, unresolved
  std::string text;  // whitespace-collapsed
};

struct ExtractedText {
  std::string text;
  std::vector<Anchor> links;  // only populated for HTML
};

class TextConverter {
 public:
  virtual ~TextConverter() = default;
  virtual Expected<std::string, ExtractError> convert(std::string_view bytes,
                                                      Format format) const = 0;
};

namespace html {

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool is_block_tag(std::string_view name) {
  static constexpr std::string_view blocks[] = {
      "p",  "br", "div", "li", "ul", "ol", "tr", "td", "th", "table", "h1", "h2", "h3",
      "h4", "h5", "h6",  "title", "dt", "dd", "dl", "section", "article", "header",
      "footer", "blockquote", "pre", "hr", "nav", "body", "head", "html"};
  for (auto b : blocks)
    if (name == b) return true;
  return false;
}

inline std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    auto semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    std::string_view ent = s.substr(i + 1, semi - i - 1);
    std::uint32_t cp = 0;
    if (ent == "amp") cp = '&';
    else if (ent == "lt") cp = '<';
    else if (ent == "gt") cp = '>';
    else if (ent == "quot") cp = '"';
    else if (ent == "apos") cp = '\'';
    else if (ent == "nbsp") cp = ' ';
    else if (ent.size() > 1 && ent[0] == '#') {
      try {
        cp = (ent[1] == 'x' || ent[1] == 'X')
                 ? static_cast<std::uint32_t>(std::stoul(std::string(ent.substr(2)), nullptr, 16))
                 : static_cast<std::uint32_t>(std::stoul(std::string(ent.substr(1))));
      } catch (...) {
        cp = 0;
      }
      if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0;
    }
    if (cp == 0) {
      out.push_back('&');
      continue;
    }
    text::append_utf8(out, cp);
    i = semi;
  }
  return out;
}

// Reads attribute `name` out of a raw tag body such as `a href="x" class=y`.
inline std::string attribute(std::string_view tag, std::string_view name) {
  const std::string low = lower(tag);
  std::size_t pos = 0;
  while ((pos = low.find(name, pos)) != std::string::npos) {
    const bool left_ok = pos > 0 && std::isspace(static_cast<unsigned char>(low[pos - 1]));
    std::size_t j = pos + name.size();
    while (j < low.size() && std::isspace(static_cast<unsigned char>(low[j]))) ++j;
    if (!left_ok || j >= low.size() || low[j] != '=') {
      pos += name.size();
      continue;
    }
    ++j;
    while (j < low.size() && std::isspace(static_cast<unsigned char>(low[j]))) ++j;
    if (j >= tag.size()) return {};
    if (tag[j] == '"' || tag[j] == '\'') {
      const char q = tag[j];
      auto end = tag.find(q, j + 1);
      return decode_entities(tag.substr(j + 1, (end == std::string_view::npos ? tag.size() : end) -
                                                   j - 1));
    }
    auto end = j;
    while (end < tag.size() && !std::isspace(static_cast<unsigned char>(tag[end])) &&
           tag[end] != '>')
      ++end;
    return decode_entities(tag.substr(j, end - j));
  }
  return {};
}

// Collapses horizontal whitespace, trims lines, and squeezes blank lines.
inline std::string tidy(std::string_view raw) {
  std::string out;
  std::string line;
  auto flush = [&] {
    while (!line.empty() && line.back() == ' ') line.pop_back();
    if (!line.empty()) {
      out += line;
      out.push_back('\n');
    }
    line.clear();
  };
  for (char c : raw) {
    if (c == '\n') {
      flush();
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      if (!line.empty() && line.back() != ' ') line.push_back(' ');
    } else {
      line.push_back(c);
    }
  }
  flush();
  if (!out.empty()) out.pop_back();
  return out;
}

}  // namespace detail

// Linearizes HTML: tags removed, script/style/comments dropped, block tags
// become line breaks, entities decoded. Anchors are returned separately.
inline ExtractedText parse(std::string_view html) {
  using detail::lower;
  std::string raw;
  std::vector<Anchor> links;
  bool in_anchor = false;
  std::string anchor_text;
  std::string anchor_href;

  auto emit_text = [&](std::string_view chunk) {
    std::string decoded = detail::decode_entities(chunk);
    for (char& c : decoded)
      if (c == '\n' || c == '\r' || c == '\t') c = ' ';
    raw += decoded;
    if (in_anchor) anchor_text += decoded;
  };
  auto close_anchor = [&] {
    if (!in_anchor) return;
    links.push_back({anchor_href, text::collapse_whitespace(anchor_text)});
    in_anchor = false;
    anchor_text.clear();
  };

  std::size_t i = 0;
  while (i < html.size()) {
    auto lt = html.find('<', i);
    if (lt == std::string_view::npos) {
      emit_text(html.substr(i));
      break;
    }
    emit_text(html.substr(i, lt - i));
    if (html.substr(lt, 4) == "<!--") {
      auto end = html.find("-->", lt + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    auto gt = html.find('>', lt);
    if (gt == std::string_view::npos) break;
    std::string_view body = html.substr(lt + 1, gt - lt - 1);
    i = gt + 1;

    bool closing = !body.empty() && body[0] == '/';
    std::string_view name_view = body.substr(closing ? 1 : 0);
    std::size_t name_end = 0;
    while (name_end < name_view.size() &&
           (std::isalnum(static_cast<unsigned char>(name_view[name_end])) ||
            name_view[name_end] == '-'))
      ++name_end;
    const std::string name = lower(name_view.substr(0, name_end));
    if (name.empty()) continue;  // <!DOCTYPE>, <?xml ...?>

    if (!closing && (name == "script" || name == "style")) {
      const std::string low_rest = lower(html.substr(i));
      auto end = low_rest.find("</" + name);
      if (end == std::string::npos) {
        i = html.size();
      } else {
        auto close_gt = html.find('>', i + end);
        i = close_gt == std::string_view::npos ? html.size() : close_gt + 1;
      }
      continue;
    }
    if (name == "a") {
      if (closing) {
        close_anchor();
      } else {
        close_anchor();
        in_anchor = true;
        anchor_href = detail::attribute(body, "href");
      }
      continue;
    }
    if (detail::is_block_tag(name)) {
      raw.push_back('\n');
      if (in_anchor) anchor_text.push_back(' ');
    }
  }
  close_anchor();
  return {detail::tidy(raw), std::move(links)};
}

}  // namespace html

// HTML: linearized with links kept; plain text: identity. Everything else
// goes through `converter`, which may be null.
inline Expected<ExtractedText, ExtractError> extract_text(std::string_view bytes, Format format,
                                                          const TextConverter* converter) {
  switch (format) {
    case Format::Html:
      if (!text::valid_utf8(bytes))
        return unexpected(ExtractError{"UNDECODABLE", "HTML is not valid UTF-8"});
      return html::parse(bytes);
    case Format::Text:
      if (!text::valid_utf8(bytes))
        return unexpected(ExtractError{"UNDECODABLE", "text is not valid UTF-8"});
      return ExtractedText{std::string(bytes), {}};
    default:
      break;
  }
  if (converter == nullptr)
    return unexpected(ExtractError{"CONVERTER_UNAVAILABLE",
                                   "no converter configured for format '" +
                                       std::string(to_string(format)) + "'"});
  auto converted = converter->convert(bytes, format);
  if (!converted) return unexpected(converted.error());
  if (!text::valid_utf8(*converted))
    return unexpected(ExtractError{"UNDECODABLE", "converter output is not valid UTF-8"});
  return ExtractedText{std::move(*converted), {}};
}

}  // namespace oacite
