#pragma once

// Full-text test for one extracted document, and candidate-link selection
// for pages that carry the title but not the full text.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "oacite/expected.hpp"
#include "oacite/extract.hpp"
#include "oacite/records.hpp"
#include "oacite/text.hpp"
#include "oacite/url.hpp"

namespace oacite {

struct CrawlConfig {
  int max_depth = 3;
  double per_host_rate = 1.0;  // requests per second per host; <= 0 disables
  int max_in_flight = 4;
  std::chrono::milliseconds fetch_timeout{10000};
  int max_links_followed_per_page = 20;
  double title_similarity_threshold = 0.90;
  double head_fraction = 0.20;
  double tail_fraction = 0.20;

  void validate() const {
    auto bad = [](const std::string& m) { throw Error("INVALID_CONFIG", m); };
    if (max_depth < 0) bad("max_depth must be >= 0");
    if (!(head_fraction > 0.0 && head_fraction <= 0.5)) bad("head_fraction must be in (0, 0.5]");
    if (!(tail_fraction > 0.0 && tail_fraction <= 0.5)) bad("tail_fraction must be in (0, 0.5]");
    if (!(title_similarity_threshold >= 0.0 && title_similarity_threshold <= 1.0))
      bad("title_similarity_threshold must be in [0, 1]");
    if (max_in_flight < 1) bad("max_in_flight must be >= 1");
    if (max_links_followed_per_page < 0) bad("max_links_followed_per_page must be >= 0");
    if (fetch_timeout.count() <= 0) bad("fetch_timeout must be positive");
  }
};

enum class NotFoundReason { NO_TITLE_MATCH, NO_REFERENCES_SECTION, EMPTY_TEXT, EXHAUSTED };

inline std::string_view to_string(NotFoundReason r) {
  switch (r) {
    case NotFoundReason::NO_TITLE_MATCH: return "NO_TITLE_MATCH";
    case NotFoundReason::NO_REFERENCES_SECTION: return "NO_REFERENCES_SECTION";
    case NotFoundReason::EMPTY_TEXT: return "EMPTY_TEXT";
    case NotFoundReason::EXHAUSTED: return "EXHAUSTED";
  }
  return "EXHAUSTED";
}

struct FullTextFound {
  std::string url;                 // filled in by the crawler
  std::int64_t head_offset = 0;    // source byte offset of the title match
  std::string tail_evidence;       // e.g. "heading:references" or "citation-lines:5"
  double title_similarity = 0.0;
};

struct NotFound {
  NotFoundReason reason = NotFoundReason::EXHAUSTED;
};

using MatchVerdict = std::variant<FullTextFound, NotFound>;

inline bool is_found(const MatchVerdict& v) { return std::holds_alternative<FullTextFound>(v); }

namespace detail {

struct ApproxMatch {
  std::size_t distance = 0;
  std::size_t start = 0;  // in the searched text
  std::size_t end = 0;
};

// Minimum edit distance between `pattern` and any substring of
// text[0, limit). Ties go to the earliest end, then the latest start.
inline ApproxMatch best_substring_match(std::string_view pattern, std::string_view text,
                                        std::size_t limit) {
  const std::size_t m = pattern.size();
  std::vector<std::size_t> cost(m + 1), start(m + 1);
  std::vector<std::size_t> prev_cost(m + 1), prev_start(m + 1);
  for (std::size_t i = 0; i <= m; ++i) prev_cost[i] = i, prev_start[i] = 0;

  ApproxMatch best{prev_cost[m], 0, 0};
  for (std::size_t j = 1; j <= limit; ++j) {
    cost[0] = 0;
    start[0] = j;
    for (std::size_t i = 1; i <= m; ++i) {
      const std::size_t sub = prev_cost[i - 1] + (pattern[i - 1] == text[j - 1] ? 0 : 1);
      const std::size_t del = cost[i - 1] + 1;  // skip a pattern char
      const std::size_t ins = prev_cost[i] + 1;  // skip a text char
      if (sub <= del && sub <= ins) {
        cost[i] = sub, start[i] = prev_start[i - 1];
      } else if (del <= ins) {
        cost[i] = del, start[i] = start[i - 1];
      } else {
        cost[i] = ins, start[i] = prev_start[i];
      }
    }
    if (cost[m] < best.distance) best = {cost[m], start[m], j};
    if (best.distance == 0) break;
    std::swap(cost, prev_cost);
    std::swap(start, prev_start);
  }
  return best;
}

// A line cites something when it opens with "[n]" or holds "(19xx)"/"(20xx)".
inline bool citation_like_line(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  if (i < line.size() && line[i] == '[') {
    std::size_t j = i + 1;
    while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i + 1 && j < line.size() && line[j] == ']') return true;
  }
  for (std::size_t p = line.find('('); p != std::string_view::npos; p = line.find('(', p + 1)) {
    std::string_view rest = line.substr(p + 1);
    if (rest.size() < 5) break;
    if (!(rest.substr(0, 2) == "19" || rest.substr(0, 2) == "20")) continue;
    if (!std::isdigit(static_cast<unsigned char>(rest[2])) ||
        !std::isdigit(static_cast<unsigned char>(rest[3])))
      continue;
    std::size_t k = 4;
    if (k < rest.size() && std::islower(static_cast<unsigned char>(rest[k]))) ++k;
    if (k < rest.size() && rest[k] == ')') return true;
  }
  return false;
}

inline constexpr std::string_view kReferenceHeadings[] = {"references", "bibliography",
                                                          "works cited", "literature cited"};

}  // namespace detail

// Number of normalized title tokens; fewer than 3 flags low confidence.
inline std::size_t title_token_count(std::string_view title) {
  return text::tokens(text::normalize(title)).size();
}

// FULL_TEXT_FOUND iff the title (edit similarity >= threshold) and the
// author surname both occur in the first head_fraction of the normalized
// text, and the last tail_fraction holds a references section.
inline MatchVerdict match_full_text(std::string_view source, const ArticleRecord& record,
                                    const CrawlConfig& config) {
  const text::NormalizedText norm = text::normalize_with_offsets(source);
  const std::string& t = norm.text;
  if (t.empty()) return NotFound{NotFoundReason::EMPTY_TEXT};

  const std::size_t n = t.size();
  const auto head_end = static_cast<std::size_t>(config.head_fraction * static_cast<double>(n));
  const auto tail_len = static_cast<std::size_t>(config.tail_fraction * static_cast<double>(n));
  const std::size_t tail_start = n - tail_len;

  const std::string title = text::normalize(record.title);
  const std::string surname = text::normalize(record.first_author_surname);
  if (title.empty() || surname.empty() || head_end == 0)
    return NotFound{NotFoundReason::NO_TITLE_MATCH};

  const auto match = detail::best_substring_match(title, t, head_end);
  const double similarity =
      1.0 - static_cast<double>(match.distance) / static_cast<double>(title.size());
  if (similarity + 1e-12 < config.title_similarity_threshold)
    return NotFound{NotFoundReason::NO_TITLE_MATCH};
  if (text::find_token(t, surname, 0, head_end) == std::string::npos)
    return NotFound{NotFoundReason::NO_TITLE_MATCH};

  FullTextFound found;
  found.head_offset = static_cast<std::int64_t>(norm.source_offset[match.start]);
  found.title_similarity = similarity;

  for (std::string_view heading : detail::kReferenceHeadings) {
    if (tail_len > 0 && text::find_token(t, heading, tail_start, n) != std::string::npos) {
      found.tail_evidence = "heading:" + std::string(heading);
      return found;
    }
  }

  // Citation-like lines counted only when the whole source line lies in the tail.
  if (tail_len > 0) {
    const std::size_t tail_src = norm.source_offset[tail_start];
    std::size_t count = 0;
    std::size_t line_start = 0;
    while (line_start < source.size()) {
      std::size_t line_end = source.find('\n', line_start);
      if (line_end == std::string_view::npos) line_end = source.size();
      if (line_start >= tail_src &&
          detail::citation_like_line(source.substr(line_start, line_end - line_start)))
        ++count;
      line_start = line_end + 1;
    }
    if (count >= 3) {
      found.tail_evidence = "citation-lines:" + std::to_string(count);
      return found;
    }
  }
  return NotFound{NotFoundReason::NO_REFERENCES_SECTION};
}

namespace detail {

inline bool stopword(std::string_view w) {
  static constexpr std::string_view words[] = {"the", "and", "for", "with", "from", "into",
                                               "its", "are", "was", "not", "but", "via",
                                               "how", "why", "what", "who", "does", "can"};
  return std::find(std::begin(words), std::end(words), w) != std::end(words);
}

inline std::size_t shared_tokens(const std::unordered_set<std::string>& title_tokens,
                                 std::string_view normalized) {
  std::unordered_set<std::string> seen;
  for (auto& tok : text::tokens(normalized))
    if (title_tokens.count(tok)) seen.insert(tok);
  return seen.size();
}

}  // namespace detail

// Anchors worth following from a title-bearing page: the anchor text or URL
// shares >= 2 title tokens, the URL ends in .pdf/.ps, or the anchor text says
// "full text", "pdf", "download" or "postscript". Returns canonical absolute
// URLs in document order, capped at `max_links`.
inline std::vector<std::string> extract_candidate_links(const std::vector<Anchor>& anchors,
                                                        std::string_view base_url,
                                                        const ArticleRecord& record,
                                                        int max_links) {
  std::unordered_set<std::string> title_tokens;
  for (auto& tok : text::tokens(text::normalize(record.title)))
    if (tok.size() >= 3 && !detail::stopword(tok)) title_tokens.insert(tok);

  static constexpr std::string_view phrases[] = {"full text", "pdf", "download", "postscript"};

  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const Anchor& a : anchors) {
    if (static_cast<int>(out.size()) >= max_links) break;
    if (a.href.empty() || a.href[0] == '#') continue;
    const std::string lower_href = text::normalize(a.href.substr(0, 11));
    if (lower_href.rfind("javascript", 0) == 0 || lower_href.rfind("mailto", 0) == 0) continue;

    auto canon = url::normalize_url(url::resolve_reference(base_url, a.href));
    if (!canon) continue;
    const std::string scheme = canon->substr(0, canon->find(':'));
    if (scheme != "http" && scheme != "https") continue;

    const std::string anchor_norm = text::normalize(a.text);
    bool candidate = url::has_full_text_extension(*canon) ||
                     detail::shared_tokens(title_tokens, anchor_norm) >= 2 ||
                     detail::shared_tokens(title_tokens, text::normalize(*canon)) >= 2;
    for (auto p : phrases)
      if (!candidate && text::find_token(anchor_norm, p, 0, anchor_norm.size()) != std::string::npos)
        candidate = true;
    if (candidate && seen.insert(*canon).second) out.push_back(*canon);
  }
  return out;
}

inline std::vector<std::string> extract_candidate_links(std::string_view html,
                                                        std::string_view base_url,
                                                        const ArticleRecord& record,
                                                        int max_links) {
  return extract_candidate_links(html::parse(html).links, base_url, record, max_links);
}

}  // namespace oacite
