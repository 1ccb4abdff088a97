#pragma once

// Bibliographic data model, citation-range binning, and JSONL persistence for
// article records and detection evidence.

#include <array>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "oacite/expected.hpp"
#include "oacite/text.hpp"

namespace oacite {

enum class OaStatus { OA, NOA, UNKNOWN };

inline std::string_view to_string(OaStatus s) {
  switch (s) {
    case OaStatus::OA: return "OA";
    case OaStatus::NOA: return "NOA";
    case OaStatus::UNKNOWN: return "UNKNOWN";
  }
  return "UNKNOWN";
}

inline std::optional<OaStatus> parse_oa_status(std::string_view s) {
  if (s == "OA") return OaStatus::OA;
  if (s == "NOA") return OaStatus::NOA;
  if (s == "UNKNOWN") return OaStatus::UNKNOWN;
  return std::nullopt;
}

// Six citation bins: 0, 1, 2-3, 4-7, 8-15, 16+.
enum class CitationRange { R0 = 0, R1, R2_3, R4_7, R8_15, R16_PLUS };

inline constexpr std::size_t kCitationRangeCount = 6;

inline constexpr std::array<CitationRange, kCitationRangeCount> kAllCitationRanges = {
    CitationRange::R0,   CitationRange::R1,    CitationRange::R2_3,
    CitationRange::R4_7, CitationRange::R8_15, CitationRange::R16_PLUS};

inline constexpr CitationRange bin_citations(std::uint64_t c) noexcept {
  if (c == 0) return CitationRange::R0;
  if (c == 1) return CitationRange::R1;
  if (c <= 3) return CitationRange::R2_3;
  if (c <= 7) return CitationRange::R4_7;
  if (c <= 15) return CitationRange::R8_15;
  return CitationRange::R16_PLUS;
}

inline constexpr std::size_t index_of(CitationRange r) noexcept {
  return static_cast<std::size_t>(r);
}

// Human label used in reports ("0", "1", "2-3", ...).
inline std::string_view range_label(CitationRange r) {
  constexpr std::array<std::string_view, kCitationRangeCount> labels = {
      "0", "1", "2-3", "4-7", "8-15", "16+"};
  return labels[index_of(r)];
}

// --- ArticleRecord -----------------------------------------------------------

struct ArticleRecord {
  std::string id;
  std::string first_author_surname;
  std::string title;
  std::string journal_id;
  std::string issue_key;  // "journal_id|year|issue"
  int year = 0;
  std::string discipline;
  std::string country;
  std::int64_t citation_count = 0;
  OaStatus oa_status = OaStatus::UNKNOWN;

  bool operator==(const ArticleRecord&) const = default;
};

class RecordError : public Error {
 public:
  RecordError(std::string code, const std::string& message, std::size_t line = 0,
              std::string field = {}, std::string record_id = {})
      : Error(std::move(code), message),
        line_(line),
        field_(std::move(field)),
        record_id_(std::move(record_id)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }
  const std::string& record_id() const noexcept { return record_id_; }

 private:
  std::size_t line_;
  std::string field_;
  std::string record_id_;
};

inline std::string make_issue_key(std::string_view journal_id, int year, std::string_view issue) {
  if (journal_id.find('|') != std::string_view::npos || issue.find('|') != std::string_view::npos)
    throw RecordError("INVALID_ISSUE_KEY", "'|' is not allowed in issue key components");
  std::string key(journal_id);
  key += '|';
  key += std::to_string(year);
  key += '|';
  key += issue;
  return key;
}

struct FieldViolation {
  std::string field;
  std::string message;
};

// Returns the first violated invariant, or nullopt for a valid record.
inline std::optional<FieldViolation> validate(const ArticleRecord& r) {
  if (r.id.empty()) return FieldViolation{"id", "must be non-empty"};
  if (r.citation_count < 0) return FieldViolation{"citation_count", "must be >= 0"};
  if (text::collapse_whitespace(r.title).empty()) return FieldViolation{"title", "must be non-empty"};
  if (text::collapse_whitespace(r.first_author_surname).empty())
    return FieldViolation{"first_author_surname", "must be non-empty"};
  if (r.journal_id.empty()) return FieldViolation{"journal_id", "must be non-empty"};
  if (r.journal_id.find('|') != std::string::npos)
    return FieldViolation{"journal_id", "must not contain '|'"};

  // issue_key must be exactly journal_id|year|issue with a non-empty issue part.
  const std::string prefix = r.journal_id + "|" + std::to_string(r.year) + "|";
  if (r.issue_key.size() <= prefix.size() || r.issue_key.compare(0, prefix.size(), prefix) != 0)
    return FieldViolation{"issue_key", "must have the form journal_id|year|issue"};
  if (r.issue_key.find('|', prefix.size()) != std::string::npos)
    return FieldViolation{"issue_key", "issue component must not contain '|'"};
  return std::nullopt;
}

// --- JSON mapping ------------------------------------------------------------

inline nlohmann::ordered_json to_json(const ArticleRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["first_author_surname"] = r.first_author_surname;
  j["title"] = r.title;
  j["journal_id"] = r.journal_id;
  j["issue_key"] = r.issue_key;
  j["year"] = r.year;
  j["discipline"] = r.discipline;
  j["country"] = r.country;
  j["citation_count"] = r.citation_count;
  j["oa_status"] = std::string(to_string(r.oa_status));
  return j;
}

namespace detail {

inline std::string id_of(const nlohmann::json& j) {
  auto it = j.find("id");
  if (it != j.end() && it->is_string()) return it->get<std::string>();
  return {};
}

template <typename Fn>
auto required(const nlohmann::json& j, const char* field, std::size_t line, Fn&& check) {
  auto it = j.find(field);
  if (it == j.end())
    throw RecordError("VALIDATION", std::string("missing field '") + field + "'", line, field,
                      id_of(j));
  if (!check(*it))
    throw RecordError("VALIDATION", std::string("field '") + field + "' has the wrong type", line,
                      field, id_of(j));
  return it;
}

}  // namespace detail

// Parses and validates one record object. `line` is only used in errors.
inline ArticleRecord record_from_json(const nlohmann::json& j, std::size_t line = 0) {
  using detail::required;
  if (!j.is_object()) throw RecordError("PARSE", "line is not a JSON object", line);
  auto is_str = [](const nlohmann::json& v) { return v.is_string(); };
  auto is_int = [](const nlohmann::json& v) { return v.is_number_integer(); };

  ArticleRecord r;
  r.id = required(j, "id", line, is_str)->get<std::string>();
  r.first_author_surname = required(j, "first_author_surname", line, is_str)->get<std::string>();
  r.title = required(j, "title", line, is_str)->get<std::string>();
  r.journal_id = required(j, "journal_id", line, is_str)->get<std::string>();
  r.issue_key = required(j, "issue_key", line, is_str)->get<std::string>();
  r.year = required(j, "year", line, is_int)->get<int>();
  r.discipline = required(j, "discipline", line, is_str)->get<std::string>();
  r.country = required(j, "country", line, is_str)->get<std::string>();
  r.citation_count = required(j, "citation_count", line, is_int)->get<std::int64_t>();
  if (auto it = j.find("oa_status"); it != j.end()) {
    auto status = it->is_string() ? parse_oa_status(it->get<std::string>()) : std::nullopt;
    if (!status)
      throw RecordError("VALIDATION", "field 'oa_status' must be OA, NOA or UNKNOWN", line,
                        "oa_status", r.id);
    r.oa_status = *status;
  }
  if (auto bad = validate(r))
    throw RecordError("VALIDATION",
                      "record '" + r.id + "' field '" + bad->field + "' " + bad->message, line,
                      bad->field, r.id);
  return r;
}

namespace detail {

inline bool blank(std::string_view s) {
  for (unsigned char c : s)
    if (!std::isspace(c)) return false;
  return true;
}

template <typename Fn>
void for_each_jsonl_line(const std::string& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RecordError("IO", "cannot open '" + path + "' for reading");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw RecordError("PARSE", path + ":" + std::to_string(line_no) + ": " + e.what(), line_no);
    }
    try {
      fn(j, line_no);
    } catch (const nlohmann::json::exception& e) {
      throw RecordError("PARSE", path + ":" + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  if (in.bad()) throw RecordError("IO", "read failure on '" + path + "'");
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RecordError("IO", "cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw RecordError("IO", "write failure on '" + path + "'");
}

}  // namespace detail

inline std::vector<ArticleRecord> load_records(const std::string& path) {
  std::vector<ArticleRecord> out;
  detail::for_each_jsonl_line(path, [&](const nlohmann::json& j, std::size_t line) {
    out.push_back(record_from_json(j, line));
  });
  return out;
}

inline void save_records(const std::vector<ArticleRecord>& records, const std::string& path) {
  std::string buf;
  for (const auto& r : records) {
    buf += to_json(r).dump();
    buf += '\n';
  }
  detail::write_text_file(path, buf);
}

// --- DetectionEvidence -------------------------------------------------------

struct DetectionEvidence {
  std::string article_id;
  OaStatus verdict = OaStatus::UNKNOWN;
  std::optional<std::string> url;
  std::optional<std::int64_t> match_head_offset;
  std::optional<std::string> match_tail_marker;
  int depth = 0;
  std::string timestamp;
  // Why a NOA/UNKNOWN verdict was reached (e.g. "EXHAUSTED", "ALL_PROVIDERS_FAILED").
  std::optional<std::string> reason;
  bool low_confidence = false;

  bool operator==(const DetectionEvidence&) const = default;
};

inline nlohmann::ordered_json to_json(const DetectionEvidence& e) {
  nlohmann::ordered_json j;
  j["article_id"] = e.article_id;
  j["verdict"] = std::string(to_string(e.verdict));
  if (e.url) j["url"] = *e.url;
  if (e.match_head_offset) j["match_head_offset"] = *e.match_head_offset;
  if (e.match_tail_marker) j["match_tail_marker"] = *e.match_tail_marker;
  j["depth"] = e.depth;
  j["timestamp"] = e.timestamp;
  if (e.reason) j["reason"] = *e.reason;
  if (e.low_confidence) j["low_confidence"] = true;
  return j;
}

inline DetectionEvidence evidence_from_json(const nlohmann::json& j, std::size_t line = 0) {
  using detail::required;
  if (!j.is_object()) throw RecordError("PARSE", "line is not a JSON object", line);
  auto is_str = [](const nlohmann::json& v) { return v.is_string(); };
  auto is_int = [](const nlohmann::json& v) { return v.is_number_integer(); };

  DetectionEvidence e;
  e.article_id = required(j, "article_id", line, is_str)->get<std::string>();
  auto verdict = parse_oa_status(required(j, "verdict", line, is_str)->get<std::string>());
  if (!verdict)
    throw RecordError("VALIDATION", "verdict must be OA, NOA or UNKNOWN", line, "verdict",
                      e.article_id);
  e.verdict = *verdict;
  if (auto it = j.find("url"); it != j.end()) e.url = it->get<std::string>();
  if (auto it = j.find("match_head_offset"); it != j.end())
    e.match_head_offset = it->get<std::int64_t>();
  if (auto it = j.find("match_tail_marker"); it != j.end())
    e.match_tail_marker = it->get<std::string>();
  e.depth = required(j, "depth", line, is_int)->get<int>();
  e.timestamp = required(j, "timestamp", line, is_str)->get<std::string>();
  if (auto it = j.find("reason"); it != j.end()) e.reason = it->get<std::string>();
  if (auto it = j.find("low_confidence"); it != j.end()) e.low_confidence = it->get<bool>();

  if (e.verdict == OaStatus::OA && !e.url)
    throw RecordError("VALIDATION", "OA evidence must carry a url", line, "url", e.article_id);
  if (e.depth < 0)
    throw RecordError("VALIDATION", "depth must be >= 0", line, "depth", e.article_id);
  return e;
}

inline void save_detections(const std::vector<DetectionEvidence>& evidence,
                            const std::string& path) {
  std::string buf;
  for (const auto& e : evidence) {
    buf += to_json(e).dump();
    buf += '\n';
  }
  detail::write_text_file(path, buf);
}

inline std::vector<DetectionEvidence> load_detections(const std::string& path) {
  std::vector<DetectionEvidence> out;
  detail::for_each_jsonl_line(path, [&](const nlohmann::json& j, std::size_t line) {
    out.push_back(evidence_from_json(j, line));
  });
  return out;
}

}  // namespace oacite
