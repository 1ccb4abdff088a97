#pragma once

// Citation analytics over records with resolved OA status: exclusion rules,
// percent OA, within-issue citation advantage aggregated upward, and
// citation-range cohort tables.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oacite/expected.hpp"
#include "oacite/records.hpp"
#include "oacite/stats.hpp"

namespace oacite::metrics {

using stats::summary_stats;
using stats::SummaryStats;

class MetricsError : public Error {
 public:
  using Error::Error;
};

enum class Dimension { Discipline, Country, Year, Journal };

inline std::string_view to_string(Dimension d) {
  switch (d) {
    case Dimension::Discipline: return "discipline";
    case Dimension::Country: return "country";
    case Dimension::Year: return "year";
    case Dimension::Journal: return "journal";
  }
  return "discipline";
}

inline Dimension parse_dimension(std::string_view s) {
  if (s == "discipline") return Dimension::Discipline;
  if (s == "country") return Dimension::Country;
  if (s == "year") return Dimension::Year;
  if (s == "journal") return Dimension::Journal;
  throw MetricsError("INVALID_DIMENSION", "unknown dimension '" + std::string(s) + "'");
}

inline constexpr Dimension kAllDimensions[] = {Dimension::Discipline, Dimension::Country,
                                               Dimension::Year, Dimension::Journal};

inline std::string group_key(const ArticleRecord& r, Dimension d) {
  switch (d) {
    case Dimension::Discipline: return r.discipline;
    case Dimension::Country: return r.country;
    case Dimension::Year: return std::to_string(r.year);
    case Dimension::Journal: return r.journal_id;
  }
  return {};
}

inline void require_resolved(std::span<const ArticleRecord> records) {
  for (const auto& r : records)
    if (r.oa_status == OaStatus::UNKNOWN)
      throw MetricsError("UNKNOWN_STATUS", "record '" + r.id +
                                               "' has UNKNOWN OA status; run detection first "
                                               "(or drop UNKNOWN records explicitly)");
}

// --- exclusions -------------------------------------------------------------------

// The first two drop records from every analysis; the last two only keep an
// issue out of the advantage averages.
enum class ExclusionReason { ALL_OA_JOURNAL, ALL_OA_ISSUE, ALL_NOA_ISSUE, ZERO_NOA_CITATIONS };

inline std::string_view to_string(ExclusionReason r) {
  switch (r) {
    case ExclusionReason::ALL_OA_JOURNAL: return "ALL_OA_JOURNAL";
    case ExclusionReason::ALL_OA_ISSUE: return "ALL_OA_ISSUE";
    case ExclusionReason::ALL_NOA_ISSUE: return "ALL_NOA_ISSUE";
    case ExclusionReason::ZERO_NOA_CITATIONS: return "ZERO_NOA_CITATIONS";
  }
  return "ALL_OA_JOURNAL";
}

struct ExclusionEntry {
  ExclusionReason reason;
  std::string key;  // journal_id or issue_key
  std::size_t n_records = 0;

  bool operator==(const ExclusionEntry&) const = default;
};

struct ExclusionResult {
  std::vector<ArticleRecord> kept;   // input order preserved
  std::vector<ExclusionEntry> log;   // journals first, then issues, each sorted by key
};

// Drops all-OA journals, then issues that are all-OA among what remains.
inline ExclusionResult apply_exclusions(std::span<const ArticleRecord> records) {
  require_resolved(records);
  std::map<std::string, std::pair<std::size_t, std::size_t>> by_journal;  // (n, n_oa)
  for (const auto& r : records) {
    auto& [n, n_oa] = by_journal[r.journal_id];
    ++n;
    n_oa += r.oa_status == OaStatus::OA;
  }
  ExclusionResult out;
  std::set<std::string> dropped_journals;
  for (const auto& [j, c] : by_journal)
    if (c.first == c.second) {
      dropped_journals.insert(j);
      out.log.push_back({ExclusionReason::ALL_OA_JOURNAL, j, c.first});
    }

  std::map<std::string, std::pair<std::size_t, std::size_t>> by_issue;
  for (const auto& r : records) {
    if (dropped_journals.count(r.journal_id)) continue;
    auto& [n, n_oa] = by_issue[r.issue_key];
    ++n;
    n_oa += r.oa_status == OaStatus::OA;
  }
  std::set<std::string> dropped_issues;
  for (const auto& [i, c] : by_issue)
    if (c.first == c.second) {
      dropped_issues.insert(i);
      out.log.push_back({ExclusionReason::ALL_OA_ISSUE, i, c.first});
    }

  for (const auto& r : records)
    if (!dropped_journals.count(r.journal_id) && !dropped_issues.count(r.issue_key))
      out.kept.push_back(r);
  return out;
}

// Whole issues (after apply_exclusions) whose ratio is undefined: no OA
// members, or NOA members without a single citation. Sorted by issue key.
inline std::vector<ExclusionEntry> advantage_exclusions(std::span<const ArticleRecord> records) {
  require_resolved(records);
  struct Tally {
    std::size_t n = 0, n_oa = 0;
    std::int64_t noa_citations = 0;
  };
  std::map<std::string, Tally> by_issue;
  for (const auto& r : records) {
    Tally& t = by_issue[r.issue_key];
    ++t.n;
    if (r.oa_status == OaStatus::OA) ++t.n_oa;
    else t.noa_citations += r.citation_count;
  }
  std::vector<ExclusionEntry> out;
  for (const auto& [i, t] : by_issue) {
    if (t.n_oa == t.n) continue;  // apply_exclusions' business
    if (t.n_oa == 0) out.push_back({ExclusionReason::ALL_NOA_ISSUE, i, t.n});
    else if (t.noa_citations == 0) out.push_back({ExclusionReason::ZERO_NOA_CITATIONS, i, t.n});
  }
  return out;
}

// --- percent OA -----------------------------------------------------------------

struct OAShareReport {
  std::string key;
  std::size_t n_oa = 0;
  std::size_t n_noa = 0;

  std::size_t n_total() const noexcept { return n_oa + n_noa; }
  double percent_oa() const noexcept {
    return n_total() == 0 ? 0.0 : static_cast<double>(n_oa) / static_cast<double>(n_total());
  }
};

// One row per group present in the input, sorted by key.
inline std::vector<OAShareReport> percent_oa(std::span<const ArticleRecord> records, Dimension d) {
  require_resolved(records);
  std::map<std::string, OAShareReport> groups;
  for (const auto& r : records) {
    auto& g = groups[group_key(r, d)];
    (r.oa_status == OaStatus::OA ? g.n_oa : g.n_noa) += 1;
  }
  std::vector<OAShareReport> out;
  for (auto& [k, g] : groups) {
    g.key = k;
    out.push_back(g);
  }
  return out;
}

// --- citation advantage --------------------------------------------------------

struct IssueStats {
  std::string issue_key;
  std::string journal_id;
  std::size_t n_oa = 0;
  std::size_t n_noa = 0;
  double mean_cit_oa = 0.0;   // 0 when n_oa == 0
  double mean_cit_noa = 0.0;  // 0 when n_noa == 0
};

enum class IssueExclusion { ALL_OA_ISSUE, ALL_NOA_ISSUE, ZERO_NOA_CITATIONS };

inline std::string_view to_string(IssueExclusion e) {
  switch (e) {
    case IssueExclusion::ALL_OA_ISSUE: return "ALL_OA_ISSUE";
    case IssueExclusion::ALL_NOA_ISSUE: return "ALL_NOA_ISSUE";
    case IssueExclusion::ZERO_NOA_CITATIONS: return "ZERO_NOA_CITATIONS";
  }
  return "ALL_OA_ISSUE";
}

struct IssueAdvantage {
  IssueStats stats;
  std::optional<double> ratio;               // set iff includable
  std::optional<IssueExclusion> excluded;    // set iff not includable
};

inline IssueStats issue_stats(std::span<const ArticleRecord> issue) {
  if (issue.empty()) throw MetricsError("EMPTY_ISSUE", "issue has no records");
  require_resolved(issue);
  IssueStats s;
  s.issue_key = issue.front().issue_key;
  s.journal_id = issue.front().journal_id;
  double sum_oa = 0.0, sum_noa = 0.0;
  for (const auto& r : issue) {
    if (r.issue_key != s.issue_key)
      throw MetricsError("MIXED_ISSUES", "records from issues '" + s.issue_key + "' and '" +
                                             r.issue_key + "' passed as one issue");
    if (r.oa_status == OaStatus::OA) {
      ++s.n_oa;
      sum_oa += static_cast<double>(r.citation_count);
    } else {
      ++s.n_noa;
      sum_noa += static_cast<double>(r.citation_count);
    }
  }
  if (s.n_oa) s.mean_cit_oa = sum_oa / static_cast<double>(s.n_oa);
  if (s.n_noa) s.mean_cit_noa = sum_noa / static_cast<double>(s.n_noa);
  return s;
}

// (mean_oa - mean_noa) / mean_noa for a mixed issue with cited NOA articles.
inline IssueAdvantage issue_advantage(std::span<const ArticleRecord> issue) {
  IssueAdvantage a;
  a.stats = issue_stats(issue);
  if (a.stats.n_noa == 0) a.excluded = IssueExclusion::ALL_OA_ISSUE;
  else if (a.stats.n_oa == 0) a.excluded = IssueExclusion::ALL_NOA_ISSUE;
  else if (!(a.stats.mean_cit_noa > 0.0)) a.excluded = IssueExclusion::ZERO_NOA_CITATIONS;
  else a.ratio = (a.stats.mean_cit_oa - a.stats.mean_cit_noa) / a.stats.mean_cit_noa;
  return a;
}

enum class Weighting { Unweighted, ArticleWeighted };

inline Weighting parse_weighting(std::string_view s) {
  if (s == "unweighted") return Weighting::Unweighted;
  if (s == "article") return Weighting::ArticleWeighted;
  throw MetricsError("INVALID_WEIGHTING", "weighting must be 'unweighted' or 'article'");
}

struct AdvantageReport {
  std::string key;
  std::optional<double> advantage;  // unset when NO_DATA
  std::size_t n_journals = 0;       // journals contributing at least one included issue
  std::size_t n_issues_included = 0;
  std::size_t n_issues_excluded = 0;
  std::size_t excluded_all_oa = 0;
  std::size_t excluded_all_noa = 0;
  std::size_t excluded_zero_noa_citations = 0;

  bool no_data() const noexcept { return !advantage.has_value(); }
  std::string_view status() const noexcept { return no_data() ? "NO_DATA" : "OK"; }
};

// Issue ratios are averaged to their journal, journals to the group.
// Unweighted: plain means at both levels. ArticleWeighted: issues weighted
// by article count, journals by their included article count.
inline std::vector<AdvantageReport> aggregate_advantage(std::span<const ArticleRecord> records,
                                                        Dimension d,
                                                        Weighting w = Weighting::Unweighted) {
  require_resolved(records);
  // group -> journal -> issue -> records
  std::map<std::string, std::map<std::string, std::map<std::string, std::vector<ArticleRecord>>>>
      tree;
  for (const auto& r : records) tree[group_key(r, d)][r.journal_id][r.issue_key].push_back(r);

  std::vector<AdvantageReport> out;
  for (const auto& [key, journals] : tree) {
    AdvantageReport rep;
    rep.key = key;
    double group_sum = 0.0, group_weight = 0.0;
    for (const auto& [journal, issues] : journals) {
      double journal_sum = 0.0, journal_weight = 0.0;
      for (const auto& [issue, members] : issues) {
        const IssueAdvantage a = issue_advantage(members);
        if (a.excluded) {
          ++rep.n_issues_excluded;
          switch (*a.excluded) {
            case IssueExclusion::ALL_OA_ISSUE: ++rep.excluded_all_oa; break;
            case IssueExclusion::ALL_NOA_ISSUE: ++rep.excluded_all_noa; break;
            case IssueExclusion::ZERO_NOA_CITATIONS: ++rep.excluded_zero_noa_citations; break;
          }
          continue;
        }
        ++rep.n_issues_included;
        const double weight = w == Weighting::Unweighted ? 1.0 : static_cast<double>(members.size());
        journal_sum += weight * *a.ratio;
        journal_weight += weight;
      }
      if (journal_weight == 0.0) continue;
      ++rep.n_journals;
      const double weight = w == Weighting::Unweighted ? 1.0 : journal_weight;
      group_sum += weight * (journal_sum / journal_weight);
      group_weight += weight;
    }
    if (group_weight > 0.0) rep.advantage = group_sum / group_weight;
    out.push_back(std::move(rep));
  }
  return out;
}

// All records as one group (key "all").
inline AdvantageReport overall_advantage(std::span<const ArticleRecord> records,
                                         Weighting w = Weighting::Unweighted) {
  std::vector<ArticleRecord> relabeled(records.begin(), records.end());
  for (auto& r : relabeled) r.discipline = "all";
  auto reps = aggregate_advantage(relabeled, Dimension::Discipline, w);
  if (reps.empty()) {
    AdvantageReport empty;
    empty.key = "all";
    return empty;
  }
  return reps.front();
}

// --- cohorts ----------------------------------------------------------------------

struct CohortCell {
  CitationRange range = CitationRange::R0;
  std::uint64_t n_oa = 0;   // OA articles in this range
  std::uint64_t n_noa = 0;
  std::optional<double> oa_c;   // share of the OA population; unset if it is empty
  std::optional<double> noa_c;
  std::optional<double> total_c;  // share of all articles
  std::optional<double> ratio;    // oa_c / noa_c; unset when noa_c is 0 or undefined
  std::optional<double> delta;    // (oa_c - noa_c) / noa_c
};

struct CohortRow {
  std::optional<int> year;  // unset for the pooled row
  std::uint64_t n_oa = 0;
  std::uint64_t n_noa = 0;
  std::array<CohortCell, kAllCitationRanges.size()> cells{};

  std::uint64_t n_total() const noexcept { return n_oa + n_noa; }
  double percent_oa() const noexcept {
    return n_total() ? static_cast<double>(n_oa) / static_cast<double>(n_total()) : 0.0;
  }
  const CohortCell& cell(CitationRange c) const { return cells[index_of(c)]; }
};

struct CohortTable {
  std::vector<CohortRow> rows;  // ascending year, or a single pooled row
};

using RangeCounts = std::array<std::uint64_t, kAllCitationRanges.size()>;

inline CohortRow cohort_from_counts(std::optional<int> year, const RangeCounts& oa,
                                    const RangeCounts& noa) {
  CohortRow row;
  row.year = year;
  for (std::size_t i = 0; i < oa.size(); ++i) {
    row.n_oa += oa[i];
    row.n_noa += noa[i];
  }
  const auto share = [](std::uint64_t part, std::uint64_t whole) -> std::optional<double> {
    if (whole == 0) return std::nullopt;
    return static_cast<double>(part) / static_cast<double>(whole);
  };
  for (std::size_t i = 0; i < oa.size(); ++i) {
    CohortCell& c = row.cells[i];
    c.range = kAllCitationRanges[i];
    c.n_oa = oa[i];
    c.n_noa = noa[i];
    c.oa_c = share(oa[i], row.n_oa);
    c.noa_c = share(noa[i], row.n_noa);
    c.total_c = share(oa[i] + noa[i], row.n_total());
    if (c.oa_c && c.noa_c && *c.noa_c > 0.0) {
      c.ratio = *c.oa_c / *c.noa_c;
      c.delta = (*c.oa_c - *c.noa_c) / *c.noa_c;
    }
  }
  return row;
}

inline CohortTable cohort_table(std::span<const ArticleRecord> records, bool per_year) {
  require_resolved(records);
  std::map<std::optional<int>, std::pair<RangeCounts, RangeCounts>> counts;
  for (const auto& r : records) {
    const std::optional<int> key = per_year ? std::optional<int>(r.year) : std::nullopt;
    auto& [oa, noa] = counts[key];
    const std::size_t bin = index_of(bin_citations(static_cast<std::uint64_t>(r.citation_count)));
    (r.oa_status == OaStatus::OA ? oa : noa)[bin] += 1;
  }
  CohortTable t;
  for (const auto& [year, c] : counts) t.rows.push_back(cohort_from_counts(year, c.first, c.second));
  return t;
}

}  // namespace oacite::metrics
