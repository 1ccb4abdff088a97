#pragma once

// CSV rendering of the analytics tables plus the year-series correlations.
// Column and row order are fixed, so identical input gives identical bytes.

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oacite/metrics.hpp"
#include "oacite/records.hpp"
#include "oacite/stats.hpp"

namespace oacite::report {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string fixed(double v, int decimals) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  // "-0.0" and "0.0" are the same number; print one of them.
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

inline std::string pct(double fraction) { return fixed(100.0 * fraction, 1); }
inline std::string pct(const std::optional<double>& f) { return f ? pct(*f) : std::string(); }

inline std::string general(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string join_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_field(fields[i]);
  }
  return line + "\n";
}

// --- tables -------------------------------------------------------------------------

inline std::string render_oa_share(std::span<const metrics::OAShareReport> rows,
                                   metrics::Dimension d) {
  std::string out = join_row({std::string(to_string(d)), "n_oa", "n_noa", "n_total", "percent_oa"});
  for (const auto& r : rows)
    out += join_row({r.key, std::to_string(r.n_oa), std::to_string(r.n_noa),
                     std::to_string(r.n_total()), pct(r.percent_oa())});
  return out;
}

inline std::string render_advantage(std::span<const metrics::AdvantageReport> rows,
                                    metrics::Dimension d) {
  std::string out = join_row({std::string(to_string(d)), "advantage_pct", "n_journals",
                              "n_issues_included", "n_issues_excluded", "excluded_all_oa",
                              "excluded_all_noa", "excluded_zero_noa_citations", "status"});
  for (const auto& r : rows)
    out += join_row({r.key, pct(r.advantage), std::to_string(r.n_journals),
                     std::to_string(r.n_issues_included), std::to_string(r.n_issues_excluded),
                     std::to_string(r.excluded_all_oa), std::to_string(r.excluded_all_noa),
                     std::to_string(r.excluded_zero_noa_citations), std::string(r.status())});
  return out;
}

inline std::string render_cohorts(const metrics::CohortTable& t) {
  std::string out = join_row({"year", "range", "n_total", "total_pct", "n_oa", "n_noa", "oa_c_pct",
                              "noa_c_pct", "ratio", "delta_pct"});
  for (const auto& row : t.rows) {
    const std::string year = row.year ? std::to_string(*row.year) : "all";
    for (const auto& c : row.cells)
      out += join_row({year, std::string(range_label(c.range)), std::to_string(c.n_oa + c.n_noa),
                       pct(c.total_c), std::to_string(c.n_oa), std::to_string(c.n_noa),
                       pct(c.oa_c), pct(c.noa_c), c.ratio ? fixed(*c.ratio, 4) : "",
                       pct(c.delta)});
  }
  return out;
}

inline std::string render_exclusions(std::span<const metrics::ExclusionEntry> log) {
  std::string out = join_row({"reason", "key", "n_records"});
  for (const auto& e : log)
    out += join_row({std::string(to_string(e.reason)), e.key, std::to_string(e.n_records)});
  return out;
}

struct SummaryRow {
  std::string metric;
  std::optional<stats::SummaryStats> stats;  // unset when there were no values
};

inline std::string render_summary(std::span<const SummaryRow> rows) {
  std::string out = join_row({"metric", "n", "mean", "median", "sd"});
  for (const auto& r : rows) {
    if (!r.stats) {
      out += join_row({r.metric, "0", "", "", ""});
      continue;
    }
    out += join_row({r.metric, std::to_string(r.stats->n), fixed(r.stats->mean, 4),
                     fixed(r.stats->median, 4), r.stats->sd ? fixed(*r.stats->sd, 4) : ""});
  }
  return out;
}

inline std::string render_sdt(const stats::ConfusionMatrix& m, const stats::SdtResult& s) {
  std::string out = join_row({"hits", "misses", "false_alarms", "correct_rejections", "hit_rate",
                              "fa_rate", "d_prime", "beta", "criterion_c", "correction_applied"});
  out += join_row({std::to_string(m.hits), std::to_string(m.misses),
                   std::to_string(m.false_alarms), std::to_string(m.correct_rejections),
                   fixed(s.hit_rate, 6), fixed(s.fa_rate, 6), fixed(s.d_prime, 6),
                   fixed(s.beta, 6), fixed(s.criterion_c, 6),
                   s.correction_applied ? "true" : "false"});
  return out;
}

// --- correlations --------------------------------------------------------------------

struct CorrelationRow {
  std::string pair;
  std::optional<stats::CorrelationResult> result;
  std::string note;  // why `result` is missing, or "p_below_floor"
};

inline CorrelationRow correlate(std::string pair, const std::vector<double>& xs,
                                const std::vector<double>& ys) {
  CorrelationRow row{std::move(pair), std::nullopt, {}};
  try {
    const double r = stats::pearson_r(xs, ys);
    row.result = stats::r_to_p(r, static_cast<std::int64_t>(xs.size()));
    if (row.result->p_below_floor) row.note = "p_below_floor";
  } catch (const stats::StatsError& e) {
    row.note = e.code();
  }
  return row;
}

// Year-level series: one point per year having includable data.
//   Yearly pairs: advantage, total articles, %OA and year against each other.
//   Per range c: OA_c x year and (OA_c / NOA_c) x year.
//   Pooled: OA_c / NOA_c x range index.
inline std::vector<CorrelationRow> correlations(std::span<const ArticleRecord> records,
                                                metrics::Weighting w) {
  const auto shares = metrics::percent_oa(records, metrics::Dimension::Year);
  const auto adv = metrics::aggregate_advantage(records, metrics::Dimension::Year, w);
  std::map<std::string, std::optional<double>> adv_by_year;
  for (const auto& a : adv) adv_by_year[a.key] = a.advantage;

  std::vector<double> year_all, total_all, oa_all;
  std::vector<double> year_adv, adv_v, total_adv, oa_adv;
  for (const auto& s : shares) {
    const double y = std::stod(s.key);
    year_all.push_back(y);
    total_all.push_back(static_cast<double>(s.n_total()));
    oa_all.push_back(s.percent_oa());
    if (auto it = adv_by_year.find(s.key); it != adv_by_year.end() && it->second) {
      year_adv.push_back(y);
      adv_v.push_back(*it->second);
      total_adv.push_back(static_cast<double>(s.n_total()));
      oa_adv.push_back(s.percent_oa());
    }
  }

  std::vector<CorrelationRow> out;
  out.push_back(correlate("advantage x year", adv_v, year_adv));
  out.push_back(correlate("advantage x total", adv_v, total_adv));
  out.push_back(correlate("advantage x percent_oa", adv_v, oa_adv));
  out.push_back(correlate("total x year", total_all, year_all));
  out.push_back(correlate("total x percent_oa", total_all, oa_all));
  out.push_back(correlate("percent_oa x year", oa_all, year_all));

  const auto yearly = metrics::cohort_table(records, true);
  for (CitationRange c : kAllCitationRanges) {
    std::vector<double> ys, oa_c, ys_ratio, ratio;
    for (const auto& row : yearly.rows) {
      const auto& cell = row.cell(c);
      if (cell.oa_c) {
        ys.push_back(*row.year);
        oa_c.push_back(*cell.oa_c);
      }
      if (cell.ratio) {
        ys_ratio.push_back(*row.year);
        ratio.push_back(*cell.ratio);
      }
    }
    const std::string label(range_label(c));
    out.push_back(correlate("oa_c[" + label + "] x year", oa_c, ys));
    out.push_back(correlate("oa_c/noa_c[" + label + "] x year", ratio, ys_ratio));
  }

  const auto pooled = metrics::cohort_table(records, false);
  std::vector<double> idx, ratio;
  if (!pooled.rows.empty())
    for (const auto& cell : pooled.rows.front().cells)
      if (cell.ratio) {
        idx.push_back(static_cast<double>(index_of(cell.range)));
        ratio.push_back(*cell.ratio);
      }
  out.push_back(correlate("oa_c/noa_c x range (pooled)", ratio, idx));
  return out;
}

inline std::string render_correlations(std::span<const CorrelationRow> rows) {
  std::string out = join_row({"pair", "r", "n", "t", "df", "p_two", "p_one", "note"});
  for (const auto& row : rows) {
    if (!row.result) {
      out += join_row({row.pair, "", "", "", "", "", "", row.note});
      continue;
    }
    const auto& c = *row.result;
    out += join_row({row.pair, fixed(c.r, 6), std::to_string(c.n), general(c.t_stat),
                     std::to_string(c.df), general(c.p_two_tailed), general(c.p_one_tailed),
                     row.note});
  }
  return out;
}

}  // namespace oacite::report
