#pragma once

// Reference computations for tests. None of these share code with the
// library: integrals are done by adaptive Simpson quadrature, inverses by
// bisection, and report figures by direct recounts over raw records.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "oacite/records.hpp"

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb, double whole, double eps, int depth) {
  const double m = (a + b) / 2, lm = (a + m) / 2, rm = (m + b) / 2;
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15 * eps)
    return left + right + (left + right - whole) / 15;
  return simpson(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, eps / 2, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps = 1e-13) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f((a + b) / 2);
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), eps, 50);
}

// Standard normal CDF by quadrature of the density.
inline double normal_cdf(double x) {
  const double k = 1.0 / std::sqrt(2.0 * M_PI);
  const double half = integrate([&](double t) { return k * std::exp(-t * t / 2); }, 0.0,
                                std::fabs(x));
  return x >= 0 ? 0.5 + half : 0.5 - half;
}

// Inverse of the closed-form erfc-based CDF by bisection.
inline double probit(double p) {
  auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2;
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

// Two-tailed p of a Student t statistic by quadrature of the t density.
inline double t_two_tailed(double t, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) /
                   std::sqrt(df * M_PI);
  auto density = [&](double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
  const double body = integrate(density, 0.0, std::fabs(t));
  return std::max(0.0, 1.0 - 2.0 * body);
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const long double n = static_cast<long double>(x.size());
  long double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  const long double mx = sx / n, my = sy / n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

struct Sdt {
  double d_prime, beta;
};

inline Sdt sdt(double h, double m, double fa, double cr) {
  const double zh = probit(h / (h + m)), zf = probit(fa / (fa + cr));
  const double k = 1.0 / std::sqrt(2.0 * M_PI);
  // beta as the ratio of the signal and noise densities at the criterion.
  const double crit = -zf;
  const double signal = k * std::exp(-(crit - (zh - zf)) * (crit - (zh - zf)) / 2);
  const double noise = k * std::exp(-crit * crit / 2);
  return {zh - zf, signal / noise};
}

// --- metrics by direct recomputation ---------------------------------------------------

inline bool is_oa(const oacite::ArticleRecord& r) { return r.oa_status == oacite::OaStatus::OA; }

// Unweighted issue -> journal -> group mean over includable issues (mixed
// membership, NOA mean > 0), after dropping all-OA journals and all-OA issues.
inline std::map<std::string, double> advantage(
    const std::vector<oacite::ArticleRecord>& records,
    const std::function<std::string(const oacite::ArticleRecord&)>& group_of) {
  std::set<std::string> all_oa_journals, all_oa_issues;
  std::set<std::string> journals;
  for (const auto& r : records) journals.insert(r.journal_id);
  for (const auto& j : journals) {
    bool all = true;
    for (const auto& r : records)
      if (r.journal_id == j && !is_oa(r)) all = false;
    if (all) all_oa_journals.insert(j);
  }
  std::set<std::string> issues;
  for (const auto& r : records)
    if (!all_oa_journals.count(r.journal_id)) issues.insert(r.issue_key);
  for (const auto& i : issues) {
    bool all = true;
    for (const auto& r : records)
      if (r.issue_key == i && !is_oa(r)) all = false;
    if (all) all_oa_issues.insert(i);
  }

  std::set<std::string> groups;
  for (const auto& r : records) groups.insert(group_of(r));
  std::map<std::string, double> out;
  for (const auto& g : groups) {
    std::vector<double> journal_means;
    for (const auto& j : journals) {
      if (all_oa_journals.count(j)) continue;
      std::vector<double> ratios;
      for (const auto& i : issues) {
        if (all_oa_issues.count(i)) continue;
        double s_oa = 0, s_noa = 0;
        int n_oa = 0, n_noa = 0;
        for (const auto& r : records) {
          if (r.issue_key != i || r.journal_id != j || group_of(r) != g) continue;
          if (is_oa(r)) s_oa += r.citation_count, ++n_oa;
          else s_noa += r.citation_count, ++n_noa;
        }
        if (n_oa == 0 || n_noa == 0 || s_noa == 0) continue;
        const double m_oa = s_oa / n_oa, m_noa = s_noa / n_noa;
        ratios.push_back((m_oa - m_noa) / m_noa);
      }
      if (ratios.empty()) continue;
      double sum = 0;
      for (double x : ratios) sum += x;
      journal_means.push_back(sum / ratios.size());
    }
    if (journal_means.empty()) continue;
    double sum = 0;
    for (double x : journal_means) sum += x;
    out[g] = sum / journal_means.size();
  }
  return out;
}

// (mean OA citations - mean NOA citations) / mean NOA citations over everything.
inline double pooled_advantage(const std::vector<oacite::ArticleRecord>& records) {
  double s_oa = 0, s_noa = 0, n_oa = 0, n_noa = 0;
  for (const auto& r : records) {
    if (is_oa(r)) s_oa += r.citation_count, ++n_oa;
    else s_noa += r.citation_count, ++n_noa;
  }
  return (s_oa / n_oa - s_noa / n_noa) / (s_noa / n_noa);
}

inline int range_of(std::int64_t c) {
  if (c == 0) return 0;
  if (c == 1) return 1;
  if (c <= 3) return 2;
  if (c <= 7) return 3;
  if (c <= 15) return 4;
  return 5;
}

struct Histogram {
  std::vector<double> oa_share, noa_share;
};

inline Histogram cohort_histogram(const std::vector<oacite::ArticleRecord>& records) {
  std::vector<double> oa(6, 0), noa(6, 0);
  double n_oa = 0, n_noa = 0;
  for (const auto& r : records) {
    if (is_oa(r)) oa[range_of(r.citation_count)] += 1, n_oa += 1;
    else noa[range_of(r.citation_count)] += 1, n_noa += 1;
  }
  for (auto& x : oa) x /= n_oa;
  for (auto& x : noa) x /= n_noa;
  return {oa, noa};
}

}  // namespace oracle
