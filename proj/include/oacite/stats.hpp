#pragma once

// Statistics kernel: normal CDF and probit, Student-t tail probabilities,
// Pearson correlation, and single-point signal detection analysis.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oacite/expected.hpp"

namespace oacite::stats {

class StatsError : public Error {
 public:
  using Error::Error;
};

// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_pdf(double x) {
  constexpr double inv_sqrt_2pi = 0.39894228040143267794;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

// Inverse standard normal CDF. Wichura's AS241 (PPND16), relative accuracy
// about 1e-16 across the whole open interval.
inline double probit(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw StatsError("DOMAIN", "probit requires 0 < p < 1, got " + std::to_string(p));

  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }

  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double z;
  if (r <= 5.0) {
    r -= 1.6;
    z = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
              0.24178072517745061177) * r + 1.27045825245236838258) * r +
            3.64784832476320460504) * r + 5.7694972214606914055) * r +
          4.6303378461565452959) * r + 1.42343711074968357734) /
        (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
              0.0151986665636164571966) * r + 0.14810397642748007459) * r +
            0.68976733498510000455) * r + 1.6763848301838038494) * r +
          2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    z = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              0.0012426609473880784386) * r + 0.026532189526576123093) * r +
            0.29656057182850489123) * r + 1.7848265399172913358) * r +
          5.4637849111641143699) * r + 6.6579046435011037772) /
        (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
              1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
            0.0148753612908506148525) * r + 0.13692988092273580531) * r +
          0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -z : z;
}

// --- incomplete beta / Student t -------------------------------------------

namespace detail {

// Continued fraction for I_x(a, b), modified Lentz.
inline double incbeta_cf(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0) || !(x >= 0.0 && x <= 1.0))
    throw StatsError("DOMAIN", "regularized_incomplete_beta: invalid arguments");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(log_front) * detail::incbeta_cf(x, a, b) / a;
  return 1.0 - std::exp(log_front) * detail::incbeta_cf(1.0 - x, b, a) / b;
}

// P(T > t) for Student's t with `df` degrees of freedom.
inline double student_t_upper_tail(double t, double df) {
  if (!(df > 0.0)) throw StatsError("DOMAIN", "degrees of freedom must be positive");
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  const double half = 0.5 * regularized_incomplete_beta(df / (df + t * t), 0.5 * df, 0.5);
  return t >= 0.0 ? half : 1.0 - half;
}

inline double student_t_cdf(double t, double df) { return 1.0 - student_t_upper_tail(t, df); }

// --- correlation -------------------------------------------------------------

inline double pearson_r(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size())
    throw StatsError("LENGTH_MISMATCH", "pearson_r inputs differ in length (" +
                                            std::to_string(xs.size()) + " vs " +
                                            std::to_string(ys.size()) + ")");
  if (xs.size() < 3)
    throw StatsError("TOO_FEW_POINTS", "pearson_r needs at least 3 points");

  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw StatsError("ZERO_VARIANCE", "pearson_r input is constant");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct CorrelationResult {
  double r = 0.0;
  std::int64_t n = 0;
  double t_stat = 0.0;
  std::int64_t df = 0;
  double p_two_tailed = 1.0;
  double p_one_tailed = 1.0;
  // |r| == 1: p is below what a double can express; p fields hold the
  // smallest normal double.
  bool p_below_floor = false;
};

inline CorrelationResult r_to_p(double r, std::int64_t n) {
  if (!(r >= -1.0 && r <= 1.0)) throw StatsError("DOMAIN", "r must lie in [-1, 1]");
  if (n < 3) throw StatsError("TOO_FEW_POINTS", "r_to_p needs n >= 3");

  CorrelationResult out;
  out.r = r;
  out.n = n;
  out.df = n - 2;
  if (std::fabs(r) == 1.0) {
    out.t_stat = r > 0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
    out.p_two_tailed = std::numeric_limits<double>::min();
    out.p_one_tailed = std::numeric_limits<double>::min();
    out.p_below_floor = true;
    return out;
  }
  const double df = static_cast<double>(out.df);
  out.t_stat = r * std::sqrt(df / (1.0 - r * r));
  const double tail = student_t_upper_tail(std::fabs(out.t_stat), df);
  out.p_one_tailed = tail;
  out.p_two_tailed = std::min(1.0, 2.0 * tail);
  return out;
}

// --- signal detection --------------------------------------------------------

// hits: true OA called OA; misses: true OA called NOA;
// false_alarms: true NOA called OA; correct_rejections: true NOA called NOA.
struct ConfusionMatrix {
  std::int64_t hits = 0;
  std::int64_t misses = 0;
  std::int64_t false_alarms = 0;
  std::int64_t correct_rejections = 0;

  bool operator==(const ConfusionMatrix&) const = default;
};

// Builds the matrix from a hand-checked audit: `oa_tagged_truth[i]` is the
// true OA-ness of the i-th item the robot called OA, likewise for NOA.
inline ConfusionMatrix build_confusion_from_audit(std::span<const bool> oa_tagged_truth,
                                                  std::span<const bool> noa_tagged_truth) {
  if (oa_tagged_truth.empty() || noa_tagged_truth.empty())
    throw StatsError("EMPTY_SAMPLE", "both audit samples must be non-empty");
  ConfusionMatrix m;
  for (bool truly_oa : oa_tagged_truth) (truly_oa ? m.hits : m.false_alarms)++;
  for (bool truly_oa : noa_tagged_truth) (truly_oa ? m.misses : m.correct_rejections)++;
  return m;
}

struct SdtResult {
  double hit_rate = 0.0;
  double fa_rate = 0.0;
  double d_prime = 0.0;
  double beta = 1.0;
  double criterion_c = 0.0;
  bool correction_applied = false;
};

inline SdtResult sdt_analysis(const ConfusionMatrix& m) {
  if (m.hits < 0 || m.misses < 0 || m.false_alarms < 0 || m.correct_rejections < 0)
    throw StatsError("DEGENERATE_MATRIX", "confusion counts must be non-negative");
  if (m.hits + m.misses < 1 || m.false_alarms + m.correct_rejections < 1)
    throw StatsError("DEGENERATE_MATRIX",
                     "both the true-OA and true-NOA populations must be non-empty");

  double h = static_cast<double>(m.hits), mi = static_cast<double>(m.misses);
  double fa = static_cast<double>(m.false_alarms), cr = static_cast<double>(m.correct_rejections);
  SdtResult out;
  out.hit_rate = h / (h + mi);
  out.fa_rate = fa / (fa + cr);
  if (out.hit_rate == 0.0 || out.hit_rate == 1.0 || out.fa_rate == 0.0 || out.fa_rate == 1.0) {
    // log-linear correction
    h += 0.5, mi += 0.5, fa += 0.5, cr += 0.5;
    out.hit_rate = h / (h + mi);
    out.fa_rate = fa / (fa + cr);
    out.correction_applied = true;
  }
  const double zh = probit(out.hit_rate);
  const double zf = probit(out.fa_rate);
  out.d_prime = zh - zf;
  out.criterion_c = -(zh + zf) / 2.0;
  out.beta = std::exp((zf * zf - zh * zh) / 2.0);
  return out;
}

// --- descriptive -------------------------------------------------------------

struct SummaryStats {
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  std::optional<double> sd;  // sample SD (n - 1); absent for n == 1

  double sample_sd() const {
    if (!sd) throw StatsError("SD_UNDEFINED", "sample SD needs at least two values");
    return *sd;
  }
};

inline SummaryStats summary_stats(std::span<const double> values) {
  if (values.empty()) throw StatsError("EMPTY_INPUT", "summary_stats needs at least one value");
  SummaryStats s;
  s.n = values.size();
  const double n = static_cast<double>(s.n);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = s.n / 2;
  s.median = s.n % 2 == 1 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2.0;

  if (s.n >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

}  // namespace oacite::stats
