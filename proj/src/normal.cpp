#include "robustsi/normal.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "robustsi/errors.h"

namespace robustsi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log sqrt(2*pi)
constexpr double kLogMassFloor = -690.77552789821368;   // log(1e-300)

// log Q via the divergent-but-asymptotic expansion
//   Q(x) = phi(x)/x * (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...),
// valid to full double precision for x >= 30.
double log_upper_tail_asymptotic(double x) {
  const double x2 = x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    term *= -(2.0 * k - 1.0) / x2;
    sum += term;
    if (std::abs(term) < 1e-18 * sum) break;
  }
  return -0.5 * x2 - std::log(x) - kLogSqrt2Pi + std::log(sum);
}

// log(Q(a) - Q(b)) for 0 <= a < b, both in the upper tail.
double log_diff_upper_tail(double a, double b) {
  const double la = log_normal_upper_tail(a);
  const double lb = log_normal_upper_tail(b);
  if (lb == -kInf) return la;
  const double r = lb - la;  // <= 0
  return la + std::log1p(-std::exp(r));
}

}  // namespace

GaussianParams::GaussianParams(double m, double v) : mean(m), variance(v) {
  if (!(v > 0.0) || !std::isfinite(v) || !std::isfinite(m)) {
    throw NumericalFailure("GaussianParams requires finite mean and variance > 0");
  }
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_upper_tail(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double log_normal_upper_tail(double x) {
  if (x == kInf) return -kInf;
  if (x == -kInf) return 0.0;
  if (x >= 30.0) return log_upper_tail_asymptotic(x);
  const double q = normal_upper_tail(x);
  return std::log(q);
}

namespace detail {

double log_mass_standard(double lo, double hi) {
  if (lo >= hi) return -kInf;
  if (lo == -kInf && hi == kInf) return 0.0;
  if (lo == -kInf) return log_normal_upper_tail(-hi);
  if (hi == kInf) return log_normal_upper_tail(lo);

  const double w = hi - lo;
  const double c = 0.5 * (lo + hi);
  if (w * (1.0 + std::abs(c)) <= 0.01) {
    // Narrow piece: a difference of tail values would cancel. Midpoint
    // expansion of the integral, accurate to ~1e-13 relative at this width.
    const double c2 = c * c, w2 = w * w;
    const double corr = (c2 - 1.0) * w2 / 24.0 +
                        ((c2 - 6.0) * c2 + 3.0) * w2 * w2 / 1920.0;
    return -0.5 * c2 - kLogSqrt2Pi + std::log(w) + std::log1p(corr);
  }
  if (lo >= 0.0) return log_diff_upper_tail(lo, hi);
  if (hi <= 0.0) return log_diff_upper_tail(-hi, -lo);
  // Straddles the mean: both erf arguments are positive, no cancellation,
  // and the mass is bounded away from zero at this width.
  const double m = 0.5 * (std::erf(hi / kSqrt2) + std::erf(-lo / kSqrt2));
  return std::log(m);
}

namespace {

double truncated_cdf_impl(const GaussianParams& params, const IntervalSet& Z,
                          double x, bool enforce_mass_floor) {
  if (Z.empty()) throw ZeroMassRegion("truncation region is empty");
  const double s = std::sqrt(params.variance);

  const auto& pieces = Z.pieces();
  std::vector<double> lm(pieces.size());
  double lmax = -kInf;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const double lo = (pieces[k].lo - params.mean) / s;
    const double hi = (pieces[k].hi - params.mean) / s;
    lm[k] = log_mass_standard(lo, hi);
    lmax = std::max(lmax, lm[k]);
  }
  if (lmax == -kInf) {
    throw ZeroMassRegion("truncation region carries no Gaussian mass");
  }

  double den = 0.0, num = 0.0;
  const double xs = (x - params.mean) / s;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const double piece_mass = std::exp(lm[k] - lmax);
    den += piece_mass;
    const double lo = (pieces[k].lo - params.mean) / s;
    const double hi = (pieces[k].hi - params.mean) / s;
    if (xs >= hi) {
      num += piece_mass;
    } else if (xs > lo) {
      num += std::exp(log_mass_standard(lo, xs) - lmax);
    }
  }
  if (enforce_mass_floor) {
    // Total mass in natural units: exp(lmax) * den.
    if (lmax + std::log(den) < kLogMassFloor) {
      throw ZeroMassRegion("total truncated mass underflows 1e-300");
    }
  }
  return std::clamp(num / den, 0.0, 1.0);
}

}  // namespace

double truncated_normal_cdf_unchecked(const GaussianParams& params,
                                      const IntervalSet& Z, double x) {
  return truncated_cdf_impl(params, Z, x, false);
}

}  // namespace detail

double truncated_normal_cdf(const GaussianParams& params, const IntervalSet& Z,
                            double x) {
  return detail::truncated_cdf_impl(params, Z, x, true);
}

}  // namespace robustsi
