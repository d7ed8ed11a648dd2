#pragma once

#include "robustsi/interval_set.h"

namespace robustsi {

struct GaussianParams {
  double mean;
  double variance;  // must be strictly positive
  GaussianParams(double m, double v);
};

// Standard normal CDF, tail-stable (erfc-based). Absolute error below
// 1e-14 for |x| <= 8.
double normal_cdf(double x);

// Upper tail Q(x) = 1 - normal_cdf(x), computed without cancellation.
double normal_upper_tail(double x);

// log Q(x), finite for arbitrarily large x (asymptotic series beyond the
// erfc range). Used for piece masses of far-away truncation regions.
double log_normal_upper_tail(double x);

// CDF of the normal(params) distribution truncated to the region Z,
// evaluated at x: mass(Z ∩ (-inf, x]) / mass(Z). Piece masses are computed
// by differencing complementary tail probabilities in log space, never as
// 1 - Phi; short pieces use a midpoint expansion to avoid cancellation.
// Throws ZeroMassRegion when the total mass falls below 1e-300 (a window
// misconfiguration: the region sits implausibly far from the mean).
double truncated_normal_cdf(const GaussianParams& params, const IntervalSet& Z,
                            double x);

namespace detail {
// Same computation without the 1e-300 mass floor; ratios of log-space masses
// stay meaningful arbitrarily far from the mean. Confidence-interval
// inversion scans means up to ~40 sigma away and relies on this. Throws
// ZeroMassRegion only when the region is genuinely massless (empty or all
// pieces of zero width).
double truncated_normal_cdf_unchecked(const GaussianParams& params,
                                      const IntervalSet& Z, double x);
// log of the Gaussian mass of [lo, hi] under the standard normal.
double log_mass_standard(double lo, double hi);
}  // namespace detail

}  // namespace robustsi
