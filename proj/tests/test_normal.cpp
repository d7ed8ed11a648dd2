#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "robustsi/errors.h"
#include "robustsi/interval_set.h"
#include "robustsi/normal.h"
#include "support/quadrature.h"

using robustsi::GaussianParams;
using robustsi::IntervalSet;
using robustsi::interval_union;
using robustsi::normal_cdf;
using robustsi::normal_upper_tail;
using robustsi::truncated_normal_cdf;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_SUITE("normal") {

TEST_CASE("standard normal CDF at zero") {
  CHECK(normal_cdf(0.0) == 0.5);
}

TEST_CASE("CDF symmetry identity") {
  for (double x : {0.1, 0.5, 1.0, 2.5, 4.0, 6.5, 7.9}) {
    CHECK(normal_cdf(x) + normal_cdf(-x) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("97.5% quantile against the quadrature oracle") {
  const double x = 1.959963985;
  const double oracle = 0.5 + oracles::normal_mass_quadrature_std(0.0, x);
  CHECK(std::abs(normal_cdf(x) - 0.975) < 1e-9);
  CHECK(std::abs(normal_cdf(x) - oracle) < 1e-12);
}

TEST_CASE("upper tail stays accurate far out") {
  // Reference: the log-tail evaluation must splice continuously into the
  // asymptotic branch and agree with quadrature in the mid range.
  for (double x : {5.0, 10.0, 20.0, 29.9, 30.1, 35.0}) {
    const double q = oracles::normal_mass_quadrature_std(x, 42.0);
    CHECK(robustsi::log_normal_upper_tail(x) ==
          doctest::Approx(std::log(q)).epsilon(1e-11));
  }
  CHECK(std::isfinite(robustsi::log_normal_upper_tail(100.0)));
  CHECK(robustsi::log_normal_upper_tail(100.0) < -5000.0);
}

TEST_CASE("truncation to the whole line reduces to the normal CDF") {
  const GaussianParams params(0.7, 2.25);
  const IntervalSet line = IntervalSet::entire_line();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> xs(-6.0, 6.0);
  CHECK(truncated_normal_cdf(GaussianParams(0, 1), line, 0.0) == 0.5);
  for (int i = 0; i < 200; ++i) {
    const double x = xs(rng);
    const double expected = normal_cdf((x - 0.7) / 1.5);
    CHECK(truncated_normal_cdf(params, line, x) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("half-line truncation pins the lower endpoint to zero") {
  const IntervalSet z(0.0, kInf);
  CHECK(truncated_normal_cdf(GaussianParams(0, 1), z, 0.0) == 0.0);
  CHECK(truncated_normal_cdf(GaussianParams(0, 1), z, kInf) == 1.0);
}

TEST_CASE("two-piece region splits mass by the quadrature ratio") {
  const IntervalSet z = interval_union(IntervalSet(-1, 1), IntervalSet(2, 3));
  const double m1 = oracles::normal_mass_quadrature_std(-1, 1);
  const double m2 = oracles::normal_mass_quadrature_std(2, 3);
  const double got = truncated_normal_cdf(GaussianParams(0, 1), z, 1.0);
  CHECK(std::abs(got - m1 / (m1 + m2)) < 1e-10);
}

TEST_CASE("mass additivity under splitting a piece") {
  const GaussianParams params(0.3, 4.0);
  const IntervalSet whole = interval_union(IntervalSet(-2, 3), IntervalSet(5, 8));
  const IntervalSet split = interval_union(
      interval_union(IntervalSet(-2, 0.75), IntervalSet(0.75, 3)),
      IntervalSet(5, 8));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> xs(-3.0, 9.0);
  for (int i = 0; i < 100; ++i) {
    const double x = xs(rng);
    CHECK(truncated_normal_cdf(params, whole, x) ==
          doctest::Approx(truncated_normal_cdf(params, split, x))
              .epsilon(1e-12));
  }
}

TEST_CASE("monotone in x with saturation outside the region") {
  const IntervalSet z = interval_union(IntervalSet(-1, 1), IntervalSet(4, 5));
  const GaussianParams params(0, 1);
  double prev = -1.0;
  for (double x = -3.0; x <= 7.0; x += 0.01) {
    const double v = truncated_normal_cdf(params, z, x);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
  CHECK(truncated_normal_cdf(params, z, -1.5) == 0.0);
  CHECK(truncated_normal_cdf(params, z, 6.0) == 1.0);
}

TEST_CASE("pieces far in the tail agree with quadrature to 1e-10") {
  // Pieces centered ~12 sigma out, including a very short one.
  const GaussianParams params(1.0, 4.0);  // sd = 2
  const IntervalSet z = interval_union(
      interval_union(IntervalSet(23.0, 24.0), IntervalSet(25.0, 25.0 + 1e-7)),
      IntervalSet(26.0, 27.5));
  for (double x : {23.4, 24.9, 25.0 + 5e-8, 26.7}) {
    const double got = truncated_normal_cdf(params, z, x);
    const double want = oracles::truncated_cdf_quadrature(1.0, 4.0, z, x);
    CHECK(std::abs(got - want) < 1e-10);
  }
}

TEST_CASE("random multi-piece regions match quadrature") {
  std::mt19937_64 rng(20240916);
  std::uniform_real_distribution<double> mean_d(-2.0, 2.0);
  std::uniform_real_distribution<double> sd_d(0.4, 3.0);
  std::uniform_real_distribution<double> off(-14.0, 14.0);
  std::uniform_real_distribution<double> width(1e-8, 2.0);
  for (int rep = 0; rep < 25; ++rep) {
    const double m = mean_d(rng), sd = sd_d(rng);
    std::vector<robustsi::Interval> pieces;
    for (int k = 0; k < 4; ++k) {
      const double lo = m + sd * off(rng);
      pieces.push_back({lo, lo + sd * width(rng)});
    }
    const IntervalSet z = IntervalSet::from_intervals(pieces);
    std::uniform_real_distribution<double> xs(z.min(), z.max());
    const double x = xs(rng);
    const double got = truncated_normal_cdf(GaussianParams(m, sd * sd), z, x);
    const double want = oracles::truncated_cdf_quadrature(m, sd * sd, z, x);
    CHECK(std::abs(got - want) < 1e-10);
  }
}

TEST_CASE("vanishing mass raises ZeroMassRegion") {
  const IntervalSet far(40.0, 41.0);  // Q(40) ~ 1e-350
  CHECK_THROWS_AS(truncated_normal_cdf(GaussianParams(0, 1), far, 40.5),
                  robustsi::ZeroMassRegion);
  CHECK_THROWS_AS(
      truncated_normal_cdf(GaussianParams(0, 1), IntervalSet::empty_set(), 0),
      robustsi::ZeroMassRegion);
}

TEST_CASE("the unchecked variant keeps ratios meaningful past the floor") {
  const IntervalSet far(40.0, 41.0);
  const double v = robustsi::detail::truncated_normal_cdf_unchecked(
      GaussianParams(0, 1), far, 40.001);
  CHECK(v > 0.0);
  CHECK(v < 1.0);
  CHECK(std::isfinite(v));
}

TEST_CASE("invalid variance is rejected") {
  CHECK_THROWS_AS(GaussianParams(0.0, 0.0), robustsi::NumericalFailure);
  CHECK_THROWS_AS(GaussianParams(0.0, -1.0), robustsi::NumericalFailure);
}

}  // TEST_SUITE
