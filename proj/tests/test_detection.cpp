#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "robustsi/detection.h"
#include "robustsi/errors.h"
#include "robustsi/lad.h"
#include "support/instances.h"

using robustsi::DetectionRule;
using robustsi::IntervalSet;
using robustsi::OutlierSet;
using robustsi::PhiSegmentInfo;
using robustsi::ResidualPath;
using robustsi::TiePolicy;
using robustsi::detect;
using robustsi::detection_function_region;
using robustsi::event_region_over_path;
using robustsi::threshold_region;
using robustsi::topk_region;

namespace {

ResidualPath single_segment(const Eigen::VectorXd& f, const Eigen::VectorXd& g,
                            double lo, double hi) {
  ResidualPath path;
  path.z_lo = lo;
  path.z_hi = hi;
  path.segments.push_back({f, g});
  return path;
}

// Threshold detection functions expressed through the generic callback:
// phi_i = |f_i + g_i z| - xi, roots where the affine residual crosses +-xi.
robustsi::DetectionFunction threshold_callback(const ResidualPath& path,
                                               double xi) {
  return [&path, xi](std::size_t t, int i, double lo,
                     double hi) -> PhiSegmentInfo {
    const double f = path.segments[t].intercept(i);
    const double g = path.segments[t].slope(i);
    PhiSegmentInfo info;
    if (g != 0.0) {
      for (double target : {-xi, xi}) {
        const double r = (target - f) / g;
        if (r >= lo && r <= hi) info.roots.push_back(r);
      }
      std::sort(info.roots.begin(), info.roots.end());
    }
    const double mid = 0.5 * (lo + hi);
    info.midpoint_sign = std::abs(f + g * mid) - xi >= 0 ? 1 : -1;
    return info;
  };
}

}  // namespace

TEST_SUITE("detection") {

TEST_CASE("threshold picks large-magnitude residuals") {
  Eigen::VectorXd r(3);
  r << 0.5, -2.0, 0.1;
  const OutlierSet got = detect(r, DetectionRule::threshold(1.0));
  CHECK(got.indices == std::vector<int>{1});
}

TEST_CASE("top-K picks the K largest magnitudes") {
  Eigen::VectorXd r(3);
  r << 3, -1, 2;
  const OutlierSet got = detect(r, DetectionRule::top_k(2));
  CHECK(got.indices == std::vector<int>{0, 2});
}

TEST_CASE("top-K agrees with a full sort on random inputs") {
  std::mt19937_64 rng(71);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::VectorXd r = oracles::random_vector(11, rng);
    const int k = 1 + static_cast<int>(rng() % 9);
    const OutlierSet got = detect(r, DetectionRule::top_k(k));
    std::vector<int> order(11);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(r(a)) > std::abs(r(b));
    });
    std::vector<int> want(order.begin(), order.begin() + k);
    std::sort(want.begin(), want.end());
    CHECK(got.indices == want);
  }
}

TEST_CASE("an exact tie at the cut raises TieAtBoundary under Strict") {
  Eigen::VectorXd r(4);
  r << 3, 2, -2, 1;
  CHECK_THROWS_AS(detect(r, DetectionRule::top_k(2)), robustsi::TieAtBoundary);
  CHECK_NOTHROW(detect(r, DetectionRule::top_k(2), TiePolicy::Permissive));
}

TEST_CASE("threshold region of |z| >= 1 on [-2, 2]") {
  const IntervalSet got = threshold_region(0.0, 1.0, -2, 2, 1.0);
  REQUIRE(got.size() == 2);
  CHECK(got.pieces()[0].lo == -2);
  CHECK(got.pieces()[0].hi == doctest::Approx(-1.0));
  CHECK(got.pieces()[1].lo == doctest::Approx(1.0));
  CHECK(got.pieces()[1].hi == 2);
}

TEST_CASE("flat residual keeps or drops the whole segment") {
  CHECK(threshold_region(1.5, 0.0, -1, 1, 1.0) == IntervalSet(-1, 1));
  CHECK(threshold_region(0.5, 0.0, -1, 1, 1.0).empty());
}

TEST_CASE("threshold region matches |f+gz| >= xi on a dense grid") {
  std::mt19937_64 rng(72);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_real_distribution<double> xi_d(0.2, 2.0);
  for (int rep = 0; rep < 30; ++rep) {
    const double f = coef(rng), g = coef(rng), xi = xi_d(rng);
    const IntervalSet region = threshold_region(f, g, -3, 3, xi);
    for (int s = 0; s < 10000; ++s) {
      const double z = -3 + 6.0 * (s + 0.5) / 10000;
      bool near_edge = false;
      for (const auto& p : region.pieces()) {
        if (std::abs(z - p.lo) < 1e-9 || std::abs(z - p.hi) < 1e-9) {
          near_edge = true;
        }
      }
      if (near_edge) continue;
      CHECK(region.contains(z) == (std::abs(f + g * z) >= xi));
    }
  }
}

TEST_CASE("identical residuals always dominate weakly") {
  const IntervalSet got = topk_region(0.7, -0.2, 0.7, -0.2, -1, 2);
  CHECK(got == IntervalSet(-1, 2));
}

TEST_CASE("pairwise region of |z| >= 1 on [-3, 3]") {
  // r_i(z) = z against r_ip(z) = 1: alpha=1, beta=0, gamma=-1.
  const IntervalSet got = topk_region(0.0, 1.0, 1.0, 0.0, -3, 3);
  REQUIRE(got.size() == 2);
  CHECK(got.pieces()[0].lo == -3);
  CHECK(got.pieces()[0].hi == doctest::Approx(-1.0));
  CHECK(got.pieces()[1].lo == doctest::Approx(1.0));
  CHECK(got.pieces()[1].hi == 3);
}

TEST_CASE("degenerate linear comparison clips one side") {
  // alpha = 0 (equal slopes magnitude), beta < 0 keeps the left piece.
  // r_i = 1 - z, r_ip = 1 + z: alpha = 0, beta = -4, gamma = 0.
  const IntervalSet got = topk_region(1.0, -1.0, 1.0, 1.0, -2, 2);
  REQUIRE(got.size() == 1);
  CHECK(got.pieces()[0].lo == -2);
  CHECK(got.pieces()[0].hi == doctest::Approx(0.0));
}

TEST_CASE("roots outside the segment keep or drop it entirely") {
  // (3 + z)^2 - 1 has roots at -2 and -4, both left of [-1, 1].
  const IntervalSet inside = topk_region(3.0, 1.0, 1.0, 0.0, -1, 1);
  CHECK(inside == IntervalSet(-1, 1));
  const IntervalSet empty = topk_region(1.0, 0.0, 3.0, 1.0, -1, 1);
  CHECK(empty.empty());
}

TEST_CASE("exact tangency collapses to a point or the full segment") {
  // 2|1+z| >= |1+z| everywhere: alpha > 0 with a zero discriminant.
  const IntervalSet full = topk_region(2.0, 2.0, 1.0, 1.0, -2, 2);
  CHECK(full == IntervalSet(-2, 2));
  // |1+z| >= 2|1+z| only at the common zero: a single-point region.
  const IntervalSet point = topk_region(1.0, 1.0, 2.0, 2.0, -2, 2);
  REQUIRE(point.size() == 1);
  CHECK(point.pieces()[0].lo == doctest::Approx(-1.0));
  CHECK(point.pieces()[0].hi == doctest::Approx(-1.0));
}

TEST_CASE("pairwise domination is symmetric under complement") {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> coef(-1.5, 1.5);
  for (int rep = 0; rep < 20; ++rep) {
    const double fi = coef(rng), gi = coef(rng), fp = coef(rng),
                 gp = coef(rng);
    const IntervalSet a = topk_region(fi, gi, fp, gp, -3, 3);
    const IntervalSet b = topk_region(fp, gp, fi, gi, -3, 3);
    for (int s = 0; s < 3000; ++s) {
      const double z = -3 + 6.0 * (s + 0.5) / 3000;
      const double ri = std::abs(fi + gi * z), rp = std::abs(fp + gp * z);
      if (std::abs(ri - rp) < 1e-9) continue;  // boundary tie
      CHECK(a.contains(z) == (ri >= rp));
      CHECK(b.contains(z) == (rp >= ri));
    }
  }
}

TEST_CASE("scaling both coefficients leaves the pairwise region unchanged") {
  std::mt19937_64 rng(74);
  std::uniform_real_distribution<double> coef(-1.5, 1.5);
  for (int rep = 0; rep < 20; ++rep) {
    const double fi = coef(rng), gi = coef(rng), fp = coef(rng),
                 gp = coef(rng);
    const IntervalSet base = topk_region(fi, gi, fp, gp, -3, 3);
    const IntervalSet scaled =
        topk_region(4 * fi, 4 * gi, 4 * fp, 4 * gp, -3, 3);
    CHECK(base == scaled);
  }
}

TEST_CASE("two-instance threshold assembly composes region and complement") {
  Eigen::VectorXd f(2), g(2);
  f << 0.0, 0.2;
  g << 1.0, 0.0;
  const ResidualPath path = single_segment(f, g, -2, 2);
  OutlierSet observed;
  observed.indices = {0};
  const IntervalSet got =
      event_region_over_path(path, DetectionRule::threshold(1.0), observed);
  // Instance 0 must exceed 1 in magnitude, instance 1 never does.
  const IntervalSet want = threshold_region(0.0, 1.0, -2, 2, 1.0);
  CHECK(got == want);
}

TEST_CASE("event region contains the observed z on a synthetic null") {
  std::mt19937_64 rng(75);
  for (int rep = 0; rep < 5; ++rep) {
    const robustsi::Dataset ds = oracles::random_dataset(9, 2, rng, 5.0);
    robustsi::DataLine line = oracles::random_line(ds.y, rng);
    const robustsi::PiecewisePath coeff =
        robustsi::lad_path(ds.X, line, -6, 6);
    const ResidualPath res = robustsi::residual_path(line, coeff, ds.X);
    const Eigen::VectorXd r0 =
        ds.y - ds.X * robustsi::solve_lad(ds.X, ds.y).beta;
    const OutlierSet observed =
        detect(r0, DetectionRule::threshold(1.0), TiePolicy::Permissive);
    if (observed.indices.empty()) continue;
    const IntervalSet region = event_region_over_path(
        res, DetectionRule::threshold(1.0), observed);
    CHECK(region.contains(line.z_obs));
  }
}

TEST_CASE("grid classification matches the region on a small instance") {
  std::mt19937_64 rng(76);
  const robustsi::Dataset ds = oracles::random_dataset(8, 2, rng, 6.0);
  robustsi::DataLine line = oracles::random_line(ds.y, rng);
  const double z_lo = -5, z_hi = 5;
  const robustsi::PiecewisePath coeff =
      robustsi::lad_path(ds.X, line, z_lo, z_hi);
  const ResidualPath res = robustsi::residual_path(line, coeff, ds.X);
  const Eigen::VectorXd r0 = ds.y - ds.X * robustsi::solve_lad(ds.X, ds.y).beta;
  const robustsi::DetectionRule rule = DetectionRule::threshold(1.0);
  const OutlierSet observed = detect(r0, rule, TiePolicy::Permissive);
  if (!observed.indices.empty()) {
    const IntervalSet region = event_region_over_path(res, rule, observed);
    const auto check = oracles::region_grid_check(
        robustsi::EstimatorSpec::lad(), rule, ds.X, line, observed, region,
        z_lo, z_hi, 2000);
    CHECK(check.mismatches == 0);
    CHECK(check.checked > 1500);
  }
}

TEST_CASE("generic callback assembly reproduces the threshold regions") {
  std::mt19937_64 rng(77);
  int compared = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const robustsi::Dataset ds = oracles::random_dataset(8, 2, rng, 4.0);
    robustsi::DataLine line = oracles::random_line(ds.y, rng);
    const robustsi::PiecewisePath coeff =
        robustsi::lad_path(ds.X, line, -5, 5);
    const ResidualPath res = robustsi::residual_path(line, coeff, ds.X);
    const Eigen::VectorXd r0 =
        ds.y - ds.X * robustsi::solve_lad(ds.X, ds.y).beta;
    const OutlierSet observed =
        detect(r0, DetectionRule::threshold(1.0), TiePolicy::Permissive);
    if (observed.indices.empty()) continue;
    ++compared;
    const IntervalSet direct = event_region_over_path(
        res, DetectionRule::threshold(1.0), observed);
    const IntervalSet generic = detection_function_region(
        res, threshold_callback(res, 1.0), observed);
    CHECK(direct == generic);
  }
  CHECK(compared >= 10);
}

TEST_CASE("callback without roots keeps or drops whole segments by sign") {
  Eigen::VectorXd f(1), g(1);
  f << 2.0;
  g << 0.0;
  const ResidualPath path = single_segment(f, g, -1, 1);
  OutlierSet observed;
  observed.indices = {0};
  const auto constant_sign = [](int sign) {
    return [sign](std::size_t, int, double, double) {
      PhiSegmentInfo info;
      info.midpoint_sign = sign;
      return info;
    };
  };
  CHECK(detection_function_region(path, constant_sign(1), observed) ==
        IntervalSet(-1, 1));
  CHECK_THROWS_AS(detection_function_region(path, constant_sign(-1), observed),
                  robustsi::EmptyRegion);
}

TEST_CASE("inconsistent callbacks are rejected") {
  Eigen::VectorXd f(1), g(1);
  f << 2.0;
  g << 0.0;
  const ResidualPath path = single_segment(f, g, -1, 1);
  OutlierSet observed;
  observed.indices = {0};
  const robustsi::DetectionFunction bad_sign =
      [](std::size_t, int, double, double) {
        PhiSegmentInfo info;
        info.midpoint_sign = 0;
        return info;
      };
  CHECK_THROWS_AS(detection_function_region(path, bad_sign, observed),
                  robustsi::CallbackInconsistent);
  const robustsi::DetectionFunction outside_root =
      [](std::size_t, int, double, double) {
        PhiSegmentInfo info;
        info.roots = {7.0};
        info.midpoint_sign = 1;
        return info;
      };
  CHECK_THROWS_AS(detection_function_region(path, outside_root, observed),
                  robustsi::CallbackInconsistent);
}

}  // TEST_SUITE
