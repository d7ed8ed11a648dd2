#include "robustsi/inference.h"

#include <algorithm>
#include <cmath>

#include "robustsi/detection.h"
#include "robustsi/errors.h"
#include "robustsi/huber.h"
#include "robustsi/lad.h"
#include "robustsi/linalg.h"
#include "robustsi/normal.h"

namespace robustsi {

TestDirection build_eta(const Dataset& data, const OutlierSet& outliers,
                        int i) {
  if (!outliers.contains(i)) {
    throw NumericalFailure("build_eta target must be a detected outlier");
  }
  const int n = static_cast<int>(data.n());
  Eigen::MatrixXd X_clean = data.X;
  for (int j : outliers.indices) X_clean.row(j).setZero();

  // eta = e(i) - I^{-O} (X_clean^+)' x_i.
  Eigen::VectorXd w =
      pseudo_inverse(X_clean).transpose() * data.X.row(i).transpose();
  for (int j : outliers.indices) w(j) = 0.0;
  TestDirection dir;
  dir.eta = -w;
  dir.eta(i) += 1.0;
  dir.target_index = i;
  dir.sigma_eta2 = dir.eta.dot(data.Sigma * dir.eta);
  if (dir.sigma_eta2 <= 1e-14) {
    throw DegenerateDirection("test direction has vanishing variance (index " +
                              std::to_string(i) + ", n=" + std::to_string(n) +
                              ")");
  }
  return dir;
}

DataLine conditional_line(const Dataset& data, const TestDirection& dir) {
  DataLine line;
  line.b = data.Sigma * dir.eta / dir.sigma_eta2;
  line.z_obs = dir.eta.dot(data.y);
  line.a = data.y - line.b * line.z_obs;
  return line;
}

std::pair<double, double> working_window(double z_obs, double sigma_eta,
                                         double window_mult) {
  return {std::min(z_obs, 0.0) - window_mult * sigma_eta,
          std::max(z_obs, 0.0) + window_mult * sigma_eta};
}

double window_mass_bound(double window_mult) {
  return 2.0 * normal_upper_tail(window_mult);
}

IntervalSet truncation_region(const Dataset& data, const EstimatorSpec& est,
                              const DetectionRule& rule,
                              const TestDirection& dir, double window_mult) {
  if (window_mult < 5.0) {
    throw WindowTooSmall("window_mult must be at least 5");
  }
  const DataLine line = conditional_line(data, dir);
  const double sigma_eta = std::sqrt(dir.sigma_eta2);
  const auto [z_lo, z_hi] = working_window(line.z_obs, sigma_eta, window_mult);

  Eigen::VectorXd observed_residuals;
  if (est.kind == EstimatorSpec::Kind::Lad) {
    observed_residuals = data.y - data.X * solve_lad(data.X, data.y).beta;
  } else {
    observed_residuals =
        data.y - data.X * solve_huber(data.X, data.y, est.delta).beta;
  }
  const OutlierSet observed = detect(observed_residuals, rule);
  if (observed.indices.empty()) {
    throw EmptyRegion("no outliers detected at the observed data");
  }

  PiecewisePath coeff =
      est.kind == EstimatorSpec::Kind::Lad
          ? lad_path(data.X, line, z_lo, z_hi)
          : huber_path(data.X, line, est.delta, z_lo, z_hi);
  const ResidualPath res = residual_path(line, coeff, data.X);
  IntervalSet region = event_region_over_path(res, rule, observed);
  if (!region.contains(line.z_obs)) {
    throw EmptyRegion(
        "observed statistic fell outside its own event region (solver or "
        "assembly defect)");
  }
  return region;
}

double selective_pivot(const TestDirection& dir, const IntervalSet& trunc,
                       double z_obs) {
  if (!trunc.contains(z_obs)) {
    throw EmptyRegion("z_obs is not inside the truncation region");
  }
  return truncated_normal_cdf(GaussianParams(0.0, dir.sigma_eta2), trunc,
                              z_obs);
}

double selective_p(const TestDirection& dir, const IntervalSet& trunc,
                   double z_obs) {
  const double pivot = selective_pivot(dir, trunc, z_obs);
  const double pi = 1.0 - pivot;
  return std::clamp(2.0 * std::min(pi, 1.0 - pi), 0.0, 1.0);
}

std::pair<double, double> selective_ci(const TestDirection& dir,
                                       const IntervalSet& trunc, double z_obs,
                                       double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw NumericalFailure("CI level alpha must lie in (0, 1)");
  }
  if (!trunc.contains(z_obs)) {
    throw EmptyRegion("z_obs is not inside the truncation region");
  }
  const double sigma = std::sqrt(dir.sigma_eta2);
  const auto pivot = [&](double m) {
    return detail::truncated_normal_cdf_unchecked(
        GaussianParams(m, dir.sigma_eta2), trunc, z_obs);
  };

  // pivot(m) decreases from 1 to 0 as m sweeps left to right; locate where
  // it crosses `level` to within 1e-6 sigma.
  const auto invert = [&](double level) {
    double lo = z_obs - 40.0 * sigma;
    double hi = z_obs + 40.0 * sigma;
    for (int grow = 0; grow < 60 && pivot(lo) < level; ++grow) {
      lo -= (hi - lo);
    }
    for (int grow = 0; grow < 60 && pivot(hi) > level; ++grow) {
      hi += (hi - lo);
    }
    double plo = pivot(lo), phi = pivot(hi);
    if (plo < phi - 1e-12 || plo < level - 1e-9 || phi > level + 1e-9) {
      throw NonMonotonePivot("pivot failed to bracket the target level");
    }
    while (hi - lo > 1e-6 * sigma) {
      const double mid = 0.5 * (lo + hi);
      if (pivot(mid) >= level) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  const double ci_lo = invert(1.0 - 0.5 * alpha);
  const double ci_hi = invert(0.5 * alpha);
  if (ci_lo > ci_hi + 1e-6 * sigma) {
    throw NonMonotonePivot("inverted CI endpoints are out of order");
  }
  return {std::min(ci_lo, ci_hi), std::max(ci_lo, ci_hi)};
}

double naive_p(const TestDirection& dir, double z_obs) {
  const double zabs = std::abs(z_obs) / std::sqrt(dir.sigma_eta2);
  return std::clamp(2.0 * normal_upper_tail(zabs), 0.0, 1.0);
}

double bonferroni_p(double naive, int n, int k_detected) {
  if (k_detected < 1 || k_detected > n) {
    throw DimensionMismatch("bonferroni_p requires 1 <= k_detected <= n");
  }
  if (naive <= 0.0) return 0.0;
  const double log_choose = std::lgamma(n + 1.0) - std::lgamma(k_detected + 1.0) -
                            std::lgamma(n - k_detected + 1.0);
  const double lp = std::log(naive) + log_choose;
  return lp >= 0.0 ? 1.0 : std::min(1.0, std::exp(lp));
}

}  // namespace robustsi
