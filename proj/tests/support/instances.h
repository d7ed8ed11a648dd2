#pragma once

// Shared synthetic-instance builders and the detect-at-grid oracle used by
// both the unit suites and the acceptance harness.

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "robustsi/detection.h"
#include "robustsi/huber.h"
#include "robustsi/inference.h"
#include "robustsi/lad.h"
#include "robustsi/types.h"

namespace oracles {

inline Eigen::MatrixXd random_matrix(int n, int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd X(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) X(i, j) = normal(rng);
  return X;
}

inline Eigen::VectorXd random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

// Dataset with standard-normal design/noise, unit covariance, and an
// optional gross shift on instance 0 so detection has something to find.
inline robustsi::Dataset random_dataset(int n, int d, std::mt19937_64& rng,
                                        double shift0 = 0.0) {
  Eigen::MatrixXd X = random_matrix(n, d, rng);
  Eigen::VectorXd w = random_vector(d, rng);
  Eigen::VectorXd y = X * w + random_vector(n, rng);
  y(0) += shift0;
  return robustsi::Dataset(std::move(X), std::move(y),
                           Eigen::MatrixXd::Identity(n, n));
}

// A generic line through the data: a = y - b*z_obs for a random direction b
// normalized so z moves the response at unit scale.
inline robustsi::DataLine random_line(const Eigen::VectorXd& y,
                                      std::mt19937_64& rng) {
  robustsi::DataLine line;
  line.b = random_vector(static_cast<int>(y.size()), rng);
  line.b /= line.b.norm();
  line.z_obs = 0.0;
  line.a = y;
  return line;
}

inline Eigen::VectorXd fresh_residuals(const robustsi::EstimatorSpec& est,
                                       const Eigen::MatrixXd& X,
                                       const Eigen::VectorXd& y) {
  if (est.kind == robustsi::EstimatorSpec::Kind::Lad) {
    return y - X * robustsi::solve_lad(X, y).beta;
  }
  return y - X * robustsi::solve_huber(X, y, est.delta).beta;
}

struct GridCheckResult {
  long mismatches = 0;
  long skipped = 0;   // near region endpoints or non-unique oracle optimum
  long checked = 0;
};

// Classifies a z-grid over the window by fresh solve + detect and compares
// with interval membership of the region. Points within `edge_tol` of a
// region endpoint are excluded (boundary ties are measure-zero); LAD grid
// points where the re-solve optimum is not a unique vertex are skipped, the
// detected set being ill-defined there.
inline GridCheckResult region_grid_check(
    const robustsi::EstimatorSpec& est, const robustsi::DetectionRule& rule,
    const Eigen::MatrixXd& X, const robustsi::DataLine& line,
    const robustsi::OutlierSet& observed, const robustsi::IntervalSet& region,
    double z_lo, double z_hi, int grid_points, double edge_tol = 1e-9) {
  GridCheckResult res;
  for (int g = 0; g < grid_points; ++g) {
    const double z = z_lo + (z_hi - z_lo) * (g + 0.5) / grid_points;
    bool near_edge = false;
    for (const auto& piece : region.pieces()) {
      if (std::abs(z - piece.lo) < edge_tol || std::abs(z - piece.hi) < edge_tol) {
        near_edge = true;
        break;
      }
    }
    if (near_edge) {
      ++res.skipped;
      continue;
    }
    const Eigen::VectorXd y_z = line.at(z);
    Eigen::VectorXd r;
    if (est.kind == robustsi::EstimatorSpec::Kind::Lad) {
      const robustsi::LadSolution sol = robustsi::solve_lad(X, y_z);
      if (!sol.unique_optimum) {
        ++res.skipped;
        continue;
      }
      r = y_z - X * sol.beta;
    } else {
      r = y_z - X * robustsi::solve_huber(X, y_z, est.delta).beta;
    }
    const robustsi::OutlierSet found =
        robustsi::detect(r, rule, robustsi::TiePolicy::Permissive);
    const bool event = found == observed;
    ++res.checked;
    if (event != region.contains(z)) ++res.mismatches;
  }
  return res;
}

}  // namespace oracles
