#pragma once

#include <Eigen/Dense>
#include <utility>

#include "robustsi/interval_set.h"
#include "robustsi/types.h"

namespace robustsi {

// Test direction for one detected outlier: Z = eta'Y is the target residual
// against the least-squares fit on the instances outside the outlier set.
struct TestDirection {
  Eigen::VectorXd eta;
  double sigma_eta2 = 0.0;  // eta' Sigma eta
  int target_index = -1;
};

// Per-outlier inference record emitted by the analysis pipeline.
struct SelectiveReport {
  int target_index = -1;
  double z_obs = 0.0;
  double naive_p = 1.0;
  double bonferroni_p = 1.0;
  double selective_p = 1.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  IntervalSet truncation;
  double mass_outside_window_bound = 0.0;
};

// eta = (I - X (X^{-O})^+ I^{-O})' e(i) with the pseudo-inverse acting
// through a rank-revealing decomposition. Throws DegenerateDirection when
// eta carries no variance under Sigma.
TestDirection build_eta(const Dataset& data, const OutlierSet& outliers,
                        int i);

// The line y(z) = a + b*z through the observed data with fixed nuisance
// component: b = Sigma eta / (eta' Sigma eta), a = y - b * z_obs.
DataLine conditional_line(const Dataset& data, const TestDirection& dir);

// Working window for path computation: [min(z_obs,0), max(z_obs,0)] padded
// by window_mult standard deviations of Z on both sides.
std::pair<double, double> working_window(double z_obs, double sigma_eta,
                                         double window_mult);

// Gaussian mass bound outside the working window: 2 Q(window_mult).
double window_mass_bound(double window_mult);

// The exact truncation region: all z in the window where running the
// estimator on y(z) detects exactly the observed outlier set. Requires
// window_mult >= 5; verifies z_obs lands inside the region.
IntervalSet truncation_region(const Dataset& data, const EstimatorSpec& est,
                              const DetectionRule& rule,
                              const TestDirection& dir, double window_mult);

// Two-sided selective p-value from the truncated-normal pivot under the
// null eta'mu = 0.
double selective_p(const TestDirection& dir, const IntervalSet& trunc,
                   double z_obs);

// Uniformity pivot F^trunc_{0, sigma_eta2}(z_obs) (Unif[0,1] under the null
// conditional law); selective_p is 2*min(1-pivot, pivot).
double selective_pivot(const TestDirection& dir, const IntervalSet& trunc,
                       double z_obs);

// Equal-tailed (1-alpha) interval for eta'mu by bisecting the mean of the
// truncated-normal pivot, which is monotone decreasing in the mean.
std::pair<double, double> selective_ci(const TestDirection& dir,
                                       const IntervalSet& trunc, double z_obs,
                                       double alpha);

// Two-sided normal p-value that ignores selection.
double naive_p(const TestDirection& dir, double z_obs);

// Bonferroni correction over the C(n, k_detected) possible outlier sets,
// computed in log space and clamped at 1.
double bonferroni_p(double naive, int n, int k_detected);

}  // namespace robustsi
