#include "robustsi/analyze.h"

#include "robustsi/detection.h"
#include "robustsi/errors.h"
#include "robustsi/huber.h"
#include "robustsi/lad.h"
#include "robustsi/linalg.h"

namespace robustsi {

std::vector<SelectiveReport> cmd_analyze(const AnalysisConfig& config,
                                         const Dataset& data,
                                         std::vector<std::string>* warnings) {
  if (warnings && numerical_rank(data.X) < data.d()) {
    warnings->push_back(
        "RankDeficiencyWarning: design matrix is rank-deficient; robust fits "
        "may be non-unique");
  }
  Eigen::VectorXd residuals;
  if (config.estimator.kind == EstimatorSpec::Kind::Lad) {
    residuals = data.y - data.X * solve_lad(data.X, data.y).beta;
  } else {
    residuals =
        data.y - data.X * solve_huber(data.X, data.y, config.estimator.delta).beta;
  }
  const OutlierSet detected = detect(residuals, config.rule);
  if (detected.indices.empty()) {
    throw NoOutliersDetected(
        "no outliers detected; lower the threshold xi or raise K");
  }
  const int k_detected = config.rule.kind == DetectionRule::Kind::TopK
                             ? config.rule.k
                             : static_cast<int>(detected.indices.size());

  std::vector<SelectiveReport> reports;
  reports.reserve(detected.indices.size());
  for (int i : detected.indices) {
    const TestDirection dir = build_eta(data, detected, i);
    const double z_obs = dir.eta.dot(data.y);
    SelectiveReport rep;
    rep.target_index = i;
    rep.z_obs = z_obs;
    rep.truncation = truncation_region(data, config.estimator, config.rule,
                                       dir, config.window_mult);
    rep.naive_p = naive_p(dir, z_obs);
    rep.bonferroni_p = bonferroni_p(rep.naive_p, static_cast<int>(data.n()),
                                    k_detected);
    rep.selective_p = selective_p(dir, rep.truncation, z_obs);
    const auto ci = selective_ci(dir, rep.truncation, z_obs, config.alpha);
    rep.ci_lo = ci.first;
    rep.ci_hi = ci.second;
    rep.mass_outside_window_bound = window_mass_bound(config.window_mult);
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace robustsi
