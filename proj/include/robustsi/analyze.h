#pragma once

#include <string>
#include <vector>

#include "robustsi/inference.h"
#include "robustsi/types.h"

namespace robustsi {

struct AnalysisConfig {
  EstimatorSpec estimator = EstimatorSpec::lad();
  DetectionRule rule = DetectionRule::threshold(1.0);
  double alpha = 0.05;
  double window_mult = 20.0;
};

// The two-step pipeline on one dataset: fit the robust estimator, detect
// outliers, and produce one selective report per detected instance, ordered
// by index. Throws NoOutliersDetected when the detection set is empty.
// Non-fatal conditions (e.g. a rank-deficient design) are appended to
// `warnings` when provided.
std::vector<SelectiveReport> cmd_analyze(const AnalysisConfig& config,
                                         const Dataset& data,
                                         std::vector<std::string>* warnings =
                                             nullptr);

}  // namespace robustsi
