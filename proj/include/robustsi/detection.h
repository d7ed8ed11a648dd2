#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "robustsi/interval_set.h"
#include "robustsi/path.h"
#include "robustsi/types.h"

namespace robustsi {

// How exact ties at the detection boundary are handled. Strict raises
// TieAtBoundary for an ambiguous top-K cut (used on observed data, where the
// ambiguity would change the selection event); Permissive breaks the tie by
// index (used by grid oracles, where ties are measure-zero in z and excluded
// near region endpoints anyway).
enum class TiePolicy { Strict, Permissive };

// Outliers of a residual vector under the rule. Threshold: |r_i| >= xi.
// TopK: the K largest magnitudes.
OutlierSet detect(const Eigen::VectorXd& residuals, const DetectionRule& rule,
                  TiePolicy ties = TiePolicy::Strict);

// Subset of [z_lo, z_hi] where |f + g*z| >= xi for one residual coordinate,
// by the sign-of-g case split.
IntervalSet threshold_region(double f, double g, double z_lo, double z_hi,
                             double xi);

// Subset of [z_lo, z_hi] where |f_i + g_i z| >= |f_ip + g_ip z|, via the
// quadratic inequality alpha z^2 + beta z + gamma >= 0. A negative
// discriminant means the parabola never changes sign: full segment for
// alpha > 0, empty for alpha < 0.
IntervalSet topk_region(double f_i, double g_i, double f_ip, double g_ip,
                        double z_lo, double z_hi);

// Exact region where detection over the residual path reproduces `observed`:
// per segment, intersect the per-coordinate regions (and complements for
// non-detected coordinates; all ordered pairs for top-K), then union over
// segments. Throws EmptyRegion when nothing survives.
IntervalSet event_region_over_path(const ResidualPath& res_path,
                                   const DetectionRule& rule,
                                   const OutlierSet& observed);

// Root data for a generic detection function phi_i on one path segment:
// sorted roots of phi_i(r(z)) = 0 inside the segment, plus the sign of
// phi_i at the segment midpoint (+1 or -1).
struct PhiSegmentInfo {
  std::vector<double> roots;
  int midpoint_sign = 0;
};

using DetectionFunction = std::function<PhiSegmentInfo(
    std::size_t segment_index, int instance, double seg_lo, double seg_hi)>;

// Event region for a detection criterion given only through per-segment
// root/sign callbacks: the sign of phi_i alternates across each reported
// root, anchored at the midpoint. Instances in `observed` keep the phi >= 0
// cells, the rest keep the phi < 0 cells.
IntervalSet detection_function_region(const ResidualPath& res_path,
                                      const DetectionFunction& phi_roots,
                                      const OutlierSet& observed);

}  // namespace robustsi
