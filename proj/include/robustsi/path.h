#pragma once

#include <Eigen/Dense>
#include <vector>

#include "robustsi/types.h"

namespace robustsi {

// One affine segment of a piecewise-linear path: value(z) = intercept + slope*z.
struct PathSegment {
  Eigen::VectorXd intercept;
  Eigen::VectorXd slope;
};

// Piecewise-linear vector-valued function of z on a finite working window.
// segments.size() == breakpoints.size() + 1; breakpoints are the interior
// segment boundaries, strictly increasing inside (z_lo, z_hi), and the path
// is continuous across them (checked to 1e-7 at construction).
struct PiecewisePath {
  double z_lo = 0.0;
  double z_hi = 0.0;
  std::vector<double> breakpoints;
  std::vector<PathSegment> segments;

  std::size_t segment_count() const { return segments.size(); }
  // Segment bounds: segment t covers [lower_edge(t), upper_edge(t)].
  double lower_edge(std::size_t t) const {
    return t == 0 ? z_lo : breakpoints[t - 1];
  }
  double upper_edge(std::size_t t) const {
    return t == breakpoints.size() ? z_hi : breakpoints[t];
  }
  std::size_t segment_index(double z) const;
};

using ResidualPath = PiecewisePath;

// Builds a canonical path from raw solver output. Breakpoints closer than
// 1e-12 are merged (the sliver segment is dropped); unsorted breakpoints or
// a continuity violation beyond 1e-7 raise NumericalFailure.
PiecewisePath make_piecewise_path(double z_lo, double z_hi,
                                  std::vector<double> breakpoints,
                                  std::vector<PathSegment> segments);

// Value of the path at z. Throws OutOfWindow outside [z_lo, z_hi].
Eigen::VectorXd evaluate_path(const PiecewisePath& path, double z);

// Residual path along the line: per segment, f_t = a - X*c_t and
// g_t = b - X*d_t, with the same breakpoints as the coefficient path.
ResidualPath residual_path(const DataLine& line, const PiecewisePath& coeff_path,
                           const Eigen::MatrixXd& X);

}  // namespace robustsi
