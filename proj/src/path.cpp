#include "robustsi/path.h"

#include <algorithm>
#include <cmath>

#include "robustsi/errors.h"

namespace robustsi {

namespace {
constexpr double kMergeSpacing = 1e-12;
constexpr double kContinuityTol = 1e-7;
}  // namespace

std::size_t PiecewisePath::segment_index(double z) const {
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), z);
  return static_cast<std::size_t>(it - breakpoints.begin());
}

PiecewisePath make_piecewise_path(double z_lo, double z_hi,
                                  std::vector<double> breakpoints,
                                  std::vector<PathSegment> segments) {
  if (!(z_lo <= z_hi) || !std::isfinite(z_lo) || !std::isfinite(z_hi)) {
    throw NumericalFailure("piecewise path requires a finite window");
  }
  if (segments.size() != breakpoints.size() + 1) {
    throw DimensionMismatch("segment count must be breakpoint count + 1");
  }
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] < breakpoints[i]) {
      throw NumericalFailure("breakpoints must be nondecreasing");
    }
  }

  // Merge near-coincident breakpoints: drop the sliver segment between them
  // (degenerate pivots can emit zero-length segments). Slivers hugging z_hi
  // are trailing segments; everywhere else the sliver precedes the kept
  // breakpoint.
  while (!breakpoints.empty() && z_hi - breakpoints.back() < kMergeSpacing) {
    breakpoints.pop_back();
    segments.pop_back();
  }
  PiecewisePath out;
  out.z_lo = z_lo;
  out.z_hi = z_hi;
  double prev_edge = z_lo;
  for (std::size_t t = 0; t < breakpoints.size(); ++t) {
    const double bp = breakpoints[t];
    if (bp - prev_edge < kMergeSpacing) {
      continue;  // segment t is a sliver; segment t+1 takes over its span
    }
    out.breakpoints.push_back(bp);
    out.segments.push_back(std::move(segments[t]));
    prev_edge = bp;
  }
  out.segments.push_back(std::move(segments.back()));

  const Eigen::Index dim = out.segments.front().intercept.size();
  for (const PathSegment& s : out.segments) {
    if (s.intercept.size() != dim || s.slope.size() != dim) {
      throw DimensionMismatch("inconsistent segment dimensions");
    }
  }
  for (std::size_t t = 0; t < out.breakpoints.size(); ++t) {
    const double z = out.breakpoints[t];
    const Eigen::VectorXd left =
        out.segments[t].intercept + out.segments[t].slope * z;
    const Eigen::VectorXd right =
        out.segments[t + 1].intercept + out.segments[t + 1].slope * z;
    const double scale = 1.0 + left.cwiseAbs().maxCoeff();
    if ((left - right).cwiseAbs().maxCoeff() > kContinuityTol * scale) {
      throw NumericalFailure("path discontinuity at breakpoint " +
                             std::to_string(z));
    }
  }

  // Coalesce neighbours carrying the same affine piece: internal solver
  // events (e.g. an active-set swap at a residual zero crossing) need not
  // kink the solution, and downstream work scales with the segment count.
  PiecewisePath merged;
  merged.z_lo = out.z_lo;
  merged.z_hi = out.z_hi;
  merged.segments.push_back(std::move(out.segments.front()));
  for (std::size_t t = 0; t < out.breakpoints.size(); ++t) {
    const PathSegment& prev = merged.segments.back();
    PathSegment& next = out.segments[t + 1];
    const double ci = 1e-9 * (1.0 + prev.intercept.cwiseAbs().maxCoeff());
    const double cs = 1e-9 * (1.0 + prev.slope.cwiseAbs().maxCoeff());
    if ((next.intercept - prev.intercept).cwiseAbs().maxCoeff() <= ci &&
        (next.slope - prev.slope).cwiseAbs().maxCoeff() <= cs) {
      continue;
    }
    merged.breakpoints.push_back(out.breakpoints[t]);
    merged.segments.push_back(std::move(next));
  }
  return merged;
}

Eigen::VectorXd evaluate_path(const PiecewisePath& path, double z) {
  if (z < path.z_lo || z > path.z_hi) {
    throw OutOfWindow("z = " + std::to_string(z) + " outside [" +
                      std::to_string(path.z_lo) + ", " +
                      std::to_string(path.z_hi) + "]");
  }
  const PathSegment& s = path.segments[path.segment_index(z)];
  return s.intercept + s.slope * z;
}

ResidualPath residual_path(const DataLine& line, const PiecewisePath& coeff_path,
                           const Eigen::MatrixXd& X) {
  if (coeff_path.segments.empty() ||
      coeff_path.segments.front().intercept.size() != X.cols()) {
    throw DimensionMismatch("coefficient path dimension does not match X");
  }
  if (line.a.size() != X.rows() || line.b.size() != X.rows()) {
    throw DimensionMismatch("line dimension does not match X rows");
  }
  ResidualPath out;
  out.z_lo = coeff_path.z_lo;
  out.z_hi = coeff_path.z_hi;
  out.breakpoints = coeff_path.breakpoints;
  out.segments.reserve(coeff_path.segments.size());
  for (const PathSegment& s : coeff_path.segments) {
    out.segments.push_back({line.a - X * s.intercept, line.b - X * s.slope});
  }
  return out;
}

}  // namespace robustsi
