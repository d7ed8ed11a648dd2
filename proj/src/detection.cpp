#include "robustsi/detection.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "robustsi/errors.h"

namespace robustsi {

namespace {
constexpr double kTieTol = 1e-12;
}

OutlierSet detect(const Eigen::VectorXd& residuals, const DetectionRule& rule,
                  TiePolicy ties) {
  const int n = static_cast<int>(residuals.size());
  OutlierSet out;
  if (rule.kind == DetectionRule::Kind::Threshold) {
    for (int i = 0; i < n; ++i) {
      if (std::abs(residuals(i)) >= rule.xi) out.indices.push_back(i);
    }
    return out;
  }
  if (rule.k >= n) throw NumericalFailure("top-K requires K < n");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double da = std::abs(residuals(a)), db = std::abs(residuals(b));
    return da > db || (da == db && a < b);
  });
  if (ties == TiePolicy::Strict &&
      std::abs(std::abs(residuals(order[rule.k - 1])) -
               std::abs(residuals(order[rule.k]))) <= kTieTol) {
    throw TieAtBoundary("exact magnitude tie at the top-K cut");
  }
  out.indices.assign(order.begin(), order.begin() + rule.k);
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

IntervalSet threshold_region(double f, double g, double z_lo, double z_hi,
                             double xi) {
  std::vector<Interval> pieces;
  if (g > 0.0) {
    pieces.push_back({z_lo, std::min(z_hi, (-xi - f) / g)});
    pieces.push_back({std::max(z_lo, (xi - f) / g), z_hi});
  } else if (g < 0.0) {
    pieces.push_back({z_lo, std::min(z_hi, (xi - f) / g)});
    pieces.push_back({std::max(z_lo, (-xi - f) / g), z_hi});
  } else if (std::abs(f) >= xi) {
    pieces.push_back({z_lo, z_hi});
  }
  return IntervalSet::from_intervals(std::move(pieces));
}

IntervalSet topk_region(double f_i, double g_i, double f_ip, double g_ip,
                        double z_lo, double z_hi) {
  const double alpha = g_i * g_i - g_ip * g_ip;
  const double beta = 2.0 * (f_i * g_i - f_ip * g_ip);
  const double gamma = f_i * f_i - f_ip * f_ip;
  std::vector<Interval> pieces;
  if (alpha == 0.0) {
    if (beta > 0.0) {
      pieces.push_back({std::max(z_lo, -gamma / beta), z_hi});
    } else if (beta < 0.0) {
      pieces.push_back({z_lo, std::min(z_hi, -gamma / beta)});
    } else if (gamma >= 0.0) {
      pieces.push_back({z_lo, z_hi});
    }
    return IntervalSet::from_intervals(std::move(pieces));
  }
  const double disc = beta * beta - 4.0 * alpha * gamma;
  if (disc < 0.0) {
    // Sign of the parabola is constant over the whole line.
    if (alpha > 0.0) pieces.push_back({z_lo, z_hi});
    return IntervalSet::from_intervals(std::move(pieces));
  }
  const double sq = std::sqrt(disc);
  if (alpha > 0.0) {
    pieces.push_back({z_lo, std::min(z_hi, (-beta - sq) / (2.0 * alpha))});
    pieces.push_back({std::max(z_lo, (-beta + sq) / (2.0 * alpha)), z_hi});
  } else {
    const double lo = std::max(z_lo, (-beta + sq) / (2.0 * alpha));
    const double hi = std::min(z_hi, (-beta - sq) / (2.0 * alpha));
    pieces.push_back({lo, hi});
  }
  return IntervalSet::from_intervals(std::move(pieces));
}

IntervalSet event_region_over_path(const ResidualPath& res_path,
                                   const DetectionRule& rule,
                                   const OutlierSet& observed) {
  if (observed.indices.empty()) {
    throw EmptyRegion("observed outlier set must be nonempty");
  }
  const int n = static_cast<int>(res_path.segments.front().intercept.size());
  IntervalSet region;
  for (std::size_t t = 0; t < res_path.segment_count(); ++t) {
    const double lo = res_path.lower_edge(t);
    const double hi = res_path.upper_edge(t);
    const Eigen::VectorXd& f = res_path.segments[t].intercept;
    const Eigen::VectorXd& g = res_path.segments[t].slope;
    IntervalSet seg(lo, hi);
    if (rule.kind == DetectionRule::Kind::Threshold) {
      for (int i = 0; i < n && !seg.empty(); ++i) {
        const IntervalSet v = threshold_region(f(i), g(i), lo, hi, rule.xi);
        seg = observed.contains(i)
                  ? interval_intersect(seg, v)
                  : interval_intersect(seg,
                                       interval_complement_within(v, lo, hi));
      }
    } else {
      for (int i : observed.indices) {
        for (int ip = 0; ip < n && !seg.empty(); ++ip) {
          if (observed.contains(ip)) continue;
          seg = interval_intersect(
              seg, topk_region(f(i), g(i), f(ip), g(ip), lo, hi));
        }
        if (seg.empty()) break;
      }
    }
    region = interval_union(region, seg);
  }
  if (region.empty()) {
    throw EmptyRegion(
        "event region is empty; the observed event cannot be reproduced "
        "anywhere on the path (solver or assembly defect)");
  }
  return region;
}

namespace {

// phi >= 0 cells of one segment, from roots plus midpoint sign parity.
IntervalSet cells_from_roots(const PhiSegmentInfo& info, double lo, double hi) {
  if (info.midpoint_sign != 1 && info.midpoint_sign != -1) {
    throw CallbackInconsistent("midpoint sign must be +1 or -1");
  }
  const double mid = 0.5 * (lo + hi);
  std::vector<double> edges;
  edges.push_back(lo);
  for (double r : info.roots) {
    if (r < lo - 1e-12 || r > hi + 1e-12) {
      throw CallbackInconsistent("root outside its segment");
    }
    if (!edges.empty() && r < edges.back()) {
      throw CallbackInconsistent("roots not sorted");
    }
    edges.push_back(std::clamp(r, lo, hi));
  }
  edges.push_back(hi);

  // Locate the midpoint cell, then alternate signs outward from it.
  int mid_cell = 0;
  for (std::size_t c = 0; c + 1 < edges.size(); ++c) {
    if (mid >= edges[c] && mid <= edges[c + 1]) mid_cell = static_cast<int>(c);
  }
  std::vector<Interval> keep;
  const int cells = static_cast<int>(edges.size()) - 1;
  for (int c = 0; c < cells; ++c) {
    const int sign = ((c - mid_cell) % 2 == 0) ? info.midpoint_sign
                                               : -info.midpoint_sign;
    if (sign > 0) keep.push_back({edges[c], edges[c + 1]});
  }
  return IntervalSet::from_intervals(std::move(keep));
}

}  // namespace

IntervalSet detection_function_region(const ResidualPath& res_path,
                                      const DetectionFunction& phi_roots,
                                      const OutlierSet& observed) {
  if (observed.indices.empty()) {
    throw EmptyRegion("observed outlier set must be nonempty");
  }
  const int n = static_cast<int>(res_path.segments.front().intercept.size());
  IntervalSet region;
  for (std::size_t t = 0; t < res_path.segment_count(); ++t) {
    const double lo = res_path.lower_edge(t);
    const double hi = res_path.upper_edge(t);
    IntervalSet seg(lo, hi);
    for (int i = 0; i < n && !seg.empty(); ++i) {
      const PhiSegmentInfo info = phi_roots(t, i, lo, hi);
      const IntervalSet pos = cells_from_roots(info, lo, hi);
      seg = observed.contains(i)
                ? interval_intersect(seg, pos)
                : interval_intersect(seg,
                                     interval_complement_within(pos, lo, hi));
    }
    region = interval_union(region, seg);
  }
  if (region.empty()) {
    throw EmptyRegion("detection-function event region is empty");
  }
  return region;
}

}  // namespace robustsi
