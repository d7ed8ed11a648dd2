#pragma once

#include <limits>
#include <vector>

namespace robustsi {

// A closed interval on the extended real line. lo <= hi always; lo may be
// -inf and hi may be +inf.
struct Interval {
  double lo;
  double hi;
};

// A finite union of disjoint closed intervals, kept in canonical form:
// sorted by lo, pairwise disjoint, and exactly-touching neighbours
// (hi_k == lo_{k+1}) merged. Degenerate single points [x, x] are legal and
// retained; truncation regions can contain very short segments and dropping
// them would bias the downstream probability mass.
//
// Immutable value type: every operation returns a new set.
class IntervalSet {
 public:
  IntervalSet() = default;
  IntervalSet(double lo, double hi);  // single interval; throws if lo > hi

  static IntervalSet empty_set() { return IntervalSet(); }
  static IntervalSet entire_line();
  // Canonicalizes: sorts, merges overlapping and touching pieces.
  static IntervalSet from_intervals(std::vector<Interval> pieces);

  bool empty() const { return pieces_.empty(); }
  std::size_t size() const { return pieces_.size(); }
  const std::vector<Interval>& pieces() const { return pieces_; }

  bool contains(double x) const;
  double min() const;  // inf of the set; requires nonempty
  double max() const;  // sup of the set; requires nonempty

  // Sum of piece lengths (+inf if any piece is unbounded).
  double total_length() const;

  // True when every point of this set lies in `other` (closed-set inclusion).
  bool subset_of(const IntervalSet& other, double tol = 0.0) const;

  bool operator==(const IntervalSet& other) const;

 private:
  std::vector<Interval> pieces_;
};

// Pointwise set algebra on canonical inputs; results are canonical.
IntervalSet interval_union(const IntervalSet& a, const IntervalSet& b);
IntervalSet interval_intersect(const IntervalSet& a, const IntervalSet& b);
// [lo, hi] minus `a`, as the closure of the set difference (boundary points
// shared with `a` stay in the result; they carry zero Gaussian measure).
IntervalSet interval_complement_within(const IntervalSet& a, double lo,
                                       double hi);

}  // namespace robustsi
