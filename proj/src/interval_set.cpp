#include "robustsi/interval_set.h"

#include <algorithm>
#include <cmath>

#include "robustsi/errors.h"

namespace robustsi {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

IntervalSet::IntervalSet(double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
    throw NumericalFailure("invalid interval bounds");
  }
  pieces_.push_back({lo, hi});
}

IntervalSet IntervalSet::entire_line() { return IntervalSet(-kInf, kInf); }

IntervalSet IntervalSet::from_intervals(std::vector<Interval> pieces) {
  std::erase_if(pieces, [](const Interval& p) {
    return std::isnan(p.lo) || std::isnan(p.hi) || p.lo > p.hi;
  });
  std::sort(pieces.begin(), pieces.end(),
            [](const Interval& a, const Interval& b) {
              return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
            });
  IntervalSet out;
  for (const Interval& p : pieces) {
    if (!out.pieces_.empty() && p.lo <= out.pieces_.back().hi) {
      out.pieces_.back().hi = std::max(out.pieces_.back().hi, p.hi);
    } else {
      out.pieces_.push_back(p);
    }
  }
  return out;
}

bool IntervalSet::contains(double x) const {
  auto it = std::upper_bound(
      pieces_.begin(), pieces_.end(), x,
      [](double v, const Interval& p) { return v < p.lo; });
  if (it == pieces_.begin()) return false;
  --it;
  return x >= it->lo && x <= it->hi;
}

double IntervalSet::min() const {
  if (pieces_.empty()) throw EmptyRegion("min() of empty interval set");
  return pieces_.front().lo;
}

double IntervalSet::max() const {
  if (pieces_.empty()) throw EmptyRegion("max() of empty interval set");
  return pieces_.back().hi;
}

double IntervalSet::total_length() const {
  double s = 0;
  for (const Interval& p : pieces_) s += p.hi - p.lo;
  return s;
}

bool IntervalSet::subset_of(const IntervalSet& other, double tol) const {
  for (const Interval& p : pieces_) {
    // Each piece must fit inside a single piece of `other`.
    bool covered = false;
    for (const Interval& q : other.pieces()) {
      if (p.lo >= q.lo - tol && p.hi <= q.hi + tol) {
        covered = true;
        break;
      }
    }
    if (!covered) return false;
  }
  return true;
}

bool IntervalSet::operator==(const IntervalSet& other) const {
  if (pieces_.size() != other.pieces_.size()) return false;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (pieces_[i].lo != other.pieces_[i].lo ||
        pieces_[i].hi != other.pieces_[i].hi) {
      return false;
    }
  }
  return true;
}

IntervalSet interval_union(const IntervalSet& a, const IntervalSet& b) {
  std::vector<Interval> all = a.pieces();
  all.insert(all.end(), b.pieces().begin(), b.pieces().end());
  return IntervalSet::from_intervals(std::move(all));
}

IntervalSet interval_intersect(const IntervalSet& a, const IntervalSet& b) {
  std::vector<Interval> out;
  std::size_t i = 0, j = 0;
  const auto& pa = a.pieces();
  const auto& pb = b.pieces();
  while (i < pa.size() && j < pb.size()) {
    const double lo = std::max(pa[i].lo, pb[j].lo);
    const double hi = std::min(pa[i].hi, pb[j].hi);
    if (lo <= hi) out.push_back({lo, hi});
    if (pa[i].hi < pb[j].hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return IntervalSet::from_intervals(std::move(out));
}

IntervalSet interval_complement_within(const IntervalSet& a, double lo,
                                       double hi) {
  if (lo > hi) throw NumericalFailure("complement window with lo > hi");
  std::vector<Interval> out;
  double cur = lo;
  for (const Interval& p : a.pieces()) {
    if (p.hi < lo) continue;
    if (p.lo > hi) break;
    if (p.lo > cur) out.push_back({cur, p.lo});
    cur = std::max(cur, p.hi);
    if (cur >= hi) break;
  }
  if (cur < hi) out.push_back({cur, hi});
  // A point piece [x,x] strictly inside the window splits [cur,x],[x,hi'];
  // from_intervals merges the exact touch back, i.e. removing a single point
  // leaves the closed interval unchanged (closure of the set difference).
  return IntervalSet::from_intervals(std::move(out));
}

}  // namespace robustsi
