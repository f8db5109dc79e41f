#pragma once

#include <utility>
#include <vector>

#include "rational.hpp"

namespace md {

// Continuous piecewise-linear function on [start, +inf), exact rational
// breakpoints, constant slope after the last breakpoint. All the "earliest
// time such that ..." detectors reduce to crossing queries on sums, hinges
// and maxima of these.
class PLFn {
 public:
  PLFn() = default;
  // Single anchor point + final slope.
  PLFn(Rat start, Rat value, Rat slope);

  static PLFn constant(const Rat& start, const Rat& value) {
    return PLFn(start, value, Rat(0));
  }

  // Points must be strictly increasing in time; at least one point.
  static PLFn from_points(std::vector<std::pair<Rat, Rat>> pts, Rat final_slope);

  const Rat& start() const { return pts_.front().first; }
  Rat eval(const Rat& t) const;  // requires t >= start()
  Rat final_slope() const { return slope_; }
  const std::vector<std::pair<Rat, Rat>>& points() const { return pts_; }

  PLFn operator+(const PLFn& o) const;
  PLFn operator-(const Rat& c) const;
  // Pointwise maximum; inserts interior intersection points as needed.
  static PLFn max(const PLFn& a, const PLFn& b);
  PLFn max0() const { return max(*this, constant(start(), Rat(0))); }

  // Earliest t >= start() with f(t) >= target, or nullopt when the function
  // stays below target forever. Non-decreasing inputs give exact answers;
  // general inputs are handled by scanning segments left to right.
  MaybeTime crossing(const Rat& target) const;

  bool non_decreasing() const;

 private:
  std::vector<std::pair<Rat, Rat>> pts_;  // strictly increasing times
  Rat slope_ = Rat(0);

  void normalize();
  friend PLFn merge_binary(const PLFn& a, const PLFn& b, bool take_max);
};

}  // namespace md
