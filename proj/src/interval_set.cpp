#include "renyi/interval_set.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "renyi/errors.hpp"

namespace renyi {

IntervalSet::IntervalSet(std::vector<Interval> intervals) {
  for (const auto& iv : intervals) {
    if (std::isnan(iv.lo) || std::isnan(iv.hi)) throw InvalidParameter("interval", "NaN endpoint");
    if (iv.lo > iv.hi) throw InvalidParameter("interval", "lower endpoint exceeds upper endpoint");
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const auto& iv : intervals) {
    if (!intervals_.empty() && iv.lo <= intervals_.back().hi) {
      intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
    } else {
      intervals_.push_back(iv);
    }
  }
}

IntervalSet IntervalSet::whole_line() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return IntervalSet({{-inf, inf}});
}

IntervalSet IntervalSet::single(double lo, double hi) { return IntervalSet({{lo, hi}}); }

bool IntervalSet::contains(double x) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                             [](double v, const Interval& iv) { return v < iv.lo; });
  if (it == intervals_.begin()) return false;
  return std::prev(it)->contains(x);
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  IntervalSet out;
  std::size_t i = 0, j = 0;
  while (i < intervals_.size() && j < other.intervals_.size()) {
    const auto& a = intervals_[i];
    const auto& b = other.intervals_[j];
    const double lo = std::max(a.lo, b.lo);
    const double hi = std::min(a.hi, b.hi);
    if (lo <= hi) out.intervals_.push_back({lo, hi});
    if (a.hi < b.hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

bool IntervalSet::is_subset_of(const IntervalSet& other) const {
  return intersect(other) == *this;
}

double IntervalSet::total_length() const {
  double total = 0.0;
  for (const auto& iv : intervals_) total += iv.length();
  return total;
}

std::string IntervalSet::to_string() const {
  if (intervals_.empty()) return "{}";
  std::string out;
  char buf[96];
  for (std::size_t k = 0; k < intervals_.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%s[%.12g, %.12g]", k ? " U " : "", intervals_[k].lo,
                  intervals_[k].hi);
    out += buf;
  }
  return out;
}

}  // namespace renyi
