#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace renyi {

/// Interval on the extended real line, closed at finite endpoints.
struct Interval {
  double lo;
  double hi;

  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite union of disjoint closed intervals, kept sorted by lower endpoint.
class IntervalSet {
 public:
  IntervalSet() = default;
  /// Sorts and merges overlapping (or touching) intervals. Throws InvalidParameter on lo > hi or NaN.
  explicit IntervalSet(std::vector<Interval> intervals);

  static IntervalSet whole_line();
  static IntervalSet single(double lo, double hi);

  bool empty() const { return intervals_.empty(); }
  std::size_t size() const { return intervals_.size(); }
  std::span<const Interval> intervals() const { return intervals_; }
  const Interval& operator[](std::size_t i) const { return intervals_[i]; }

  bool contains(double x) const;
  IntervalSet intersect(const IntervalSet& other) const;
  bool is_subset_of(const IntervalSet& other) const;
  double total_length() const;
  /// Smallest and largest points of the set; undefined on an empty set.
  double lower() const { return intervals_.front().lo; }
  double upper() const { return intervals_.back().hi; }

  std::string to_string() const;

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Interval> intervals_;
};

}  // namespace renyi
