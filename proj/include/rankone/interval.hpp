#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

namespace rankone {

/// Closed integer interval [lo, hi]; empty when lo > hi.
struct Interval {
  std::int64_t lo = 1;
  std::int64_t hi = 0;

  static Interval empty() { return {1, 0}; }
  bool is_empty() const { return lo > hi; }
  std::int64_t length() const { return is_empty() ? 0 : hi - lo + 1; }
  bool contains(std::int64_t n) const { return lo <= n && n <= hi; }
  /// Empty intervals are contained in everything.
  bool within(const Interval& outer) const {
    return is_empty() || (!outer.is_empty() && outer.lo <= lo && hi <= outer.hi);
  }
  Interval clipped(std::int64_t horizon) const {
    return {lo, std::min(hi, horizon)};
  }
  std::string str() const {
    return is_empty() ? std::string{"[]"} : "[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
  }
  bool operator==(const Interval& o) const {
    return (is_empty() && o.is_empty()) || (lo == o.lo && hi == o.hi);
  }
};

}  // namespace rankone
