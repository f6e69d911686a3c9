#pragma once

// Exact correlations (f, T^n g) of level functions of a rank-one map.
//
// At depth N the supports of f and g are unions of levels sitting at the
// occurrence positions of their stage's base level. A point of f's support
// at tower position p is moved to p + n as long as p + n < h_N, so the pairs
// of occurrences at distance n give an exact lower part; points closer than n
// to the top of the tower are unresolved and only contribute to the bracket.

#include "rankone/interval.hpp"
#include "rankone/rank_one.hpp"

#include <memory>
#include <unordered_map>
#include <vector>

namespace rankone {

class CorrelationError : public std::runtime_error {
 public:
  CorrelationError(const std::string& what, Rational achieved_gap)
      : std::runtime_error(what), achieved_gap_(std::move(achieved_gap)) {}
  const Rational& achieved_gap() const { return achieved_gap_; }

 private:
  Rational achieved_gap_;
};

/// Counts over the occurrence set O_N of the base level of one stage:
///   pairs(N, d)   = #{(a, b) in O_N^2 : b - a = d}
///   at_least(N, t) = #{a in O_N : a >= t}
/// evaluated by the column-offset recursion without materializing O_N.
/// Results are memoized, so an instance must not be shared between threads.
class OccurrenceCounter {
 public:
  OccurrenceCounter(const Geometry& geo, std::size_t level_stage);

  std::size_t level_stage() const { return stage_; }
  BigInt pairs(std::size_t depth, std::int64_t distance);
  BigInt at_least(std::size_t depth, std::int64_t threshold);
  const BigInt& count(std::size_t depth) const { return counts_.at(depth - stage_); }
  /// Largest element of O_N (the smallest is always 0).
  std::int64_t max_position(std::size_t depth) const { return max_pos_.at(depth - stage_); }

 private:
  const Geometry& geo_;
  std::size_t stage_;
  std::vector<BigInt> counts_;
  std::vector<std::int64_t> max_pos_;
  std::vector<std::unordered_map<std::int64_t, BigInt>> pair_memo_;
  std::vector<std::unordered_map<std::int64_t, BigInt>> tail_memo_;
};

/// Correlations of one spec. Holds caches; one instance per thread.
class Correlator {
 public:
  explicit Correlator(RankOneSpec spec);
  Correlator(const Correlator&) = delete;
  Correlator& operator=(const Correlator&) = delete;

  const Geometry& geometry() const { return geo_; }

  /// Bracket on (f, T^n g) resolved at the given depth (n of any sign).
  Bracket at_depth(const LevelFunction& f, const LevelFunction& g, std::int64_t n, std::size_t depth);

  /// Deepens from the functions' stage until upper - lower <= tolerance.
  /// Throws CorrelationError when the spec is exhausted first.
  Bracket cross(const LevelFunction& f, const LevelFunction& g, std::int64_t n,
                const Rational& tolerance);
  Bracket autocorrelation(const LevelFunction& f, std::int64_t n, const Rational& tolerance) {
    return cross(f, f, n, tolerance);
  }

  /// Depth at which the last call to cross() stopped.
  std::size_t last_depth() const { return last_depth_; }

 private:
  OccurrenceCounter& counter(std::size_t stage);
  LevelFunction lift(const LevelFunction& f, std::size_t stage) const;

  Geometry geo_;
  std::vector<std::unique_ptr<OccurrenceCounter>> counters_;
  std::size_t last_depth_ = 0;
};

Bracket autocorrelation(const RankOneSpec& spec, const LevelFunction& f, std::int64_t n,
                        const Rational& tolerance);
Bracket cross_correlation(const RankOneSpec& spec, const LevelFunction& f, const LevelFunction& g,
                          std::int64_t n, const Rational& tolerance);

struct CorrelationSequence {
  std::int64_t first = 0;
  std::vector<Bracket> entries;  ///< entries[i] bounds the value at n = first + i
  Rational norm_sq;              ///< ||f||^2 (||f||^2 * ||g||^2 for products)
  std::string subject;

  std::int64_t last() const { return first + static_cast<std::int64_t>(entries.size()) - 1; }
  bool covers(std::int64_t n) const { return n >= first && n <= last(); }
  bool covers(const Interval& iv) const { return iv.is_empty() || (covers(iv.lo) && covers(iv.hi)); }
  /// Entry at n; negative n is answered from the even extension.
  const Bracket& at(std::int64_t n) const;
};

CorrelationSequence autocorrelation_sequence(const RankOneSpec& spec, const LevelFunction& f,
                                             std::int64_t first, std::int64_t last,
                                             const Rational& tolerance);

/// Bracket on sum_{n in I} |rho(n)|.
Bracket corr_functional(const CorrelationSequence& seq, const Interval& interval);

/// Entrywise bracket product over the common range.
CorrelationSequence product_correlation(const CorrelationSequence& s, const CorrelationSequence& t);

/// "n\tlower\tupper" rows with rationals as num/den.
std::string to_table(const CorrelationSequence& seq);

}  // namespace rankone
