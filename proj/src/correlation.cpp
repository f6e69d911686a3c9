#include "rankone/correlation.hpp"

#include <algorithm>
#include <sstream>

namespace rankone {

namespace {

constexpr std::size_t kMaxLiftedLevels = 1'000'000;

}  // namespace

OccurrenceCounter::OccurrenceCounter(const Geometry& geo, std::size_t level_stage)
    : geo_(geo), stage_(level_stage) {
  if (level_stage < 1 || level_stage > geo.depth_count()) {
    throw std::out_of_range("OccurrenceCounter: stage out of range");
  }
  counts_.emplace_back(1);
  max_pos_.push_back(0);
  for (std::size_t stage = level_stage; stage < geo.depth_count(); ++stage) {
    const auto off = geo.offsets(stage);
    counts_.push_back(counts_.back() * static_cast<long>(off.size()));
    max_pos_.push_back(max_pos_.back() + off.back());
  }
  pair_memo_.resize(counts_.size());
  tail_memo_.resize(counts_.size());
}

BigInt OccurrenceCounter::pairs(std::size_t depth, std::int64_t distance) {
  if (depth < stage_ || depth > geo_.depth_count()) throw std::out_of_range("pairs: bad depth");
  const std::int64_t d = distance < 0 ? -distance : distance;
  const std::size_t idx = depth - stage_;
  if (idx == 0) return d == 0 ? BigInt{1} : BigInt{0};
  if (d > max_pos_[idx]) return 0;
  if (d == 0) return counts_[idx];
  auto& memo = pair_memo_[idx];
  if (auto it = memo.find(d); it != memo.end()) return it->second;

  // O_N = union_i (O_{N-1} + off_i); a pair (a + off_i, b + off_j) has
  // distance (b - a) + (off_j - off_i) with |b - a| <= R.
  const auto off = geo_.offsets(depth - 1);
  const std::int64_t radius = max_pos_[idx - 1];
  BigInt total = 0;
  for (std::size_t i = 0; i < off.size(); ++i) {
    const std::int64_t lo = d + off[i] - radius;
    const std::int64_t hi = d + off[i] + radius;
    auto first = std::lower_bound(off.begin(), off.end(), lo);
    auto last = std::upper_bound(off.begin(), off.end(), hi);
    for (auto it = first; it != last; ++it) {
      total += pairs(depth - 1, d - (*it - off[i]));
    }
  }
  memo.emplace(d, total);
  return total;
}

BigInt OccurrenceCounter::at_least(std::size_t depth, std::int64_t threshold) {
  if (depth < stage_ || depth > geo_.depth_count()) throw std::out_of_range("at_least: bad depth");
  const std::size_t idx = depth - stage_;
  if (threshold <= 0) return counts_[idx];
  if (threshold > max_pos_[idx]) return 0;
  auto& memo = tail_memo_[idx];
  if (auto it = memo.find(threshold); it != memo.end()) return it->second;
  BigInt total = 0;
  for (auto o : geo_.offsets(depth - 1)) total += at_least(depth - 1, threshold - o);
  memo.emplace(threshold, total);
  return total;
}

Correlator::Correlator(RankOneSpec spec) : geo_(spec) { counters_.resize(geo_.depth_count()); }

OccurrenceCounter& Correlator::counter(std::size_t stage) {
  auto& slot = counters_.at(stage - 1);
  if (!slot) slot = std::make_unique<OccurrenceCounter>(geo_, stage);
  return *slot;
}

LevelFunction Correlator::lift(const LevelFunction& f, std::size_t stage) const {
  if (f.stage == stage) return f;
  std::vector<Position> pos{0};
  for (std::size_t s = f.stage; s < stage; ++s) {
    const auto off = geo_.offsets(s);
    if (pos.size() * off.size() * f.coefficients.size() > kMaxLiftedLevels) {
      throw std::length_error("level function too fine to lift to stage " + std::to_string(stage));
    }
    std::vector<Position> next;
    for (auto o : off)
      for (auto p : pos) next.push_back(p + o);
    pos = std::move(next);
  }
  LevelFunction out;
  out.stage = stage;
  for (auto p : pos)
    for (const auto& [lvl, c] : f.coefficients) out.coefficients[p + lvl] = c;
  return out;
}

Bracket Correlator::at_depth(const LevelFunction& f, const LevelFunction& g, std::int64_t n,
                             std::size_t depth) {
  if (n < 0) return at_depth(g, f, -n, depth);
  check_function(geo_, f);
  check_function(geo_, g);
  const std::size_t stage = std::max(f.stage, g.stage);
  if (depth < stage || depth > geo_.depth_count()) {
    throw std::out_of_range("correlation depth " + std::to_string(depth) + " out of range");
  }
  const LevelFunction lf = lift(f, stage);
  const LevelFunction lg = lift(g, stage);
  auto& occ = counter(stage);

  Rational known;
  for (const auto& [l1, c1] : lf.coefficients) {
    for (const auto& [l2, c2] : lg.coefficients) {
      const BigInt cnt = occ.pairs(depth, n + l1 - l2);
      if (cnt != 0) known += c1 * c2 * Rational{cnt};
    }
  }
  // A point of f's support that leaves the tower meets some value of g in
  // [min(0, min g), max(0, max g)].
  const Rational gmin = lg.min_value();
  const Rational gmax = lg.max_value();
  Rational lo, hi;
  const std::int64_t h = geo_.height(depth);
  for (const auto& [l1, c1] : lf.coefficients) {
    const BigInt esc = occ.at_least(depth, h - l1 - n);
    if (esc == 0) continue;
    const Rational a = c1 * gmin, b = c1 * gmax;
    lo += std::min(a, b) * Rational{esc};
    hi += std::max(a, b) * Rational{esc};
  }
  const Rational& w = geo_.width(depth);
  return {w * (known + lo), w * (known + hi)};
}

Bracket Correlator::cross(const LevelFunction& f, const LevelFunction& g, std::int64_t n,
                          const Rational& tolerance) {
  if (n < 0) return cross(g, f, -n, tolerance);
  check_function(geo_, f);
  check_function(geo_, g);
  const std::size_t stage = std::max(f.stage, g.stage);
  const LevelFunction lf = lift(f, stage);
  const Rational range = lift(g, stage).max_value() - lift(g, stage).min_value();
  auto& occ = counter(stage);
  Rational gap;
  for (std::size_t depth = stage; depth <= geo_.depth_count(); ++depth) {
    gap = 0;
    const std::int64_t h = geo_.height(depth);
    for (const auto& [l1, c1] : lf.coefficients) {
      const BigInt esc = occ.at_least(depth, h - l1 - n);
      if (esc != 0) gap += abs(c1) * range * Rational{esc};
    }
    gap *= geo_.width(depth);
    if (gap <= tolerance) {
      last_depth_ = depth;
      return at_depth(f, g, n, depth);
    }
  }
  last_depth_ = geo_.depth_count();
  throw CorrelationError("spec exhausted at n=" + std::to_string(n) +
                             " with bracket width " + to_string(gap) + " > tolerance " +
                             to_string(tolerance),
                         gap);
}

Bracket autocorrelation(const RankOneSpec& spec, const LevelFunction& f, std::int64_t n,
                        const Rational& tolerance) {
  Correlator c{spec};
  return c.autocorrelation(f, n, tolerance);
}

Bracket cross_correlation(const RankOneSpec& spec, const LevelFunction& f, const LevelFunction& g,
                          std::int64_t n, const Rational& tolerance) {
  Correlator c{spec};
  return c.cross(f, g, n, tolerance);
}

const Bracket& CorrelationSequence::at(std::int64_t n) const {
  const std::int64_t m = (n < 0 && !covers(n)) ? -n : n;
  if (!covers(m)) throw std::out_of_range("correlation sequence does not cover n=" + std::to_string(n));
  return entries[static_cast<std::size_t>(m - first)];
}

CorrelationSequence autocorrelation_sequence(const RankOneSpec& spec, const LevelFunction& f,
                                             std::int64_t first, std::int64_t last,
                                             const Rational& tolerance) {
  if (first > last) throw std::invalid_argument("empty correlation range");
  Correlator c{spec};
  CorrelationSequence seq;
  seq.first = first;
  seq.norm_sq = f.norm_sq(c.geometry());
  seq.subject = "autocorrelation";
  seq.entries.reserve(static_cast<std::size_t>(last - first + 1));
  for (std::int64_t n = first; n <= last; ++n) seq.entries.push_back(c.autocorrelation(f, n, tolerance));
  return seq;
}

Bracket corr_functional(const CorrelationSequence& seq, const Interval& interval) {
  if (!seq.covers(interval)) {
    throw std::out_of_range("corr_functional: interval " + interval.str() + " not covered");
  }
  Bracket sum{0, 0};
  for (std::int64_t n = interval.lo; n <= interval.hi; ++n) {
    const Bracket a = abs_bounds(seq.at(n));
    sum.lower += a.lower;
    sum.upper += a.upper;
  }
  return sum;
}

CorrelationSequence product_correlation(const CorrelationSequence& s, const CorrelationSequence& t) {
  const std::int64_t first = std::max(s.first, t.first);
  const std::int64_t last = std::min(s.last(), t.last());
  if (first > last) throw std::invalid_argument("product_correlation: ranges do not overlap");
  CorrelationSequence out;
  out.first = first;
  out.norm_sq = s.norm_sq * t.norm_sq;
  out.subject = "(" + s.subject + ") x (" + t.subject + ")";
  for (std::int64_t n = first; n <= last; ++n) out.entries.push_back(multiply(s.at(n), t.at(n)));
  return out;
}

std::string to_table(const CorrelationSequence& seq) {
  std::ostringstream os;
  os << "n\tlower\tupper\n";
  for (std::size_t i = 0; i < seq.entries.size(); ++i) {
    os << seq.first + static_cast<std::int64_t>(i) << '\t' << to_string(seq.entries[i].lower) << '\t'
       << to_string(seq.entries[i].upper) << '\n';
  }
  return os.str();
}

}  // namespace rankone
