#include "rankone/schedule.hpp"

#include <algorithm>

namespace rankone {

namespace {

std::int64_t ceil_mul(const Rational& g, std::int64_t b) {
  Rational v = g * Rational{BigInt{static_cast<long>(b)}};
  BigInt c;
  mpz_cdiv_q(c.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  if (!c.fits_slong_p()) throw ScheduleError("schedule breakpoint overflows");
  return c.get_si();
}

std::int64_t floor_div(std::int64_t len, const Rational& g) {
  Rational v = Rational{BigInt{static_cast<long>(len)}} / g;
  BigInt f;
  mpz_fdiv_q(f.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  return f.get_si();
}

}  // namespace

IntervalSchedule generate_schedule(const Rational& growth, std::int64_t horizon,
                                   const std::vector<std::int64_t>& seed_lengths) {
  if (growth < 2) throw ScheduleError("growth must be >= 2");
  if (horizon < 1) throw ScheduleError("horizon must be >= 1");
  for (auto len : seed_lengths) {
    if (len < 1) throw ScheduleError("seed lengths must be positive, got " + std::to_string(len));
  }
  std::vector<std::int64_t> breaks{0};
  const std::int64_t first = seed_lengths.empty() ? ceil_mul(growth, 1) : seed_lengths.front();
  breaks.push_back(first);
  for (std::size_t m = 1; breaks.back() < horizon || breaks.size() % 2 == 0; ++m) {
    const std::int64_t b = m < seed_lengths.size() ? breaks.back() + seed_lengths[m]
                                                   : ceil_mul(growth, breaks.back());
    breaks.push_back(b);
  }
  // Raw segments, then the overlaps.
  const std::size_t nblocks = (breaks.size() - 1) / 2;
  std::vector<Interval> is(nblocks), js(nblocks);
  for (std::size_t k = 0; k < nblocks; ++k) {
    is[k] = {breaks[2 * k] + 1, breaks[2 * k + 1]};
    js[k] = {breaks[2 * k + 1] + 1, breaks[2 * k + 2]};
  }
  for (std::size_t k = 0; k < nblocks; ++k) {
    js[k].lo -= std::min(floor_div(is[k].length(), growth), is[k].length() - 1);
    if (k + 1 < nblocks) is[k + 1].lo -= std::min(floor_div(js[k].length(), growth), js[k].length() - 1);
  }

  IntervalSchedule out;
  out.horizon = horizon;
  for (std::size_t k = 0; k < nblocks && is[k].lo <= horizon; ++k) {
    ScheduleBlock b;
    b.i = is[k].clipped(horizon);
    b.j = js[k].lo <= horizon ? js[k].clipped(horizon) : Interval::empty();
    if (!b.j.is_empty()) {
      const std::int64_t prev_j_end = k == 0 ? 0 : js[k - 1].hi;
      b.j_tilde = Interval{std::max(b.i.lo, prev_j_end + 1), b.j.lo - 1};
      const std::int64_t next_i_start = k + 1 < nblocks ? is[k + 1].lo : horizon + 1;
      b.i_tilde = Interval{std::max(b.j.lo, b.i.hi + 1), std::min(next_i_start - 1, b.j.hi)};
      if (b.j_tilde.is_empty()) b.j_tilde = Interval::empty();
      if (b.i_tilde.is_empty()) b.i_tilde = Interval::empty();
    } else {
      b.j_tilde = b.i_tilde = Interval::empty();
    }
    out.blocks.push_back(b);
  }
  return out;
}

ScheduleReport validate_schedule(const IntervalSchedule& s) {
  ScheduleReport r;
  auto fail = [&r](std::size_t n, const std::string& what) {
    r.violations.push_back("block " + std::to_string(n + 1) + ": " + what);
  };
  if (s.horizon < 1) r.violations.push_back("horizon < 1");
  for (std::size_t n = 0; n < s.blocks.size(); ++n) {
    const auto& b = s.blocks[n];
    if (b.i.is_empty()) fail(n, "I is empty");
    if (b.j.is_empty() && n + 1 != s.blocks.size()) fail(n, "J is empty before the last block");
    if (!b.i_tilde.within(b.j)) fail(n, "Ĩ " + b.i_tilde.str() + " not contained in J " + b.j.str());
    if (!b.j_tilde.within(b.i)) fail(n, "J̃ " + b.j_tilde.str() + " not contained in I " + b.i.str());
    if (!b.i.is_empty() && !b.j.is_empty() && b.j.lo <= b.i.lo) fail(n, "J starts before I");
    if (n + 1 < s.blocks.size()) {
      const auto& next = s.blocks[n + 1];
      if (!next.i.is_empty() && !b.i.is_empty() && b.i.hi >= next.i.lo) fail(n, "I intervals not increasing");
      if (!next.j.is_empty() && !b.j.is_empty() && b.j.hi >= next.j.lo) fail(n, "J intervals not increasing");
      if (!next.i.is_empty() && !b.j.is_empty() && next.i.lo <= b.j.lo) fail(n, "next I starts before J");
    }
  }
  // Exact coverage of [1, horizon].
  std::vector<Interval> all;
  for (const auto& b : s.blocks) {
    if (!b.i.is_empty()) all.push_back(b.i);
    if (!b.j.is_empty()) all.push_back(b.j);
  }
  std::sort(all.begin(), all.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::int64_t next = 1;
  for (const auto& iv : all) {
    if (next > s.horizon) break;
    if (iv.lo > next) break;
    next = std::max(next, iv.hi + 1);
  }
  if (next <= s.horizon) {
    r.first_uncovered = next;
    r.violations.push_back("uncovered: " + std::to_string(next));
  }
  return r;
}

}  // namespace rankone
