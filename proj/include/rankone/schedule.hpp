#pragma once

// Interleaved time-interval systems I_n, Ĩ_n, J_n, J̃_n with Ĩ_n ⊂ J_n,
// J̃_n ⊂ I_n and the I's and J's together covering [1, horizon].

#include "rankone/interval.hpp"
#include "rankone/rational.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rankone {

struct ScheduleBlock {
  Interval i;        ///< I_n: times where S correlations must vanish
  Interval i_tilde;  ///< Ĩ_n ⊂ J_n: room for generic stages of S
  Interval j;        ///< J_n: times where T correlations must vanish
  Interval j_tilde;  ///< J̃_n ⊂ I_n: room for generic stages of T
  bool operator==(const ScheduleBlock&) const = default;
};

struct IntervalSchedule {
  std::vector<ScheduleBlock> blocks;
  std::int64_t horizon = 0;
  bool operator==(const IntervalSchedule&) const = default;
};

struct ScheduleReport {
  std::vector<std::string> violations;
  std::optional<std::int64_t> first_uncovered;
  bool ok() const { return violations.empty(); }
};

class ScheduleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Breakpoints b_0 = 0 < b_1 < ... grow by `growth` once the seed lengths
/// (lengths of the first segments, default ceil(growth)) are used up. Odd
/// segments become I_k, even ones J_k; each J_k reaches back into I_k and each
/// I_{k+1} into J_k by floor(length / growth). The tilde intervals are the
/// parts not shared with a neighbour of the other family.
IntervalSchedule generate_schedule(const Rational& growth, std::int64_t horizon,
                                   const std::vector<std::int64_t>& seed_lengths = {});

ScheduleReport validate_schedule(const IntervalSchedule& s);

}  // namespace rankone
