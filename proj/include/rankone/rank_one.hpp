#pragma once

// Rank-one cutting-and-stacking constructions with exact bookkeeping.
//
// Conventions used throughout the library:
//   * depth 1 is the initial tower (height base_height, level width 1);
//     depth n+1 is the tower obtained after applying stage n.
//   * a stage with r cuts splits the tower into r columns of equal width,
//     puts spacers[i] new levels on top of column i (every column,
//     including the last one), and stacks column i+1 on top of column i.
//     Hence h_{n+1} = r*h_n + sum(spacers) and w_{n+1} = w_n / r.
//   * positions inside a tower are counted from the bottom level (0).

#include "rankone/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rankone {

using Position = std::int64_t;

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StageSpec {
  std::int64_t cuts = 2;
  std::vector<std::int64_t> spacers;

  std::int64_t spacer_total() const;
  bool operator==(const StageSpec&) const = default;
};

struct RankOneSpec {
  std::vector<StageSpec> stages;
  std::int64_t base_height = 1;

  /// Number of towers described, i.e. stages.size() + 1.
  std::size_t depth_count() const { return stages.size() + 1; }
  /// The spec restricted to its first `stage_count` stages.
  RankOneSpec truncated(std::size_t stage_count) const;
  bool operator==(const RankOneSpec&) const = default;
};

struct StageReport {
  std::size_t depth = 0;
  std::int64_t height = 0;
  Rational width;
  Rational measure;
};

struct ValidationReport {
  std::vector<StageReport> towers;
  std::vector<std::string> violations;
  /// Partial sum of (spacers added at stage n) * w_{n+1}; grows without bound
  /// along the full construction iff the invariant measure is infinite.
  Rational spacer_mass;

  bool ok() const { return violations.empty(); }
};

ValidationReport validate_spec(const RankOneSpec& spec);

/// Derived tower geometry of a valid spec. Construction throws SpecError
/// on structural violations or 64-bit overflow of heights.
class Geometry {
 public:
  explicit Geometry(const RankOneSpec& spec);

  const RankOneSpec& spec() const { return spec_; }
  std::size_t depth_count() const { return heights_.size(); }
  std::int64_t height(std::size_t depth) const { return heights_.at(depth - 1); }
  const Rational& width(std::size_t depth) const { return widths_.at(depth - 1); }
  Rational measure(std::size_t depth) const { return width(depth) * height(depth); }
  /// Column offsets of `stage` (1-based): offsets[0] = 0,
  /// offsets[i+1] = offsets[i] + h_stage + spacers[i].
  std::span<const std::int64_t> offsets(std::size_t stage) const { return offsets_.at(stage - 1); }
  std::int64_t cuts(std::size_t stage) const { return spec_.stages.at(stage - 1).cuts; }

 private:
  RankOneSpec spec_;
  std::vector<std::int64_t> heights_;
  std::vector<Rational> widths_;
  std::vector<std::vector<std::int64_t>> offsets_;
};

/// Positions of the base level of the depth-`level_stage` tower inside the
/// depth-`depth` tower.
struct OccurrenceSet {
  std::size_t level_stage = 1;
  std::size_t depth = 1;
  std::vector<Position> positions;
  std::int64_t height = 0;
  Rational width;
};

OccurrenceSet occurrence_set(const RankOneSpec& spec, std::size_t level_stage, std::size_t depth);

/// f = sum_l c_l * 1_{level l of the depth-`stage` tower}.
struct LevelFunction {
  std::size_t stage = 1;
  std::map<std::int64_t, Rational> coefficients;

  static LevelFunction indicator(std::size_t stage, std::int64_t level = 0);

  Rational norm_sq(const Geometry& geo) const;
  Rational integral(const Geometry& geo) const;
  bool zero_mean(const Geometry& geo) const { return integral(geo) == 0; }
  Rational min_value() const;  ///< min(0, min c_l)
  Rational max_value() const;  ///< max(0, max c_l)
  std::int64_t max_level() const;
  std::int64_t min_level() const;
  bool operator==(const LevelFunction&) const = default;
};

void check_function(const Geometry& geo, const LevelFunction& f);

/// Level of the depth-`target` tower containing position `p` of the
/// depth-`from` tower, or nullopt when p lies on a spacer added later.
std::optional<std::int64_t> decode_level(const Geometry& geo, std::size_t from, Position p,
                                         std::size_t target);

/// Value of f on the level at position p of the depth-`from` tower.
Rational evaluate(const Geometry& geo, const LevelFunction& f, std::size_t from, Position p);

/// Orbit oracle. The cell at `position` of the depth-`depth` tower is
/// refined through every later stage by choosing a column (columns[j] for
/// the j-th later stage, column 0 when the path is shorter), then moved by
/// `steps` inside the deepest tower. Returns the deepest-tower position, or
/// nullopt when the orbit leaves the constructed region.
std::optional<Position> point_map(const Geometry& geo, std::size_t depth, Position position,
                                  std::int64_t steps,
                                  std::span<const std::int64_t> columns = {});

/// Index of the physical cell (interval [c*w_N, (c+1)*w_N) of the region
/// [0, h_N*w_N)) occupied by tower position p at depth N. Spacers added at
/// stage n occupy the new part of the region in column order.
std::int64_t physical_cell(const Geometry& geo, std::size_t depth, Position p);

struct RhoBounds {
  Rational lower;  ///< w_N * #cells where both maps are defined and differ
  Rational escaping;  ///< w_N * #cells where at least one map is undefined
  Rational upper() const { return lower + escaping; }
};

/// mu(supp(T_a^{-1} T_b)) resolved on the depth-N cells of two specs with the
/// same h_N and w_N. Throws SpecError on incompatible cell structure.
RhoBounds rho_distance(const RankOneSpec& a, const RankOneSpec& b, std::size_t depth);

}  // namespace rankone
