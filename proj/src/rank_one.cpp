#include "rankone/rank_one.hpp"

#include <algorithm>
#include <limits>

namespace rankone {

namespace {

constexpr std::size_t kMaxExplicitPositions = 50'000'000;

bool mul_overflows(std::int64_t a, std::int64_t b, std::int64_t& out) {
  return __builtin_mul_overflow(a, b, &out);
}

bool add_overflows(std::int64_t a, std::int64_t b, std::int64_t& out) {
  return __builtin_add_overflow(a, b, &out);
}

}  // namespace

std::int64_t StageSpec::spacer_total() const {
  std::int64_t total = 0;
  for (auto s : spacers) total += s;
  return total;
}

RankOneSpec RankOneSpec::truncated(std::size_t stage_count) const {
  RankOneSpec out{*this};
  if (stage_count < out.stages.size()) out.stages.resize(stage_count);
  return out;
}

ValidationReport validate_spec(const RankOneSpec& spec) {
  ValidationReport report;
  if (spec.base_height < 1) {
    report.violations.push_back("base_height < 1");
    return report;
  }
  std::int64_t h = spec.base_height;
  Rational w{1};
  report.towers.push_back({1, h, w, w * h});
  for (std::size_t n = 0; n < spec.stages.size(); ++n) {
    const auto& st = spec.stages[n];
    const std::string where = "stage " + std::to_string(n + 1) + ": ";
    bool bad = false;
    if (st.cuts < 2) {
      report.violations.push_back(where + "cuts < 2");
      bad = true;
    }
    if (st.spacers.size() != static_cast<std::size_t>(std::max<std::int64_t>(st.cuts, 0))) {
      report.violations.push_back(where + "spacers has " + std::to_string(st.spacers.size()) +
                                  " entries, expected " + std::to_string(st.cuts));
      bad = true;
    }
    for (std::size_t i = 0; i < st.spacers.size(); ++i) {
      if (st.spacers[i] < 0) {
        report.violations.push_back(where + "spacer " + std::to_string(i + 1) + " is negative");
        bad = true;
      }
    }
    if (bad) return report;
    std::int64_t next = 0;
    std::int64_t total = 0;
    if (mul_overflows(st.cuts, h, next)) {
      report.violations.push_back(where + "height overflows 64 bits");
      return report;
    }
    for (auto s : st.spacers) {
      if (add_overflows(total, s, total) || add_overflows(next, s, next)) {
        report.violations.push_back(where + "height overflows 64 bits");
        return report;
      }
    }
    h = next;
    w /= st.cuts;
    report.spacer_mass += w * total;
    report.towers.push_back({n + 2, h, w, w * h});
  }
  return report;
}

Geometry::Geometry(const RankOneSpec& spec) : spec_(spec) {
  auto report = validate_spec(spec);
  if (!report.ok()) throw SpecError("invalid rank-one spec: " + report.violations.front());
  for (const auto& t : report.towers) {
    heights_.push_back(t.height);
    widths_.push_back(t.width);
  }
  for (std::size_t n = 0; n < spec.stages.size(); ++n) {
    const auto& st = spec.stages[n];
    std::vector<std::int64_t> off(static_cast<std::size_t>(st.cuts));
    for (std::size_t i = 1; i < off.size(); ++i) off[i] = off[i - 1] + heights_[n] + st.spacers[i - 1];
    offsets_.push_back(std::move(off));
  }
}

OccurrenceSet occurrence_set(const RankOneSpec& spec, std::size_t level_stage, std::size_t depth) {
  Geometry geo{spec};
  if (level_stage < 1 || level_stage > depth || depth > geo.depth_count()) {
    throw std::out_of_range("occurrence_set: need 1 <= level_stage <= depth <= " +
                            std::to_string(geo.depth_count()));
  }
  std::vector<Position> pos{0};
  for (std::size_t stage = level_stage; stage < depth; ++stage) {
    const auto off = geo.offsets(stage);
    if (pos.size() * off.size() > kMaxExplicitPositions) {
      throw std::length_error("occurrence_set: too many positions to materialize");
    }
    std::vector<Position> next;
    next.reserve(pos.size() * off.size());
    for (auto o : off)
      for (auto p : pos) next.push_back(p + o);
    pos = std::move(next);
  }
  return {level_stage, depth, std::move(pos), geo.height(depth), geo.width(depth)};
}

LevelFunction LevelFunction::indicator(std::size_t stage, std::int64_t level) {
  LevelFunction f;
  f.stage = stage;
  f.coefficients[level] = 1;
  return f;
}

Rational LevelFunction::norm_sq(const Geometry& geo) const {
  Rational s;
  for (const auto& [lvl, c] : coefficients) s += c * c;
  return s * geo.width(stage);
}

Rational LevelFunction::integral(const Geometry& geo) const {
  Rational s;
  for (const auto& [lvl, c] : coefficients) s += c;
  return s * geo.width(stage);
}

Rational LevelFunction::min_value() const {
  Rational m;
  for (const auto& [lvl, c] : coefficients) m = std::min(m, c);
  return m;
}

Rational LevelFunction::max_value() const {
  Rational m;
  for (const auto& [lvl, c] : coefficients) m = std::max(m, c);
  return m;
}

std::int64_t LevelFunction::max_level() const { return coefficients.rbegin()->first; }
std::int64_t LevelFunction::min_level() const { return coefficients.begin()->first; }

void check_function(const Geometry& geo, const LevelFunction& f) {
  if (f.stage < 1 || f.stage > geo.depth_count()) {
    throw std::out_of_range("level function stage " + std::to_string(f.stage) + " out of range");
  }
  if (f.coefficients.empty()) throw std::invalid_argument("level function has no levels");
  if (f.min_level() < 0 || f.max_level() >= geo.height(f.stage)) {
    throw std::out_of_range("level function level outside [0, h_" + std::to_string(f.stage) + ")");
  }
}

std::optional<std::int64_t> decode_level(const Geometry& geo, std::size_t from, Position p,
                                         std::size_t target) {
  if (p < 0 || p >= geo.height(from)) return std::nullopt;
  for (std::size_t depth = from; depth > target; --depth) {
    const std::size_t stage = depth - 1;
    const auto off = geo.offsets(stage);
    auto it = std::upper_bound(off.begin(), off.end(), p);
    const std::int64_t within = p - *(it - 1);
    if (within >= geo.height(stage)) return std::nullopt;
    p = within;
  }
  return p;
}

Rational evaluate(const Geometry& geo, const LevelFunction& f, std::size_t from, Position p) {
  auto lvl = decode_level(geo, from, p, f.stage);
  if (!lvl) return 0;
  auto it = f.coefficients.find(*lvl);
  return it == f.coefficients.end() ? Rational{0} : it->second;
}

std::optional<Position> point_map(const Geometry& geo, std::size_t depth, Position position,
                                  std::int64_t steps, std::span<const std::int64_t> columns) {
  if (depth < 1 || depth > geo.depth_count()) throw std::out_of_range("point_map: bad depth");
  if (position < 0 || position >= geo.height(depth)) {
    throw std::out_of_range("point_map: position outside tower");
  }
  Position p = position;
  for (std::size_t stage = depth, j = 0; stage < geo.depth_count(); ++stage, ++j) {
    const std::int64_t col = j < columns.size() ? columns[j] : 0;
    const auto off = geo.offsets(stage);
    if (col < 0 || col >= static_cast<std::int64_t>(off.size())) {
      throw std::out_of_range("point_map: column index out of range");
    }
    p += off[static_cast<std::size_t>(col)];
  }
  Position q = 0;
  if (__builtin_add_overflow(p, steps, &q)) return std::nullopt;
  if (q < 0 || q >= geo.height(geo.depth_count())) return std::nullopt;
  return q;
}

std::int64_t physical_cell(const Geometry& geo, std::size_t depth, Position p) {
  if (p < 0 || p >= geo.height(depth)) throw std::out_of_range("physical_cell: bad position");
  // Walk down to the stage where p is a spacer (or to depth 1), recording
  // the column chosen at each level, then rebuild the cell index upwards.
  std::vector<std::pair<std::int64_t, std::int64_t>> path;  // (cuts, column)
  std::int64_t cell = -1;
  std::size_t d = depth;
  for (; d > 1; --d) {
    const std::size_t stage = d - 1;
    const auto off = geo.offsets(stage);
    const std::int64_t h = geo.height(stage);
    const auto col = static_cast<std::size_t>(std::upper_bound(off.begin(), off.end(), p) - off.begin() - 1);
    const std::int64_t within = p - off[col];
    if (within < h) {
      path.emplace_back(static_cast<std::int64_t>(off.size()), static_cast<std::int64_t>(col));
      p = within;
      continue;
    }
    const auto& sp = geo.spec().stages[stage - 1].spacers;
    std::int64_t before = 0;
    for (std::size_t i = 0; i < col; ++i) before += sp[i];
    cell = h * static_cast<std::int64_t>(off.size()) + before + (within - h);
    break;
  }
  if (cell < 0) cell = p;
  for (auto it = path.rbegin(); it != path.rend(); ++it) cell = cell * it->first + it->second;
  return cell;
}

RhoBounds rho_distance(const RankOneSpec& a, const RankOneSpec& b, std::size_t depth) {
  if (depth < 1 || depth > a.depth_count() || depth > b.depth_count()) {
    throw std::out_of_range("rho_distance: depth exceeds spec");
  }
  Geometry ga{a.truncated(depth - 1)};
  Geometry gb{b.truncated(depth - 1)};
  const std::int64_t h = ga.height(depth);
  if (h != gb.height(depth) || ga.width(depth) != gb.width(depth)) {
    throw SpecError("rho_distance: specs do not share cell structure at depth " +
                    std::to_string(depth));
  }
  if (static_cast<std::uint64_t>(h) > kMaxExplicitPositions) {
    throw std::length_error("rho_distance: too many cells");
  }
  // image[c] = physical cell of T(c), -1 when T(c) leaves the tower.
  auto images = [h, depth](const Geometry& g) {
    std::vector<std::int64_t> cell_of(static_cast<std::size_t>(h));
    for (Position p = 0; p < h; ++p) cell_of[static_cast<std::size_t>(p)] = physical_cell(g, depth, p);
    std::vector<std::int64_t> image(static_cast<std::size_t>(h), -1);
    for (Position p = 0; p + 1 < h; ++p) {
      image[static_cast<std::size_t>(cell_of[static_cast<std::size_t>(p)])] =
          cell_of[static_cast<std::size_t>(p + 1)];
    }
    return image;
  };
  const auto ia = images(ga);
  const auto ib = images(gb);
  std::int64_t differ = 0, escape = 0;
  for (std::size_t c = 0; c < ia.size(); ++c) {
    if (ia[c] < 0 || ib[c] < 0) {
      ++escape;
    } else if (ia[c] != ib[c]) {
      ++differ;
    }
  }
  const Rational& w = ga.width(depth);
  return {w * differ, w * escape};
}

}  // namespace rankone
