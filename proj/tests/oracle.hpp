#pragma once

// Test-only oracles. Everything here re-derives tower structure by literally
// cutting and stacking physical cells, without using Geometry offsets,
// occurrence recursions or the library's decoding routines.

#include "rankone/correlation.hpp"
#include "rankone/rank_one.hpp"
#include "rankone/walsh.hpp"

#include <optional>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using rankone::Rational;

/// Physical cell ids of every depth, bottom to top. A cell id c at depth N is
/// the interval [c*w_N, (c+1)*w_N).
struct ExplicitTowers {
  std::vector<std::vector<std::int64_t>> cells;  // cells[N-1]
  std::vector<Rational> widths;
  std::vector<std::int64_t> refine;  // refine[N-1] = product of cuts of stages < N

  explicit ExplicitTowers(const rankone::RankOneSpec& spec) {
    std::vector<std::int64_t> tower;
    for (std::int64_t i = 0; i < spec.base_height; ++i) tower.push_back(i);
    cells.push_back(tower);
    widths.emplace_back(1);
    refine.push_back(1);
    for (const auto& st : spec.stages) {
      const auto h = static_cast<std::int64_t>(tower.size());
      std::int64_t next_spacer = h * st.cuts;
      std::vector<std::int64_t> next;
      for (std::int64_t col = 0; col < st.cuts; ++col) {
        for (auto c : tower) next.push_back(c * st.cuts + col);
        for (std::int64_t s = 0; s < st.spacers[static_cast<std::size_t>(col)]; ++s) next.push_back(next_spacer++);
      }
      tower = std::move(next);
      cells.push_back(tower);
      widths.push_back(widths.back() / st.cuts);
      refine.push_back(refine.back() * st.cuts);
    }
  }

  std::size_t deepest() const { return cells.size(); }

  /// Value of f at the depth-N tower position p: the cell must descend from
  /// the physical cell of one of f's levels.
  Rational value(const rankone::LevelFunction& f, std::size_t depth, std::int64_t p) const {
    const std::int64_t c = cells[depth - 1][static_cast<std::size_t>(p)];
    const std::int64_t factor = refine[depth - 1] / refine[f.stage - 1];
    const std::int64_t ancestor = c / factor;
    const auto& base = cells[f.stage - 1];
    for (const auto& [lvl, coeff] : f.coefficients) {
      if (base[static_cast<std::size_t>(lvl)] == ancestor) return coeff;
    }
    return 0;
  }
};

/// (f, T^n g) bracket obtained by enumerating every cell of the deepest tower.
inline rankone::Bracket brute_correlation(const rankone::RankOneSpec& spec,
                                          const rankone::LevelFunction& f,
                                          const rankone::LevelFunction& g, std::int64_t n) {
  ExplicitTowers t{spec};
  const std::size_t N = t.deepest();
  const auto& tower = t.cells[N - 1];
  const auto h = static_cast<std::int64_t>(tower.size());
  const Rational gmin = g.min_value(), gmax = g.max_value();
  Rational lo, hi;
  for (std::int64_t p = 0; p < h; ++p) {
    const Rational fv = t.value(f, N, p);
    if (fv == 0) continue;
    const std::int64_t q = p + n;
    if (q >= 0 && q < h) {
      const Rational v = fv * t.value(g, N, q);
      lo += v;
      hi += v;
    } else {
      lo += std::min(Rational{fv * gmin}, Rational{fv * gmax});
      hi += std::max(Rational{fv * gmin}, Rational{fv * gmax});
    }
  }
  return {lo * t.widths[N - 1], hi * t.widths[N - 1]};
}

inline rankone::RankOneSpec random_spec(std::mt19937_64& rng, int max_stages = 6,
                                        std::int64_t max_height = 4000) {
  std::uniform_int_distribution<int> stages_d(1, max_stages);
  std::uniform_int_distribution<std::int64_t> cuts_d(2, 3), spacer_d(0, 3), base_d(1, 3);
  rankone::RankOneSpec spec;
  spec.base_height = base_d(rng);
  std::int64_t h = spec.base_height;
  const int stages = stages_d(rng);
  for (int i = 0; i < stages; ++i) {
    rankone::StageSpec st;
    st.cuts = cuts_d(rng);
    for (std::int64_t c = 0; c < st.cuts; ++c) st.spacers.push_back(spacer_d(rng));
    const std::int64_t next = st.cuts * h + st.spacer_total();
    if (next > max_height) break;
    h = next;
    spec.stages.push_back(st);
  }
  return spec;
}

inline rankone::RankOneSpec odometer(int stages, std::int64_t cuts = 2) {
  rankone::RankOneSpec spec;
  for (int i = 0; i < stages; ++i) {
    spec.stages.push_back({cuts, std::vector<std::int64_t>(static_cast<std::size_t>(cuts), 0)});
  }
  return spec;
}

// Exact point on the unit sphere from k-1 rationals (inverse stereographic).
inline std::vector<Rational> unit_vector(std::mt19937_64& rng, std::size_t k) {
  std::uniform_int_distribution<std::int64_t> num(-9, 9), den(1, 7);
  std::vector<Rational> t;
  Rational norm;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    t.push_back(rankone::make_rational(num(rng), den(rng)));
    norm += t.back() * t.back();
  }
  std::vector<Rational> x;
  for (const auto& ti : t) x.push_back(2 * ti / (1 + norm));
  x.push_back((norm - 1) / (1 + norm));
  return x;
}

inline rankone::WalshPolynomial random_unit_walsh(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> terms(1, 6);
  std::uniform_int_distribution<std::int64_t> idx(-6, 6), width(1, 3);
  const auto x = unit_vector(rng, terms(rng));
  rankone::WalshPolynomial f;
  std::set<rankone::IndexSet> used;
  for (const auto& c : x) {
    rankone::IndexSet s;
    do {
      std::set<std::int64_t> pick;
      const auto w = width(rng);
      while (static_cast<std::int64_t>(pick.size()) < w) pick.insert(idx(rng));
      s.assign(pick.begin(), pick.end());
    } while (used.contains(s));
    used.insert(s);
    f.add(s, c);
  }
  return f;
}

}  // namespace oracle
