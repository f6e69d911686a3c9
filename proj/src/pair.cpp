#include "rankone/pair.hpp"

#include <algorithm>
#include <numeric>

namespace rankone {

PolynomialSpec PolynomialSpec::delta(std::int64_t z) {
  PolynomialSpec p;
  p.coefficients[z] = 1;
  return p;
}

Rational PolynomialSpec::mass() const {
  Rational m;
  for (const auto& [z, a] : coefficients) m += a;
  return m;
}

bool PolynomialSpec::is_delta_zero() const {
  return coefficients.size() == 1 && coefficients.begin()->first == 0 &&
         coefficients.begin()->second == 1;
}

void PolynomialSpec::validate(bool probability_space) const {
  if (coefficients.empty()) throw std::invalid_argument("polynomial has no terms");
  for (const auto& [z, a] : coefficients) {
    if (a < 0) throw std::invalid_argument("polynomial weight a_" + std::to_string(z) + " < 0");
    if (z < 0) {
      throw std::invalid_argument("polynomial power z=" + std::to_string(z) +
                                  " cannot be realized by spacers");
    }
  }
  const Rational m = mass();
  if (m > 1) throw std::invalid_argument("polynomial mass " + to_string(m) + " exceeds 1");
  if (probability_space && m != 1) {
    throw std::invalid_argument("probability-space polynomial must have mass 1");
  }
}

SpacerHistogram realize_histogram(const PolynomialSpec& poly, std::int64_t cuts) {
  poly.validate();
  if (cuts < 2) throw std::invalid_argument("cuts must be >= 2");
  struct Slot {
    std::int64_t z;  // escape slot uses z = -1
    Rational weight;
    std::int64_t count;
    Rational frac;
  };
  std::vector<Slot> slots;
  for (const auto& [z, a] : poly.coefficients) slots.push_back({z, a, 0, 0});
  const Rational escape = 1 - poly.mass();
  if (escape > 0) slots.push_back({-1, escape, 0, 0});
  std::int64_t assigned = 0;
  for (auto& s : slots) {
    const Rational quota = s.weight * cuts;
    BigInt fl;
    mpz_fdiv_q(fl.get_mpz_t(), quota.get_num_mpz_t(), quota.get_den_mpz_t());
    s.count = fl.get_si();
    s.frac = quota - Rational{fl};
    assigned += s.count;
  }
  std::vector<std::size_t> order(slots.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return slots[a].frac > slots[b].frac; });
  for (std::size_t k = 0; assigned < cuts; ++k, ++assigned) ++slots[order[k % order.size()]].count;

  SpacerHistogram h;
  for (const auto& s : slots) {
    const Rational realized = make_rational(s.count, cuts);
    h.rounding_mass += abs(realized - s.weight);
    if (s.z < 0) {
      h.escape_columns = s.count;
    } else if (s.count > 0) {
      h.counts[s.z] = s.count;
    }
  }
  return h;
}

StageSpec design_blocking_stage(std::int64_t current_height, const Interval& forbidden,
                                std::int64_t cuts, std::int64_t span) {
  if (current_height < 1) throw std::invalid_argument("current height must be >= 1");
  if (cuts < 2) throw std::invalid_argument("cuts must be >= 2");
  if (forbidden.is_empty()) throw std::invalid_argument("forbidden interval is empty");
  if (span < 0) throw std::invalid_argument("span must be >= 0");
  if (span >= forbidden.lo) {
    throw PlanError("forbidden interval " + forbidden.str() +
                    " already overlapped by existing distances up to " + std::to_string(span));
  }
  // A cross-column distance is at least h + s - span.
  const std::int64_t s = std::max<std::int64_t>(0, forbidden.hi + 1 + span - current_height);
  return {cuts, std::vector<std::int64_t>(static_cast<std::size_t>(cuts), s)};
}

StageSpec design_generic_stage(std::int64_t current_height, const Interval& budget,
                               const PolynomialSpec& poly, std::int64_t cuts, std::int64_t span) {
  if (current_height < 1) throw std::invalid_argument("current height must be >= 1");
  if (budget.is_empty()) throw PlanError("generic budget is empty");
  const auto hist = realize_histogram(poly, cuts);
  StageSpec st;
  st.cuts = cuts;
  for (const auto& [z, count] : hist.counts) st.spacers.insert(st.spacers.end(), static_cast<std::size_t>(count), z);
  st.spacers.insert(st.spacers.end(), static_cast<std::size_t>(hist.escape_columns), current_height);

  std::int64_t height = 0, top_offset = 0;
  bool overflow = __builtin_mul_overflow(cuts, current_height, &height);
  for (std::size_t i = 0; i < st.spacers.size() && !overflow; ++i) {
    overflow = __builtin_add_overflow(height, st.spacers[i], &height);
    if (i + 1 < st.spacers.size()) {
      overflow = overflow || __builtin_add_overflow(top_offset, current_height + st.spacers[i], &top_offset);
    }
  }
  if (overflow || height > budget.hi || top_offset + span > budget.hi) {
    throw PlanError("budget " + budget.str() + " too small for a " + std::to_string(cuts) +
                    "-cut generic stage at height " + std::to_string(current_height));
  }
  return st;
}

namespace {

struct Event {
  bool blocking = false;
  Interval window;          ///< forbidden interval, or generic budget
  Interval next_forbidden;  ///< next forbidden interval within the horizon
  std::size_t block = 0;
};

struct GenericStage {
  std::size_t stage;
  std::int64_t time;
  std::int64_t cuts;
  PolynomialSpec poly;
  bool in_window;
};

struct FactorPlan {
  RankOneSpec spec;
  std::vector<StageLedgerEntry> ledger;
  std::vector<GenericStage> generic;
  std::vector<Interval> forbidden;
};

FactorPlan plan_factor(const std::string& name, const std::vector<Event>& events,
                       const PairPolicy& policy, std::int64_t horizon) {
  FactorPlan out;
  out.spec.base_height = policy.base_height;
  std::int64_t h = policy.base_height;
  std::int64_t span = 0;  // tracked support starts as the single level 0
  std::size_t generic_index = 0;
  constexpr std::int64_t kCap = std::int64_t{1} << 40;
  std::int64_t occurrences = 1;  // of the tracked level in the current tower

  auto append = [&](const StageSpec& st, StageKind kind) {
    const std::int64_t min_sp = *std::min_element(st.spacers.begin(), st.spacers.end());
    std::int64_t top_offset = 0;
    for (std::size_t i = 0; i + 1 < st.spacers.size(); ++i) top_offset += h + st.spacers[i];
    StageLedgerEntry e;
    e.stage = out.spec.stages.size() + 1;
    e.kind = kind;
    e.height_before = h;
    e.min_new_distance = h + min_sp - span;
    e.max_distance = top_offset + span;
    out.ledger.push_back(e);
    out.spec.stages.push_back(st);
    if (out.spec.stages.size() >= policy.tracked_stage) occurrences = std::min(occurrences * st.cuts, kCap);
    h = st.cuts * h + st.spacer_total();
    span = e.max_distance;
  };

  for (const auto& ev : events) {
    if (ev.window.is_empty()) continue;
    if (ev.blocking) {
      out.forbidden.push_back(ev.window);
      StageSpec st;
      try {
        st = design_blocking_stage(h, ev.window, policy.blocking_cuts, span);
      } catch (const PlanError& e) {
        throw PlanError(name + " block " + std::to_string(ev.block + 1) + ": " + e.what());
      }
      append(st, StageKind::blocking);
      if (!ev.next_forbidden.is_empty() && span >= ev.next_forbidden.lo) {
        throw PlanError(name + " block " + std::to_string(ev.block + 1) +
                        ": schedule geometry incompatible with height growth (distances reach " +
                        std::to_string(span) + ", next forbidden interval " +
                        ev.next_forbidden.str() + ")");
      }
      continue;
    }
    for (std::int64_t count = 0; count < policy.max_generic_per_window; ++count) {
      const auto cuts = policy.generic_cuts[generic_index % policy.generic_cuts.size()];
      PolynomialSpec poly = policy.generic_polys[generic_index % policy.generic_polys.size()];
      // Occurrences within z of the tower bottom leave the column under
      // T^{-z}; keep their share at most 1/cuts, else place a rigidity stage.
      const std::int64_t z_max = poly.coefficients.rbegin()->first;
      const bool delayed = z_max > 0 && occurrences < cuts * z_max;
      if (delayed) poly = PolynomialSpec::delta(0);
      Interval budget = ev.window;
      if (!ev.next_forbidden.is_empty()) budget.hi = std::min(budget.hi, ev.next_forbidden.lo - 1);
      StageSpec st;
      try {
        st = design_generic_stage(h, budget, poly, cuts, span);
      } catch (const PlanError&) {
        break;
      }
      out.generic.push_back({out.spec.stages.size() + 1, h, cuts, poly, ev.window.contains(h)});
      append(st, StageKind::generic);
      if (!delayed) ++generic_index;
    }
  }
  // Clearance h - span above the horizon makes every correlation on
  // [0, horizon] exact.
  if (out.spec.stages.empty() || h - span <= horizon) {
    append(design_blocking_stage(h, {span + 1, std::max(span + 1, horizon)}, 2, span),
           StageKind::terminal);
  }
  return out;
}

CorrelationSequence exact_sequence(Correlator& c, const LevelFunction& f, std::int64_t horizon,
                                   const std::string& subject) {
  CorrelationSequence seq;
  seq.first = 0;
  seq.norm_sq = f.norm_sq(c.geometry());
  seq.subject = subject;
  for (std::int64_t n = 0; n <= horizon; ++n) seq.entries.push_back(c.autocorrelation(f, n, 0));
  return seq;
}

ConstructionCertificate make_certificate(const std::string& name, const FactorPlan& plan,
                                         const LevelFunction& f, const CorrelationSequence& seq,
                                         std::int64_t horizon) {
  ConstructionCertificate cert;
  cert.factor = name;
  cert.tracked = f;
  cert.horizon = horizon;
  cert.min_distance_ledger = plan.ledger;
  for (const auto& iv : plan.forbidden) {
    ZeroClaim claim{iv, true, std::nullopt};
    for (std::int64_t n = iv.lo; n <= iv.hi; ++n) {
      if (!(seq.at(n).exact() && seq.at(n).lower == 0)) {
        claim.exact_zero = false;
        claim.first_violation = n;
        break;
      }
    }
    cert.zero_intervals.push_back(claim);
  }
  for (const auto& g : plan.generic) {
    if (g.poly.is_delta_zero()) {
      RigidityClaim rc;
      rc.stage = g.stage;
      rc.time = g.time;
      rc.cuts = g.cuts;
      rc.correlation = seq.at(g.time).lower;
      rc.target = (1 - make_rational(1, g.cuts)) * seq.norm_sq;
      rc.in_window = g.in_window;
      cert.rigidity_times.push_back(rc);
    } else {
      auto chk = verify_polynomial_limit(plan.spec, g.time, g.poly, f, f);
      cert.polynomial_claims.push_back(
          {g.stage, g.time, g.cuts, g.poly, chk.deviation_bound, chk.slack});
    }
  }
  cert.unverified = {"simple spectrum of the factor", "simple spectrum of all symmetric powers",
                     "simple spectrum of the Gaussian and Poisson suspensions"};
  return cert;
}

}  // namespace

PairPlan plan_pair(const IntervalSchedule& schedule, const PairPolicy& policy) {
  auto report = validate_schedule(schedule);
  if (!report.ok()) throw PlanError("invalid schedule: " + report.violations.front());
  if (policy.generic_cuts.empty() || policy.generic_polys.empty()) {
    throw std::invalid_argument("policy needs at least one generic cut count and polynomial");
  }
  for (const auto& p : policy.generic_polys) p.validate();
  if (policy.base_height < 1) throw std::invalid_argument("base height must be >= 1");
  if (policy.tracked_stage < 1) throw std::invalid_argument("tracked stage must be >= 1");

  const auto& blocks = schedule.blocks;
  const std::int64_t H = schedule.horizon;
  std::vector<Event> s_events, t_events;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Interval next_i = k + 1 < blocks.size() ? blocks[k + 1].i : Interval::empty();
    const Interval next_j = k + 1 < blocks.size() ? blocks[k + 1].j : Interval::empty();
    s_events.push_back({true, blocks[k].i, next_i, k});
    s_events.push_back({false, blocks[k].i_tilde, next_i, k});
    t_events.push_back({false, blocks[k].j_tilde, blocks[k].j, k});
    t_events.push_back({true, blocks[k].j, next_j, k});
  }
  auto ps = plan_factor("S", s_events, policy, H);
  auto pt = plan_factor("T", t_events, policy, H);

  PairPlan plan;
  plan.spec_s = ps.spec;
  plan.spec_t = pt.spec;
  Correlator cs{plan.spec_s}, ct{plan.spec_t};
  if (policy.tracked_stage > cs.geometry().depth_count() ||
      policy.tracked_stage > ct.geometry().depth_count()) {
    throw PlanError("tracked stage beyond the planned stages");
  }
  const auto f = LevelFunction::indicator(policy.tracked_stage);
  plan.corr_s = exact_sequence(cs, f, H, "S autocorrelation of base level");
  plan.corr_t = exact_sequence(ct, f, H, "T autocorrelation of base level");
  plan.cert_s = make_certificate("S", ps, f, plan.corr_s, H);
  plan.cert_t = make_certificate("T", pt, f, plan.corr_t, H);

  const auto product = product_correlation(plan.corr_s, plan.corr_t);
  plan.n0 = 1;
  for (std::int64_t n = H; n >= 1; --n) {
    const auto& b = product.at(n);
    if (!(b.exact() && b.lower == 0)) {
      plan.n0 = n + 1;
      break;
    }
  }
  return plan;
}

PolynomialCheck verify_polynomial_limit(const RankOneSpec& spec, std::int64_t time,
                                        const PolynomialSpec& poly, const LevelFunction& f,
                                        const LevelFunction& g) {
  Correlator c{spec};
  const auto& geo = c.geometry();
  std::optional<std::size_t> stage;
  for (std::size_t j = 1; j < geo.depth_count(); ++j) {
    if (geo.height(j) != time) continue;
    const auto& st = spec.stages[j - 1];
    auto want = design_generic_stage(time, {time, std::numeric_limits<std::int64_t>::max()}, poly,
                                     st.cuts);
    auto have = st.spacers;
    std::sort(have.begin(), have.end());
    std::sort(want.spacers.begin(), want.spacers.end());
    if (have == want.spacers) stage = j;
  }
  if (!stage) {
    throw PlanError("time " + std::to_string(time) + " is not the height of a generic stage realizing the polynomial");
  }
  const std::int64_t cuts = spec.stages[*stage - 1].cuts;
  const std::size_t N = geo.depth_count();
  PolynomialCheck chk;
  chk.power = c.at_depth(f, g, time, N);
  chk.polynomial = {0, 0};
  for (const auto& [z, a] : poly.coefficients) {
    const auto b = c.at_depth(f, g, -z, N);
    chk.polynomial.lower += a * b.lower;
    chk.polynomial.upper += a * b.upper;
  }
  chk.deviation_bound = std::max(abs(chk.power.upper - chk.polynomial.lower),
                                 abs(chk.polynomial.upper - chk.power.lower));
  chk.norm_product_sq = f.norm_sq(geo) * g.norm_sq(geo);
  chk.slack = make_rational(2, cuts) + realize_histogram(poly, cuts).rounding_mass;
  return chk;
}

CertificateCheck verify_certificate(const RankOneSpec& spec, const ConstructionCertificate& cert) {
  Correlator c{spec};
  const auto& f = cert.tracked;
  auto value = [&](std::int64_t n) -> std::optional<Rational> {
    try {
      return c.autocorrelation(f, n, 0).lower;
    } catch (const CorrelationError&) {
      return std::nullopt;
    }
  };
  auto fail = [](std::string msg, std::optional<std::int64_t> n) {
    return CertificateCheck{false, std::move(msg), n};
  };
  for (const auto& claim : cert.zero_intervals) {
    if (claim.exact_zero) {
      for (std::int64_t n = claim.interval.lo; n <= claim.interval.hi; ++n) {
        auto v = value(n);
        if (!v || *v != 0) {
          return fail(cert.factor + " zero claim " + claim.interval.str() + " violated at n=" +
                          std::to_string(n),
                      n);
        }
      }
    } else {
      const std::int64_t n = claim.first_violation.value_or(claim.interval.lo);
      auto v = value(n);
      if (v && *v == 0) {
        return fail(cert.factor + " claim " + claim.interval.str() + " records a violation at n=" +
                        std::to_string(n) + " but the correlation is exactly 0",
                    n);
      }
    }
  }
  const Rational norm = f.norm_sq(c.geometry());
  for (const auto& rc : cert.rigidity_times) {
    auto v = value(rc.time);
    const Rational target = (1 - make_rational(1, rc.cuts)) * norm;
    if (!v || *v != rc.correlation || *v < target || rc.target != target) {
      return fail(cert.factor + " rigidity claim at time " + std::to_string(rc.time) + " not reproduced",
                  rc.time);
    }
  }
  for (const auto& pc : cert.polynomial_claims) {
    try {
      auto chk = verify_polynomial_limit(spec, pc.time, pc.poly, f, f);
      if (chk.deviation_bound != pc.deviation_bound || !chk.within_allowance()) {
        return fail(cert.factor + " polynomial claim at time " + std::to_string(pc.time) +
                        " not reproduced",
                    pc.time);
      }
    } catch (const PlanError& e) {
      return fail(e.what(), pc.time);
    }
  }
  return {true, "ok", std::nullopt};
}

std::string to_string(StageKind kind) {
  switch (kind) {
    case StageKind::blocking: return "blocking";
    case StageKind::generic: return "generic";
    case StageKind::terminal: return "terminal";
  }
  return "unknown";
}

StageKind parse_stage_kind(const std::string& s) {
  if (s == "blocking") return StageKind::blocking;
  if (s == "generic") return StageKind::generic;
  if (s == "terminal") return StageKind::terminal;
  throw std::invalid_argument("unknown stage kind '" + s + "'");
}

}  // namespace rankone
