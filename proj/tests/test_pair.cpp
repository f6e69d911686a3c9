#include "oracle.hpp"
#include "rankone/pair.hpp"

#include <catch2/catch.hpp>

using namespace rankone;

namespace {

Rational exact_corr(const RankOneSpec& spec, const LevelFunction& f, std::int64_t n) {
  auto b = autocorrelation(spec, f, n, 0);
  REQUIRE(b.exact());
  return b.lower;
}

PolynomialSpec half_half() {
  PolynomialSpec p;
  p.coefficients[0] = make_rational(1, 2);
  p.coefficients[1] = make_rational(1, 2);
  return p;
}

}  // namespace

TEST_CASE("blocking stage examples") {
  auto st = design_blocking_stage(10, {1, 100}, 2);
  CHECK(st.cuts == 2);
  CHECK(st.spacers == std::vector<std::int64_t>{91, 91});

  // O = {0, 2} inside a height-3 tower: spacer >= 98 is required, the span
  // pushes it to 100.
  auto wide = design_blocking_stage(3, {11, 100}, 3, 2);
  for (auto s : wide.spacers) CHECK(s == 100);

  CHECK_THROWS_AS(design_blocking_stage(3, {2, 100}, 2, 2), PlanError);
  CHECK_THROWS_AS(design_blocking_stage(0, {2, 100}, 2), std::invalid_argument);
  CHECK_THROWS_AS(design_blocking_stage(3, Interval::empty(), 2), std::invalid_argument);
}

TEST_CASE("blocking soundness against the oracle") {
  // base stage (2,(1,0)) gives O = {0, 3} at depth 2 of a height-2 start
  RankOneSpec spec;
  spec.base_height = 2;
  spec.stages.push_back({2, {1, 0}});
  Geometry geo{spec};
  const std::int64_t span = 3;
  const Interval forbidden{5, 60};
  spec.stages.push_back(design_blocking_stage(geo.height(2), forbidden, 3, span));
  spec.stages.push_back({2, {200, 200}});  // lets every n <= 60 resolve
  const auto f = LevelFunction::indicator(1);
  for (std::int64_t n = forbidden.lo; n <= forbidden.hi; ++n) {
    auto b = oracle::brute_correlation(spec, f, f, n);
    REQUIRE(b.exact());
    CHECK(b.lower == 0);
    CHECK(exact_corr(spec, f, n) == 0);
  }
}

TEST_CASE("histogram realization") {
  auto h = realize_histogram(half_half(), 4);
  CHECK(h.counts == std::map<std::int64_t, std::int64_t>{{0, 2}, {1, 2}});
  CHECK(h.escape_columns == 0);
  CHECK(h.rounding_mass == 0);
  auto st = design_generic_stage(5, {5, 1000}, half_half(), 4);
  auto sp = st.spacers;
  std::sort(sp.begin(), sp.end());
  CHECK(sp == std::vector<std::int64_t>{0, 0, 1, 1});

  PolynomialSpec partial;
  partial.coefficients[0] = make_rational(3, 4);
  auto hp = realize_histogram(partial, 4);
  CHECK(hp.counts.at(0) == 3);
  CHECK(hp.escape_columns == 1);
  auto sp2 = design_generic_stage(7, {7, 1000}, partial, 4).spacers;
  CHECK(std::count(sp2.begin(), sp2.end(), 7) == 1);

  PolynomialSpec thirds;
  thirds.coefficients[0] = make_rational(1, 3);
  thirds.coefficients[2] = make_rational(2, 3);
  auto ht = realize_histogram(thirds, 4);
  CHECK(ht.counts.at(0) + ht.counts.at(2) == 4);
  CHECK(ht.counts.at(2) == 3);
  CHECK(ht.rounding_mass == make_rational(1, 12) + make_rational(1, 12));

  PolynomialSpec bad;
  bad.coefficients[-1] = 1;
  CHECK_THROWS_AS(realize_histogram(bad, 4), std::invalid_argument);
  bad.coefficients = {{0, make_rational(3, 2)}};
  CHECK_THROWS_AS(realize_histogram(bad, 4), std::invalid_argument);
  CHECK_THROWS_AS(design_generic_stage(10, {10, 15}, PolynomialSpec::delta(0), 2), PlanError);
}

TEST_CASE("rigidity and polynomial limits") {
  Rational previous = 1;
  for (std::int64_t r : {8, 16, 32, 64}) {
    RankOneSpec spec;
    spec.stages.push_back(design_generic_stage(1, {1, 1000}, PolynomialSpec::delta(0), r));
    spec.stages.push_back({2, {5, 5}});
    const auto f = LevelFunction::indicator(1);
    const Rational norm = f.norm_sq(Geometry{spec});
    CHECK(exact_corr(spec, f, 1) >= (1 - make_rational(1, r)) * norm);
    auto chk = verify_polynomial_limit(spec, 1, PolynomialSpec::delta(0), f, f);
    CHECK(chk.deviation_bound <= norm / r);
    CHECK(chk.deviation_bound < previous);
    CHECK(chk.within_allowance());
    previous = chk.deviation_bound;
  }

  RankOneSpec spec;
  spec.base_height = 3;
  spec.stages.push_back(design_generic_stage(3, {3, 1000}, half_half(), 64));
  spec.stages.push_back({2, {50, 50}});
  const auto f = LevelFunction::indicator(1, 1);
  auto chk = verify_polynomial_limit(spec, 3, half_half(), f, f);
  CHECK(chk.within_allowance());
  CHECK_THROWS_AS(verify_polynomial_limit(spec, 4, half_half(), f, f), PlanError);

  // disjoint far supports: both sides vanish
  const auto g = LevelFunction::indicator(1, 2);
  const auto lone = LevelFunction::indicator(1, 0);
  RankOneSpec far;
  far.base_height = 40;
  far.stages.push_back(design_generic_stage(40, {40, 10000}, PolynomialSpec::delta(0), 8));
  far.stages.push_back({2, {400, 400}});
  auto zero = verify_polynomial_limit(far, 40, PolynomialSpec::delta(0), lone, g);
  CHECK(zero.deviation_bound == 0);
  CHECK(zero.polynomial.lower == 0);
}

TEST_CASE("horizon 100 pair plan") {
  auto schedule = generate_schedule(10, 100);
  auto plan = plan_pair(schedule);
  auto product = product_correlation(plan.corr_s, plan.corr_t);
  REQUIRE(plan.n0 <= 100);
  for (std::int64_t n = plan.n0; n <= 100; ++n) {
    INFO("n=" << n);
    CHECK(product.at(n).exact());
    CHECK(product.at(n).lower == 0);
  }
  for (const auto& c : plan.cert_s.zero_intervals) CHECK(c.exact_zero);
  for (const auto& c : plan.cert_t.zero_intervals) CHECK(c.exact_zero);
  CHECK_FALSE(plan.cert_s.rigidity_times.empty());
  CHECK_FALSE(plan.cert_t.rigidity_times.empty());
  for (const auto& rc : plan.cert_t.rigidity_times) CHECK(rc.correlation >= rc.target);
  CHECK(verify_certificate(plan.spec_s, plan.cert_s).ok);
  CHECK(verify_certificate(plan.spec_t, plan.cert_t).ok);

  // independent cross-check of every planned value with the brute oracle
  const auto f = LevelFunction::indicator(1);
  for (std::int64_t n = 1; n <= 100; ++n) {
    CHECK(oracle::brute_correlation(plan.spec_s, f, f, n).lower == plan.corr_s.at(n).lower);
  }
}

TEST_CASE("polynomial stages wait for enough occurrences") {
  PairPolicy policy;
  policy.generic_cuts = {8};
  policy.generic_polys = {half_half()};
  auto plan = plan_pair(generate_schedule(100, 10000), policy);
  const auto& cert = plan.cert_t;
  REQUIRE_FALSE(cert.rigidity_times.empty());
  REQUIRE_FALSE(cert.polynomial_claims.empty());
  CHECK(cert.rigidity_times.front().time == 1);
  CHECK(cert.polynomial_claims.front().time == 8);
  for (const auto& pc : cert.polynomial_claims) {
    auto chk = verify_polynomial_limit(plan.spec_t, pc.time, pc.poly, cert.tracked, cert.tracked);
    CHECK(chk.within_allowance());
    CHECK(chk.deviation_bound == pc.deviation_bound);
  }
  CHECK(verify_certificate(plan.spec_t, cert).ok);
}

TEST_CASE("pure blocking pair") {
  PairPolicy policy;
  policy.max_generic_per_window = 0;
  auto plan = plan_pair(generate_schedule(10, 1000), policy);
  for (const auto& l : plan.cert_s.min_distance_ledger) CHECK(l.kind != StageKind::generic);
  CHECK(plan.cert_s.rigidity_times.empty());
  // finitely supported: nothing beyond the largest tracked distance
  const auto span_s = plan.cert_s.min_distance_ledger.back().max_distance;
  for (std::int64_t n = span_s + 1; n <= 1000; ++n) CHECK(plan.corr_s.at(n).lower == 0);
  auto product = product_correlation(plan.corr_s, plan.corr_t);
  for (std::int64_t n = plan.n0; n <= 1000; ++n) CHECK(product.at(n).lower == 0);
}

TEST_CASE("degenerate horizon 1") {
  auto plan = plan_pair(generate_schedule(10, 1, {1}));
  CHECK(plan.spec_s.stages.size() == 1);
  CHECK(plan.spec_t.stages.size() == 1);
  CHECK(plan.cert_t.zero_intervals.empty());
  CHECK(plan.cert_s.rigidity_times.empty());
  CHECK(plan.cert_t.rigidity_times.empty());
  CHECK(plan.n0 == 1);
}

TEST_CASE("tampering is detected") {
  auto plan = plan_pair(generate_schedule(10, 100));
  auto spec = plan.spec_s;
  spec.stages.front().spacers.assign(spec.stages.front().spacers.size(), 0);
  auto check = verify_certificate(spec, plan.cert_s);
  CHECK_FALSE(check.ok);
  REQUIRE(check.first_violated_n);
  CHECK(*check.first_violated_n == 1);

  auto cert = plan.cert_t;
  REQUIRE_FALSE(cert.rigidity_times.empty());
  cert.rigidity_times.front().correlation += 1;
  auto c2 = verify_certificate(plan.spec_t, cert);
  CHECK_FALSE(c2.ok);
  CHECK(c2.first_violated_n == cert.rigidity_times.front().time);
}

TEST_CASE("stage kind names") {
  for (auto k : {StageKind::blocking, StageKind::generic, StageKind::terminal}) {
    CHECK(parse_stage_kind(to_string(k)) == k);
  }
  CHECK_THROWS(parse_stage_kind("other"));
}
