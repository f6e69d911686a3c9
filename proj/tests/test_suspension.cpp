#include "oracle.hpp"
#include "rankone/pair.hpp"
#include "rankone/suspension.hpp"

#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>

using namespace rankone;

namespace {

CorrelationSequence normalized(const CorrelationSequence& s) {
  CorrelationSequence out = s;
  const Rational r0 = s.at(0).lower;
  for (auto& b : out.entries) b = {b.lower / r0, b.upper / r0};
  out.norm_sq = 1;
  return out;
}

CorrelationSequence from_doubles(const std::vector<double>& v) {
  CorrelationSequence s;
  for (double x : v) {
    const Rational q{x};
    s.entries.push_back({q, q});
  }
  s.norm_sq = s.entries.front().lower;
  return s;
}

SimulationConfig config(std::int64_t samples, std::uint64_t seed = 5) {
  SimulationConfig c;
  c.sample_count = samples;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("gaussian sampler basics") {
  auto white = from_doubles({1, 0, 0, 0, 0});
  auto s = gaussian_sample(white, 5, config(100000));
  auto lags = lag_covariance(s, 4);
  CHECK(std::abs(lags[0].estimate - 1) <= 3 * lags[0].std_error);
  CHECK(std::abs(lags[1].estimate) <= 3 * lags[1].std_error);

  auto one = gaussian_sample(from_doubles({2.5}), 1, config(100000));
  auto v = lag_covariance(one, 0);
  CHECK(std::abs(v[0].estimate - 2.5) <= 3 * v[0].std_error);

  auto again = gaussian_sample(white, 5, config(100000));
  CHECK(again.paths == s.paths);
  CHECK(gaussian_sample(white, 5, config(100000, 6)).paths != s.paths);
}

TEST_CASE("non-PSD covariance names its minor") {
  auto bad = from_doubles({1, 0.9, -0.9});
  try {
    gaussian_sample(bad, 3, config(10));
    FAIL("expected an error");
  } catch (const SimulationError& e) {
    CHECK(std::string(e.what()).find("leading minor of size 3") != std::string::npos);
  }
  CHECK_THROWS_AS(gaussian_sample(bad, 5, config(10)), SimulationError);  // coverage
}

TEST_CASE("gaussian covariance accuracy on rank-one correlations") {
  std::mt19937_64 rng{17};
  for (int trial = 0; trial < 3; ++trial) {
    auto spec = oracle::random_spec(rng, 6, 2000);
    spec.stages.push_back({2, {60, 60}});
    auto seq = normalized(autocorrelation_sequence(spec, LevelFunction::indicator(1), 0, 20, 0));
    auto s = gaussian_sample(seq, 21, config(100000, 100 + trial));
    INFO(s.method);
    for (const auto& e : lag_covariance(s, 20)) {
      CHECK(std::abs(e.estimate - to_double(seq.at(e.lag).lower)) <= 0.01);
    }
  }
}

TEST_CASE("gaussian rigidity lift") {
  RankOneSpec spec;
  spec.stages.push_back({2, {1, 0}});
  spec.stages.push_back(design_generic_stage(3, {3, 1000}, PolynomialSpec::delta(0), 64));
  spec.stages.push_back({2, {10, 10}});
  auto seq = normalized(autocorrelation_sequence(spec, LevelFunction::indicator(1), 0, 3, 0));
  CHECK(seq.at(3).lower >= 1 - make_rational(1, 64));
  auto s = gaussian_sample(seq, 4, config(100000));
  CHECK(lag_covariance(s, 3)[3].estimate >= 0.97);
}

TEST_CASE("poisson configurations") {
  auto spec = oracle::odometer(8);
  auto cfg = config(20000);
  cfg.intensity = 3;
  auto zero = poisson_sample_and_push(spec, 5, 0, cfg);
  double mean = static_cast<double>(zero.total_points) / 20000.0;
  const double m = zero.region_measure;
  CHECK(m == 1.0);
  CHECK(std::abs(mean - 3 * m) <= 3 * std::sqrt(3 * m / 20000.0));
  Geometry geo{spec};
  for (const auto& conf : zero.configurations) {
    for (const auto& pt : conf) {
      REQUIRE(pt.image);
      CHECK(*pt.image == *point_map(geo, 5, pt.position, 0, pt.columns));
    }
  }

  // independent per-point check through literal cell ids
  oracle::ExplicitTowers towers{spec};
  const auto& deepest = towers.cells.back();
  auto moved = poisson_sample_and_push(spec, 5, 1, cfg);
  std::int64_t checked = 0;
  for (const auto& conf : moved.configurations) {
    for (const auto& pt : conf) {
      std::int64_t c = towers.cells[4][static_cast<std::size_t>(pt.position)];
      for (std::size_t j = 0; j < pt.columns.size(); ++j) c = c * 2 + pt.columns[j];
      const auto at = std::find(deepest.begin(), deepest.end(), c) - deepest.begin();
      if (at + 1 < static_cast<std::ptrdiff_t>(deepest.size())) {
        REQUIRE(pt.image);
        CHECK(*pt.image == at + 1);
      } else {
        CHECK_FALSE(pt.image);
      }
      ++checked;
    }
  }
  CHECK(checked > 0);
  CHECK(poisson_sample_and_push(spec, 5, 1, cfg).total_points == moved.total_points);

  auto tight = cfg;
  tight.escape_cap = 0;
  CHECK_THROWS_AS(poisson_sample_and_push(oracle::odometer(3), 3, 5, tight), SimulationError);
}

TEST_CASE("linear statistic covariance") {
  auto plan = plan_pair(generate_schedule(10, 1000));
  const auto& spec = plan.spec_s;
  const auto f = LevelFunction::indicator(1);
  auto cfg = config(100000, 9);
  cfg.intensity = 2;
  for (std::int64_t n : {std::int64_t{0}, std::int64_t{5}, plan.cert_s.rigidity_times.front().time}) {
    auto pairs = poisson_sample_and_push(spec, 1, n, cfg);
    auto est = linear_statistic_covariance(spec, pairs, f);
    const double truth = 2 * to_double(plan.corr_s.at(n).lower);
    INFO("n=" << n << " est=" << est.estimate << " [" << est.ci_low << ", " << est.ci_high << "]");
    CHECK(est.contains(truth));
  }
  CHECK(plan.corr_s.at(5).lower == 0);

  // calibration: 95% intervals over 100 independent runs
  int hits = 0;
  const std::int64_t n = plan.cert_s.rigidity_times.front().time;
  const double truth = 2 * to_double(plan.corr_s.at(n).lower);
  for (std::uint64_t run = 0; run < 100; ++run) {
    auto c = config(1000, 1000 + run);
    c.intensity = 2;
    auto est = linear_statistic_covariance(spec, poisson_sample_and_push(spec, 1, n, c), f);
    hits += est.contains(truth);
  }
  CHECK(hits >= 90);
}
