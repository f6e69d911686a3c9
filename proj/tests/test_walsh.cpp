#include "oracle.hpp"
#include "rankone/walsh.hpp"

#include <catch2/catch.hpp>

#include <random>
#include <set>

using namespace rankone;

namespace {

WalshPolynomial quarter_sum() {
  WalshPolynomial f;
  for (std::int64_t i = 0; i < 4; ++i) f.add({i}, make_rational(1, 2));
  return f;
}

}  // namespace

TEST_CASE("inner products and shifts") {
  const auto r0 = WalshPolynomial::coordinate(0);
  CHECK(inner_product(r0, r0) == 1);
  CHECK(inner_product(r0, WalshPolynomial::coordinate(5)) == 0);
  auto p = WalshPolynomial::coordinate(0) ;
  p.add({1}, 1);
  CHECK(inner_product(p, shift_power(p, 1)) == 1);
  CHECK(shift_power(p, 0) == p);
  CHECK(shift_power(r0, 1) == WalshPolynomial::coordinate(1));
  CHECK(shift_power(shift_power(p, 3), -7) == shift_power(p, -4));
  WalshPolynomial q;
  q.add({2, 0}, make_rational(2, 3));
  q.add({0, 2}, make_rational(1, 3));
  CHECK(q.size() == 1);
  CHECK(q.coefficient({0, 2}) == 1);
  CHECK_THROWS(q.add({1, 1}, 1));
  std::mt19937_64 rng{3};
  for (int i = 0; i < 50; ++i) {
    auto a = oracle::random_unit_walsh(rng), b = oracle::random_unit_walsh(rng);
    CHECK(inner_product(shift_power(a, 9), shift_power(b, 9)) == inner_product(a, b));
  }
}

TEST_CASE("lemma3 examples") {
  const auto r0 = WalshPolynomial::coordinate(0);
  auto res = lemma3_truncate(r0, make_rational(1, 10));
  CHECK(res.f_prime == r0);
  CHECK(res.M == 1);
  CHECK(corr_tail_certificate(res.f_prime, res.M, 10000) == 0);
  CHECK(corr_tail_certificate(res.f_prime, 0, 10000) == 0);

  const auto f = quarter_sum();
  auto q = lemma3_truncate(f, make_rational(1, 10));
  CHECK(q.f_prime == f);
  CHECK(q.M == 4);
  CHECK(shift_correlation(f, 1) == make_rational(3, 4));
  for (std::int64_t m = 5; m < 200; ++m) CHECK(shift_correlation(f, m) == 0);
  CHECK(corr_tail_certificate(f, 4, 10000) == 0);
  CHECK(walsh_corr(f, {1, 4}) == make_rational(3, 2));

  CHECK_THROWS_AS(lemma3_truncate(f, 0), std::invalid_argument);
  auto with_const = f;
  with_const.add({}, 0);
  with_const.add({0}, -make_rational(1, 2));
  with_const.add({}, make_rational(1, 2));
  CHECK_THROWS_AS(lemma3_truncate(with_const, make_rational(1, 10)), std::invalid_argument);
  CHECK_THROWS_AS(lemma3_truncate(WalshPolynomial::coordinate(0, 2), make_rational(1, 10)),
                  std::invalid_argument);
}

TEST_CASE("lemma3 on a geometric stream") {
  // c_k = (3/5)(4/5)^k on {k}: sum c_k^2 = 1, tail from K is (16/25)^K
  WalshStream s;
  s.term = [](std::size_t k) {
    Rational c = make_rational(3, 5);
    for (std::size_t i = 0; i < k; ++i) c *= make_rational(4, 5);
    return std::pair<IndexSet, Rational>{{static_cast<std::int64_t>(k)}, c};
  };
  auto tail = [](std::size_t k) {
    Rational t = 1;
    for (std::size_t i = 0; i < k; ++i) t *= make_rational(16, 25);
    return t;
  };
  s.tail_norm_sq_bound = tail;
  const Rational delta = make_rational(1, 10);
  auto res = lemma3_truncate(s, delta);
  std::size_t expected = 0;
  while (!(tail(expected) < delta * delta / 4)) ++expected;
  CHECK(res.terms_kept == expected);
  CHECK(res.renormalized);
  CHECK(res.f_prime.norm_sq() == 1);
  CHECK(res.distance_sq_bound < delta * delta);
  // exact distance: the fresh element lies inside [0, K) and misses the tail
  WalshPolynomial fk;
  for (std::size_t k = 0; k < res.terms_kept; ++k) {
    auto [set, c] = s.term(k);
    fk.add(set, c);
  }
  const Rational exact = (fk - res.f_prime).norm_sq() + tail(res.terms_kept);
  CHECK(exact < delta * delta);
  CHECK(exact <= res.distance_sq_bound);
  CHECK(res.M == static_cast<std::int64_t>(res.terms_kept));
  CHECK(corr_tail_certificate(res.f_prime, res.M, 10000) == 0);
}

TEST_CASE("lemma3 property over random finite f") {
  std::mt19937_64 rng{11};
  std::uniform_int_distribution<std::int64_t> dd(1, 40);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = oracle::random_unit_walsh(rng);
    REQUIRE(f.norm_sq() == 1);
    const Rational delta = make_rational(dd(rng), 40);
    auto res = lemma3_truncate(f, delta);
    INFO("trial " << trial);
    CHECK(res.f_prime.norm_sq() == 1);
    CHECK(res.f_prime.zero_mean());
    CHECK((f - res.f_prime).norm_sq() < delta * delta);
    CHECK(res.distance_sq_bound == (f - res.f_prime).norm_sq());
    for (std::int64_t m = res.M; m < res.M + 60; ++m) {
      CHECK(inner_product(shift_power(res.f_prime, m), res.f_prime) == 0);
      CHECK(inner_product(shift_power(res.f_prime, -m), res.f_prime) == 0);
    }
    CHECK(corr_tail_certificate(res.f_prime, res.M, 10000) == 0);
    // independent route for the positive part on [1, M]
    Rational direct;
    for (std::int64_t m = 1; m <= res.M; ++m) direct += abs(shift_correlation(res.f_prime, m));
    CHECK(walsh_corr(res.f_prime, {1, res.M}) == direct);
  }
}
