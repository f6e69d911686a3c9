#include "rankone/walsh.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace rankone {

void WalshPolynomial::add(IndexSet f, const Rational& c) {
  std::sort(f.begin(), f.end());
  if (std::adjacent_find(f.begin(), f.end()) != f.end()) {
    throw std::invalid_argument("index set has repeated indices");
  }
  auto& slot = terms_[f];
  slot += c;
  slot.canonicalize();
  if (slot == 0) terms_.erase(f);
}

Rational WalshPolynomial::coefficient(const IndexSet& f) const {
  auto it = terms_.find(f);
  return it == terms_.end() ? Rational{0} : it->second;
}

Rational WalshPolynomial::norm_sq() const {
  Rational s;
  for (const auto& [f, c] : terms_) s += c * c;
  return s;
}

std::optional<Interval> WalshPolynomial::index_span() const {
  std::optional<Interval> span;
  for (const auto& [f, c] : terms_) {
    if (f.empty()) continue;
    if (!span) span = Interval{f.front(), f.back()};
    span->lo = std::min(span->lo, f.front());
    span->hi = std::max(span->hi, f.back());
  }
  return span;
}

WalshPolynomial operator-(const WalshPolynomial& a, const WalshPolynomial& b) {
  WalshPolynomial d = a;
  for (const auto& [f, c] : b.terms_) d.add(f, -c);
  return d;
}

Rational inner_product(const WalshPolynomial& p, const WalshPolynomial& q) {
  Rational s;
  const auto& small = p.size() <= q.size() ? p : q;
  const auto& large = p.size() <= q.size() ? q : p;
  for (const auto& [f, c] : small.terms()) {
    auto it = large.terms().find(f);
    if (it != large.terms().end()) s += c * it->second;
  }
  return s;
}

WalshPolynomial shift_power(const WalshPolynomial& p, std::int64_t m) {
  WalshPolynomial out;
  for (const auto& [f, c] : p.terms()) {
    IndexSet moved = f;
    for (auto& i : moved) i += m;
    out.add(std::move(moved), c);
  }
  return out;
}

Rational shift_correlation(const WalshPolynomial& p, std::int64_t m) {
  return inner_product(shift_power(p, m), p);
}

Rational walsh_corr(const WalshPolynomial& p, const Interval& lags) {
  if (lags.is_empty()) return 0;
  // shape (F - min F) -> (min F, coefficient)
  std::map<IndexSet, std::vector<std::pair<std::int64_t, Rational>>> shapes;
  for (const auto& [f, c] : p.terms()) {
    if (f.empty()) continue;
    IndexSet shape = f;
    for (auto& i : shape) i -= f.front();
    shapes[shape].emplace_back(f.front(), c);
  }
  std::map<std::int64_t, Rational> by_lag;
  for (const auto& [shape, members] : shapes) {
    for (const auto& [a, ca] : members) {
      for (const auto& [b, cb] : members) {
        if (lags.contains(b - a)) by_lag[b - a] += ca * cb;
      }
    }
  }
  Rational total;
  for (const auto& [m, v] : by_lag) total += abs(v);
  // the constant term correlates with itself at every lag
  const Rational c0 = p.coefficient({});
  if (c0 != 0) {
    total = 0;
    for (std::int64_t m = lags.lo; m <= lags.hi; ++m) {
      auto it = by_lag.find(m);
      total += abs((it == by_lag.end() ? Rational{0} : it->second) + c0 * c0);
    }
  }
  return total;
}

namespace {

std::int64_t diameter_rule(const WalshPolynomial& p) {
  auto span = p.index_span();
  return span ? 1 + (span->hi - span->lo) : 1;
}

IndexSet fresh_set(const WalshPolynomial& p) {
  auto span = p.index_span().value_or(Interval{0, 0});
  for (std::int64_t i = span.lo; i <= span.hi; ++i) {
    if (!p.terms().contains(IndexSet{i})) return {i};
  }
  for (std::int64_t i = span.lo; i <= span.hi; ++i) {
    for (std::int64_t j = i + 1; j <= span.hi; ++j) {
      if (!p.terms().contains(IndexSet{i, j})) return {i, j};
    }
  }
  return {span.hi + 1};
}

struct Renormalized {
  WalshPolynomial f;
  Rational distance_sq;  // ||f_K - f'||^2
};

// lambda f_K + a e with lambda = 2m/(s+m^2), a = (s-m^2)/(s+m^2) for a
// rational m near sqrt(s): lambda^2 s + a^2 = 1 exactly.
Renormalized renormalize(const WalshPolynomial& fk, const Rational& s, unsigned bits) {
  BigInt scaled = s.get_num() << (2 * bits);
  scaled /= s.get_den();
  BigInt root;
  mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
  Rational m{root, BigInt{1} << bits};
  m.canonicalize();
  if (m == 0) m = make_rational(1, 2);
  const Rational denom = s + m * m;
  const Rational lambda = 2 * m / denom;
  const Rational a = (s - m * m) / denom;
  Renormalized out;
  for (const auto& [f, c] : fk.terms()) out.f.add(f, lambda * c);
  if (a != 0) out.f.add(fresh_set(fk), a);
  const Rational one_minus = 1 - lambda;
  out.distance_sq = one_minus * one_minus * s + a * a;
  return out;
}

void check_delta(const Rational& delta) {
  if (delta <= 0) throw std::invalid_argument("delta must be > 0");
}

}  // namespace

Lemma3Result lemma3_truncate(const WalshPolynomial& f, const Rational& delta) {
  check_delta(delta);
  if (!f.zero_mean()) throw std::invalid_argument("f is not zero-mean");
  if (f.norm_sq() != 1) throw std::invalid_argument("f must have unit norm, got ||f||^2 = " + to_string(f.norm_sq()));
  std::vector<std::pair<IndexSet, Rational>> order(f.terms().begin(), f.terms().end());
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return abs(a.second) > abs(b.second); });
  const Rational delta_sq = delta * delta;
  WalshPolynomial fk;
  Rational s;
  for (std::size_t k = 0; k < order.size(); ++k) {
    fk.add(order[k].first, order[k].second);
    s += order[k].second * order[k].second;
    if (k + 1 == order.size()) break;
    if (1 - s >= delta_sq) continue;
    for (unsigned bits = 8; bits <= 512; bits *= 2) {
      auto r = renormalize(fk, s, bits);
      const Rational dist = (f - r.f).norm_sq();
      if (dist < delta_sq) return {r.f, diameter_rule(r.f), k + 1, true, dist};
    }
  }
  return {f, diameter_rule(f), order.size(), false, 0};
}

Lemma3Result lemma3_truncate(const WalshStream& f, const Rational& delta) {
  check_delta(delta);
  const Rational quarter = delta * delta / 4;
  WalshPolynomial fk;
  Rational s;
  for (std::size_t k = 0; k < f.max_terms; ++k) {
    auto [set, c] = f.term(k);
    std::sort(set.begin(), set.end());
    if (set.empty() && c != 0) throw std::invalid_argument("f is not zero-mean");
    fk.add(set, c);
    s += c * c;
    const Rational tail = f.tail_norm_sq_bound(k + 1);
    if (tail >= quarter) continue;
    if (s > 1) throw std::invalid_argument("stream norm exceeds 1");
    if (s == 1) return {fk, diameter_rule(fk), k + 1, false, 2 * tail};
    for (unsigned bits = 8;; bits *= 2) {
      auto r = renormalize(fk, s, bits);
      if (r.distance_sq < quarter) {
        return {r.f, diameter_rule(r.f), k + 1, true, 2 * (tail + r.distance_sq)};
      }
      if (bits > 4096) throw std::runtime_error("renormalization did not converge");
    }
  }
  throw std::invalid_argument("tail bound never dropped below (delta/2)^2 within max_terms");
}

Rational corr_tail_certificate(const WalshPolynomial& f_prime, std::int64_t m, std::int64_t horizon) {
  return walsh_corr(f_prime, {m + 1, horizon});
}

}  // namespace rankone
