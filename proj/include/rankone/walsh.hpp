#pragma once

// Walsh polynomials over the two-sided fair-coin Bernoulli shift. The basis
// element of a finite index set F is the product of the +-1 coordinates in F;
// these are orthonormal and the shift maps F to F + 1, so every inner product
// is an exact rational.

#include "rankone/interval.hpp"
#include "rankone/rational.hpp"

#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace rankone {

using IndexSet = std::vector<std::int64_t>;  ///< sorted, distinct; {} is the constant

class WalshPolynomial {
 public:
  WalshPolynomial() = default;
  static WalshPolynomial coordinate(std::int64_t i, const Rational& c = 1) {
    WalshPolynomial p;
    p.add({i}, c);
    return p;
  }

  /// Adds c to the coefficient of F (F is canonicalized).
  void add(IndexSet f, const Rational& c);
  const std::map<IndexSet, Rational>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  Rational coefficient(const IndexSet& f) const;
  Rational norm_sq() const;
  bool zero_mean() const { return !terms_.contains(IndexSet{}); }
  /// Smallest and largest index over all terms; nullopt when only the constant is present.
  std::optional<Interval> index_span() const;

  bool operator==(const WalshPolynomial&) const = default;
  friend WalshPolynomial operator-(const WalshPolynomial& a, const WalshPolynomial& b);

 private:
  std::map<IndexSet, Rational> terms_;
};

Rational inner_product(const WalshPolynomial& p, const WalshPolynomial& q);
WalshPolynomial shift_power(const WalshPolynomial& p, std::int64_t m);

/// (shift_power(p, m), p).
Rational shift_correlation(const WalshPolynomial& p, std::int64_t m);

/// sum_{m in I} |(shift_power(p, m), p)|, grouping terms by shape so only
/// nonzero lags are visited.
Rational walsh_corr(const WalshPolynomial& p, const Interval& lags);

/// An infinite (or long) coefficient stream: term(k) for k = 0, 1, ... and an
/// exact upper bound on the squared norm of the terms from k on.
struct WalshStream {
  std::function<std::pair<IndexSet, Rational>(std::size_t)> term;
  std::function<Rational(std::size_t)> tail_norm_sq_bound;
  std::size_t max_terms = 1'000'000;
};

struct Lemma3Result {
  WalshPolynomial f_prime;
  std::int64_t M = 0;            ///< 1 + index diameter of f'; (shift^k f', f') = 0 for k >= M
  std::size_t terms_kept = 0;    ///< prefix length used
  bool renormalized = false;     ///< a fresh basis element restored unit norm
  Rational distance_sq_bound;    ///< certified bound on ||f - f'||^2, < delta^2
};

/// Finite f: zero mean, ||f||^2 = 1 exactly; terms are kept in decreasing |c|
/// order and ||f - f'||^2 is exact.
Lemma3Result lemma3_truncate(const WalshPolynomial& f, const Rational& delta);
/// Stream f: assumed of unit norm; the bound combines the tail bound with the
/// renormalization distance.
Lemma3Result lemma3_truncate(const WalshStream& f, const Rational& delta);

/// walsh_corr over (m, horizon]; zero for every lemma3_truncate output.
Rational corr_tail_certificate(const WalshPolynomial& f_prime, std::int64_t m, std::int64_t horizon);

}  // namespace rankone
