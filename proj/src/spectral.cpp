#include "rankone/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace rankone {

double DensityEstimate::theta(std::size_t m, std::size_t grid) {
  return 2 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(grid);
}

double DensityEstimate::mean() const {
  if (values.empty()) return 0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double DensityEstimate::min() const {
  return values.empty() ? 0 : *std::min_element(values.begin(), values.end());
}

namespace {

// Cosine series c_0 + 2 sum_{n>=1} c_n cos(n theta), skipping zero terms.
DensityEstimate cosine_series(const std::vector<std::pair<std::int64_t, double>>& terms, double c0,
                              std::size_t grid) {
  if (grid == 0) throw SpectralError("grid must be positive");
  DensityEstimate d;
  d.values.resize(grid);
  for (std::size_t m = 0; m < grid; ++m) {
    const double th = DensityEstimate::theta(m, grid);
    double v = c0;
    for (const auto& [n, c] : terms) v += 2 * c * std::cos(static_cast<double>(n) * th);
    d.values[m] = v;
  }
  return d;
}

double entry(const CorrelationSequence& seq, std::int64_t n) {
  return to_double(seq.at(n).midpoint());
}

}  // namespace

DensityEstimate fejer_density(const CorrelationSequence& seq, std::int64_t order, std::size_t grid) {
  if (order < 1) throw SpectralError("Fejer order must be >= 1");
  if (!seq.covers(0) && seq.first > 0) throw SpectralError("sequence does not cover n = 0");
  if (!seq.covers(Interval{0, order - 1})) {
    throw SpectralError("insufficient coverage: need n up to " + std::to_string(order - 1) +
                        ", have " + std::to_string(seq.last()));
  }
  std::vector<std::pair<std::int64_t, double>> terms;
  for (std::int64_t n = 1; n < order; ++n) {
    const double c = entry(seq, n);
    if (c != 0) terms.emplace_back(n, (1 - static_cast<double>(n) / static_cast<double>(order)) * c);
  }
  auto d = cosine_series(terms, entry(seq, 0), grid);
  d.order = order;
  return d;
}

DensityEstimate exact_density(const CorrelationSequence& seq, std::size_t grid) {
  if (!seq.covers(0)) throw SpectralError("sequence does not cover n = 0");
  std::vector<std::pair<std::int64_t, double>> terms;
  for (std::int64_t n = std::max<std::int64_t>(1, seq.first); n <= seq.last(); ++n) {
    const auto& b = seq.at(n);
    if (!b.exact()) throw SpectralError("entry at n=" + std::to_string(n) + " is not exact");
    if (b.lower != 0) terms.emplace_back(n, to_double(b.lower));
  }
  if (!seq.at(0).exact()) throw SpectralError("entry at n=0 is not exact");
  auto d = cosine_series(terms, to_double(seq.at(0).lower), grid);
  d.exact = true;
  return d;
}

std::string to_table(const DensityEstimate& d) {
  std::ostringstream out;
  out.precision(17);
  out << "theta\tvalue\n";
  for (std::size_t m = 0; m < d.grid(); ++m) out << DensityEstimate::theta(m, d.grid()) << '\t' << d.values[m] << '\n';
  return out.str();
}

SummabilityReport summability_report(const CorrelationSequence& seq, std::int64_t horizon) {
  SummabilityReport r;
  r.range = {1, horizon};
  r.l1 = {0, 0};
  r.l2 = {0, 0};
  if (horizon < 1) return r;
  if (!seq.covers(r.range)) {
    throw SpectralError("sequence does not cover " + r.range.str());
  }
  for (std::int64_t n = 1; n <= horizon; ++n) {
    const auto& b = seq.at(n);
    if (b.exact() && b.lower == 0) continue;
    r.support.push_back(n);
    const auto a = abs_bounds(b);
    r.l1.lower += a.lower;
    r.l1.upper += a.upper;
    r.l2.lower += a.lower * a.lower;
    r.l2.upper += a.upper * a.upper;
  }
  return r;
}

namespace {

// sum_{k=1..K} x^k / k!
Rational exp_minus_one_partial(const Rational& x, std::int64_t cap) {
  Rational term = 1, sum;
  for (std::int64_t k = 1; k <= cap; ++k) {
    term *= x;
    term /= k;
    sum += term;
  }
  return sum;
}

// |x|^{K+1}/(K+1)! * (K+2)/(K+2-|x|), a bound on the exponential tail.
Rational exp_tail_bound(const Rational& x, std::int64_t cap) {
  const Rational a = abs(x);
  if (a == 0) return 0;
  Rational term = 1;
  for (std::int64_t k = 1; k <= cap + 1; ++k) {
    term *= a;
    term /= k;
  }
  return term * Rational(cap + 2) / (Rational(cap + 2) - a);
}

}  // namespace

ChaosCoefficients chaos_exp_coefficients(const CorrelationSequence& seq, std::int64_t cap) {
  if (cap < 1) throw SpectralError("chaos cap must be >= 1");
  if (!seq.covers(0) || !seq.at(0).exact() || seq.at(0).lower != 1) {
    throw SpectralError("unnormalized input: rho(0) must be exactly 1");
  }
  ChaosCoefficients out;
  out.cap = cap;
  out.coefficients.first = seq.first;
  out.coefficients.norm_sq = exp_minus_one_partial(1, cap);
  out.coefficients.subject = "chaos exp of " + seq.subject;
  for (const auto& b : seq.entries) {
    if (b.lower < -1 || b.upper > 1) throw SpectralError("correlation outside [-1, 1]");
    // the partial sums are increasing on [-1, 1]
    out.coefficients.entries.push_back(
        {exp_minus_one_partial(b.lower, cap), exp_minus_one_partial(b.upper, cap)});
    out.tail_bounds.push_back(exp_tail_bound(abs_bounds(b).upper, cap));
  }
  return out;
}

}  // namespace rankone
