#pragma once

// Spectral read-outs of correlation sequences. Densities are computed in
// double precision from rational entries rounded once; the chaos transform
// and the summability bounds stay exact.

#include "rankone/correlation.hpp"

#include <vector>

namespace rankone {

class SpectralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DensityEstimate {
  std::int64_t order = 0;     ///< Fejér order M (0 for an exact density)
  std::vector<double> values; ///< values[m] at theta = 2 pi m / G
  bool exact = false;         ///< the trig polynomial sum_n rho(n) e^{in theta} itself

  std::size_t grid() const { return values.size(); }
  static double theta(std::size_t m, std::size_t grid);
  double mean() const;
  double min() const;
};

/// sum_{|n|<M} (1 - |n|/M) rho(n) cos(n theta) with entry midpoints. The
/// sequence must cover [0, M-1] (the term at |n| = M has weight 0).
DensityEstimate fejer_density(const CorrelationSequence& seq, std::int64_t order, std::size_t grid);

/// sum_n rho(n) e^{in theta} for a sequence that vanishes outside its
/// covered range; every entry must be exact.
DensityEstimate exact_density(const CorrelationSequence& seq, std::size_t grid);

/// "theta\tvalue" rows.
std::string to_table(const DensityEstimate& d);

struct SummabilityReport {
  Interval range;
  Bracket l1;  ///< sum of |rho(n)| over range
  Bracket l2;  ///< sum of rho(n)^2 over range
  std::vector<std::int64_t> support;  ///< n whose entry is not exactly 0
};

/// Bounds over n in [1, horizon].
SummabilityReport summability_report(const CorrelationSequence& seq, std::int64_t horizon);

struct ChaosCoefficients {
  CorrelationSequence coefficients;  ///< n -> sum_{k=1..K} rho(n)^k / k!
  std::vector<Rational> tail_bounds; ///< bound on e^{|rho|} - sum_{k<=K} |rho|^k/k!, per entry
  std::int64_t cap = 0;
};

/// Requires rho(0) exactly 1 and |rho| <= 1.
ChaosCoefficients chaos_exp_coefficients(const CorrelationSequence& seq, std::int64_t cap);

}  // namespace rankone
