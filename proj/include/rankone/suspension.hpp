#pragma once

// Monte-Carlo checks of the first chaos of the Gaussian system and of the
// Poisson suspension built over a rank-one map.
//
// Randomness: one std::mt19937_64 per (seed, stream), seeded through
// SplitMix64, so identical configs give bit-identical results.

#include "rankone/correlation.hpp"

#include <optional>
#include <random>
#include <vector>

namespace rankone {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimulationConfig {
  std::int64_t sample_count = 10000;
  std::uint64_t seed = 1;
  std::int64_t lag_max = 20;
  double intensity = 1.0;
  double confidence = 0.95;
  double escape_cap = 0.05;  ///< largest tolerated fraction of escaping points

  void validate() const;
};

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream);

struct GaussianSamples {
  std::int64_t length = 0;
  std::vector<std::vector<double>> paths;  ///< paths[i][t]
  std::string method;                       ///< "circulant", "cholesky" or "eigen-repaired"
};

/// Stationary zero-mean Gaussian paths of the given length whose covariance
/// is rho(|s - t|), taken from entry midpoints. Circulant embedding is tried
/// first, then a Cholesky factor of the Toeplitz matrix; eigenvalues below 0
/// by at most 1e-9 rho(0) are clamped, larger failures throw and name the
/// smallest non-PSD leading minor.
GaussianSamples gaussian_sample(const CorrelationSequence& cov, std::int64_t length,
                                const SimulationConfig& config);

struct LagEstimate {
  std::int64_t lag = 0;
  double estimate = 0;
  double std_error = 0;  ///< over paths, each averaged along t
};

/// Empirical covariance at lags 0..lag_max, averaged over paths and positions.
std::vector<LagEstimate> lag_covariance(const GaussianSamples& s, std::int64_t lag_max);

struct PoissonPoint {
  Position position = 0;              ///< depth-N tower position
  std::vector<std::int64_t> columns;  ///< random column at each later stage
  std::optional<Position> image;      ///< deepest-tower position after n steps
};

struct PoissonConfigurations {
  std::size_t depth = 0;
  std::int64_t steps = 0;
  double region_measure = 0;
  std::vector<std::vector<PoissonPoint>> configurations;
  std::int64_t total_points = 0;
  std::int64_t escaped_points = 0;
  double escape_fraction() const {
    return total_points == 0 ? 0.0 : static_cast<double>(escaped_points) / static_cast<double>(total_points);
  }
};

/// Poisson configurations of intensity config.intensity on the depth-N
/// tower region, each point pushed by `steps` through point_map.
PoissonConfigurations poisson_sample_and_push(const RankOneSpec& spec, std::size_t depth,
                                              std::int64_t steps, const SimulationConfig& config);

struct CovarianceEstimate {
  double estimate = 0;
  double ci_low = 0;
  double ci_high = 0;
  std::int64_t samples = 0;
  double escape_fraction = 0;
  bool contains(double v) const { return ci_low <= v && v <= ci_high; }
};

/// Cov(sum f(x), sum f(T^n x)) over paired configurations with a normal
/// confidence interval. Escaped images contribute 0.
CovarianceEstimate linear_statistic_covariance(const RankOneSpec& spec,
                                               const PoissonConfigurations& pairs,
                                               const LevelFunction& f, double confidence = 0.95);

}  // namespace rankone
