#include "rankone/suspension.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <complex>

namespace rankone {

void SimulationConfig::validate() const {
  if (sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
  if (lag_max < 0) throw std::invalid_argument("lag_max must be >= 0");
  if (!(intensity > 0)) throw std::invalid_argument("intensity must be > 0");
  if (!(confidence > 0 && confidence < 1)) throw std::invalid_argument("confidence must lie in (0, 1)");
  if (!(escape_cap >= 0 && escape_cap <= 1)) throw std::invalid_argument("escape_cap must lie in [0, 1]");
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  // SplitMix64 over (seed, stream) feeds a seed_seq.
  std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
  auto next = [&x] {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::seed_seq seq{next(), next(), next(), next()};
  return std::mt19937_64{seq};
}

namespace {

std::vector<double> covariance_row(const CorrelationSequence& cov, std::int64_t length) {
  if (!cov.covers(Interval{0, length - 1})) {
    throw SimulationError("covariance does not cover lags 0.." + std::to_string(length - 1));
  }
  std::vector<double> c(static_cast<std::size_t>(length));
  for (std::int64_t k = 0; k < length; ++k) c[static_cast<std::size_t>(k)] = to_double(cov.at(k).midpoint());
  return c;
}

// Circulant embedding of size 2(L-1); nullopt when an eigenvalue is too negative.
std::optional<std::vector<double>> circulant_eigenvalues(const std::vector<double>& c, double tol) {
  const std::size_t L = c.size();
  const std::size_t m = 2 * (L - 1);
  std::vector<double> row(m);
  for (std::size_t k = 0; k < L; ++k) row[k] = c[k];
  for (std::size_t k = 1; k + 1 < L; ++k) row[m - k] = c[k];
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, row);
  std::vector<double> lambda(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double v = spec[k].real();
    if (v < -tol) return std::nullopt;
    lambda[k] = std::max(0.0, v);
  }
  return lambda;
}

}  // namespace

GaussianSamples gaussian_sample(const CorrelationSequence& cov, std::int64_t length,
                                const SimulationConfig& config) {
  config.validate();
  if (length < 1) throw std::invalid_argument("length must be >= 1");
  const auto c = covariance_row(cov, length);
  if (c[0] < 0) throw SimulationError("negative variance");
  const double tol = 1e-9 * std::max(c[0], 1e-300);
  auto rng = make_rng(config.seed, 0);
  std::normal_distribution<double> normal;

  GaussianSamples out;
  out.length = length;
  const auto count = static_cast<std::size_t>(config.sample_count);
  const auto L = static_cast<std::size_t>(length);
  out.paths.reserve(count);

  if (L == 1) {
    out.method = "cholesky";
    for (std::size_t i = 0; i < count; ++i) out.paths.push_back({std::sqrt(c[0]) * normal(rng)});
    return out;
  }

  if (auto lambda = circulant_eigenvalues(c, tol)) {
    out.method = "circulant";
    const std::size_t m = lambda->size();
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> w(m), y;
    // each transform yields two independent paths (real and imaginary parts)
    while (out.paths.size() < count) {
      for (std::size_t k = 0; k < m; ++k) {
        const double a = std::sqrt((*lambda)[k] / static_cast<double>(m));
        const double re = normal(rng), im = normal(rng);
        w[k] = {a * re, a * im};
      }
      fft.fwd(y, w);
      std::vector<double> p(L), q(L);
      for (std::size_t t = 0; t < L; ++t) {
        p[t] = y[t].real();
        q[t] = y[t].imag();
      }
      out.paths.push_back(std::move(p));
      if (out.paths.size() < count) out.paths.push_back(std::move(q));
    }
    return out;
  }

  Eigen::MatrixXd toeplitz(L, L);
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < L; ++j) toeplitz(i, j) = c[i > j ? i - j : j - i];
  }
  Eigen::MatrixXd factor;
  Eigen::LLT<Eigen::MatrixXd> llt(toeplitz);
  if (llt.info() == Eigen::Success) {
    out.method = "cholesky";
    factor = llt.matrixL();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(toeplitz);
    if (eig.eigenvalues().minCoeff() < -tol) {
      for (std::size_t k = 1; k <= L; ++k) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> minor(toeplitz.topLeftCorner(k, k), Eigen::EigenvaluesOnly);
        const double low = minor.eigenvalues().minCoeff();
        if (low < -tol) {
          throw SimulationError("covariance is not positive semidefinite: leading minor of size " +
                                std::to_string(k) + " has eigenvalue " + std::to_string(low));
        }
      }
    }
    out.method = "eigen-repaired";
    Eigen::VectorXd d = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    factor = eig.eigenvectors() * d.asDiagonal();
  }
  Eigen::VectorXd z(L);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t t = 0; t < L; ++t) z(static_cast<Eigen::Index>(t)) = normal(rng);
    Eigen::VectorXd x = factor * z;
    out.paths.emplace_back(x.data(), x.data() + L);
  }
  return out;
}

std::vector<LagEstimate> lag_covariance(const GaussianSamples& s, std::int64_t lag_max) {
  if (s.paths.empty()) throw SimulationError("degenerate sample: no paths");
  lag_max = std::min(lag_max, s.length - 1);
  std::vector<LagEstimate> out;
  const double n = static_cast<double>(s.paths.size());
  for (std::int64_t lag = 0; lag <= lag_max; ++lag) {
    const auto pairs = static_cast<std::size_t>(s.length - lag);
    double sum = 0, sum_sq = 0;
    for (const auto& p : s.paths) {
      double v = 0;
      for (std::size_t t = 0; t < pairs; ++t) v += p[t] * p[t + static_cast<std::size_t>(lag)];
      v /= static_cast<double>(pairs);
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
    out.push_back({lag, mean, std::sqrt(var / n)});
  }
  return out;
}

PoissonConfigurations poisson_sample_and_push(const RankOneSpec& spec, std::size_t depth,
                                              std::int64_t steps, const SimulationConfig& config) {
  config.validate();
  Geometry geo{spec};
  if (depth < 1 || depth > geo.depth_count()) throw std::invalid_argument("depth out of range");
  PoissonConfigurations out;
  out.depth = depth;
  out.steps = steps;
  out.region_measure = to_double(geo.measure(depth));
  const std::int64_t h = geo.height(depth);
  auto rng = make_rng(config.seed, 1);
  std::poisson_distribution<std::int64_t> count_d(config.intensity * out.region_measure);
  std::uniform_int_distribution<std::int64_t> level_d(0, h - 1);
  std::vector<std::uniform_int_distribution<std::int64_t>> column_d;
  for (std::size_t j = depth; j < geo.depth_count(); ++j) column_d.emplace_back(0, geo.cuts(j) - 1);

  for (std::int64_t i = 0; i < config.sample_count; ++i) {
    std::vector<PoissonPoint> conf(static_cast<std::size_t>(count_d(rng)));
    for (auto& pt : conf) {
      pt.position = level_d(rng);
      for (auto& d : column_d) pt.columns.push_back(d(rng));
      pt.image = point_map(geo, depth, pt.position, steps, pt.columns);
      if (!pt.image) ++out.escaped_points;
    }
    out.total_points += static_cast<std::int64_t>(conf.size());
    out.configurations.push_back(std::move(conf));
  }
  if (out.escape_fraction() > config.escape_cap) {
    throw SimulationError("escape cap exceeded: fraction " + std::to_string(out.escape_fraction()) +
                          " > " + std::to_string(config.escape_cap));
  }
  return out;
}

CovarianceEstimate linear_statistic_covariance(const RankOneSpec& spec,
                                               const PoissonConfigurations& pairs,
                                               const LevelFunction& f, double confidence) {
  Geometry geo{spec};
  check_function(geo, f);
  const std::size_t deepest = geo.depth_count();
  const auto n = pairs.configurations.size();
  if (n < 2) throw SimulationError("degenerate sample: fewer than 2 configurations");
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = 0, y = 0;
    for (const auto& pt : pairs.configurations[i]) {
      auto here = point_map(geo, pairs.depth, pt.position, 0, pt.columns);
      x += to_double(evaluate(geo, f, deepest, *here));
      if (pt.image) y += to_double(evaluate(geo, f, deepest, *pt.image));
    }
    xs[i] = x;
    ys[i] = y;
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  std::vector<double> prod(n);
  double mean = 0;
  for (std::size_t i = 0; i < n; ++i) {
    prod[i] = (xs[i] - mx) * (ys[i] - my);
    mean += prod[i];
  }
  mean /= static_cast<double>(n);
  double var = 0;
  for (double p : prod) var += (p - mean) * (p - mean);
  var /= static_cast<double>(n - 1);
  if (var == 0 && mean == 0 && std::all_of(xs.begin(), xs.end(), [&](double v) { return v == xs[0]; })) {
    throw SimulationError("degenerate sample: statistic is constant");
  }
  const double z = boost::math::quantile(boost::math::normal{}, 0.5 + confidence / 2);
  const double se = std::sqrt(var / static_cast<double>(n));
  CovarianceEstimate est;
  est.estimate = mean * static_cast<double>(n) / static_cast<double>(n - 1);
  est.ci_low = est.estimate - z * se;
  est.ci_high = est.estimate + z * se;
  est.samples = static_cast<std::int64_t>(n);
  est.escape_fraction = pairs.escape_fraction();
  return est;
}

}  // namespace rankone
