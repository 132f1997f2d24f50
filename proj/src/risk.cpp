#include "ccplan/risk.hpp"

#include "ccplan/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>

namespace ccplan {

namespace {

QuadratureRule compute_hermite_rule(int n) {
  // Roots from the symmetric Jacobi matrix of the Hermite recurrence, then
  // polished by Newton on H_n (H_n' = 2n H_{n-1}).
  Mat jacobi = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jacobi(k - 1, k) = jacobi(k, k - 1) = std::sqrt(0.5 * k);
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(jacobi, Eigen::EigenvaluesOnly);
  std::vector<double> nodes(eig.eigenvalues().data(), eig.eigenvalues().data() + n);
  for (double& y : nodes) {
    for (int it = 0; it < 3; ++it) {
      const double deriv = 2.0 * n * hermite_polynomial(n - 1, y);
      if (deriv == 0.0) break;
      y -= hermite_polynomial(n, y) / deriv;
    }
  }
  std::sort(nodes.begin(), nodes.end());
  for (int j = 0; j < n / 2; ++j) {
    const double m = 0.5 * (nodes[n - 1 - j] - nodes[j]);
    nodes[j] = -m;
    nodes[n - 1 - j] = m;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;

  double factorial = 1.0;
  for (int k = 2; k <= n; ++k) factorial *= k;
  const double numerator = std::ldexp(factorial, n - 1) * std::sqrt(std::numbers::pi);
  std::vector<double> weights(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double h = hermite_polynomial(n - 1, nodes[j]);
    weights[j] = numerator / (static_cast<double>(n) * n * h * h);
  }
  return QuadratureRule{std::move(nodes), std::move(weights)};
}

const QuadratureRule& cached_rule(int n) {
  static std::array<std::optional<QuadratureRule>, kMaxHermiteNodes + 1> cache;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  auto& slot = cache[static_cast<std::size_t>(n)];
  if (!slot) slot = compute_hermite_rule(n);
  return *slot;
}

void check_nodes(int nodes_per_dim) {
  if (nodes_per_dim < 1 || nodes_per_dim > kMaxHermiteNodes) {
    throw InvalidArgument("nodes per dimension must be in [1, " +
                          std::to_string(kMaxHermiteNodes) + "]");
  }
}

struct Eigenbasis {
  Mat basis;
  Vec stddevs;
};

Eigenbasis whiten(const Mat& covariance) {
  if (!is_symmetric_psd(covariance, 1e-10)) {
    throw InvalidArgument("belief covariance is not symmetric positive semidefinite");
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (covariance + covariance.transpose()));
  Vec stddevs = eig.eigenvalues();
  for (Eigen::Index i = 0; i < stddevs.size(); ++i) {
    stddevs[i] = stddevs[i] < kEigenvalueClamp ? 0.0 : std::sqrt(stddevs[i]);
  }
  return Eigenbasis{eig.eigenvectors(), std::move(stddevs)};
}

double collision_integral(const Vec& mean, const Mat& basis, const Vec& stddevs,
                          const Environment& env, int nodes_per_dim) {
  const double p = gauss_hermite_expectation(
      mean, basis, stddevs, nodes_per_dim, [&env](const Mat& points, std::span<double> values) {
        const auto hits = in_collision_batch(points, env);
        for (std::size_t k = 0; k < hits.size(); ++k) values[k] = hits[k] ? 1.0 : 0.0;
      });
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

double hermite_polynomial(int n, double y) {
  if (n < 0) throw InvalidArgument("Hermite degree must be non-negative");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * y;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * y * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

QuadratureRule hermite_rule(int n) {
  check_nodes(n);
  return cached_rule(n);
}

double gauss_hermite_expectation(const Vec& mean, const Mat& basis, const Vec& stddevs,
                                 int nodes_per_dim, const BatchIntegrand& integrand) {
  check_nodes(nodes_per_dim);
  const Eigen::Index d = mean.size();
  if (basis.rows() != d || basis.cols() != d || stddevs.size() != d) {
    throw InvalidArgument("quadrature basis does not match mean dimension");
  }
  static const QuadratureRule kMeanOnly{{0.0}, {std::sqrt(std::numbers::pi)}};
  const QuadratureRule& full = cached_rule(nodes_per_dim);

  std::vector<const QuadratureRule*> rules(static_cast<std::size_t>(d));
  std::size_t total = 1;
  for (Eigen::Index i = 0; i < d; ++i) {
    rules[static_cast<std::size_t>(i)] = stddevs[i] > 0.0 ? &full : &kMeanOnly;
    total *= rules[static_cast<std::size_t>(i)]->nodes.size();
  }

  // Odometer over the tensor grid, first dimension outermost.
  Mat points(d, static_cast<Eigen::Index>(total));
  std::vector<double> weights(total);
  std::vector<std::size_t> index(static_cast<std::size_t>(d), 0);
  for (std::size_t k = 0; k < total; ++k) {
    Vec x = mean;
    double w = 1.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto& rule = *rules[static_cast<std::size_t>(i)];
      const std::size_t j = index[static_cast<std::size_t>(i)];
      x += basis.col(i) * (std::numbers::sqrt2 * stddevs[i] * rule.nodes[j]);
      w *= rule.weights[j];
    }
    points.col(static_cast<Eigen::Index>(k)) = x;
    weights[k] = w;
    for (Eigen::Index i = d - 1; i >= 0; --i) {
      auto& slot = index[static_cast<std::size_t>(i)];
      if (++slot < rules[static_cast<std::size_t>(i)]->nodes.size()) break;
      slot = 0;
    }
  }

  std::vector<double> values(total);
  integrand(points, values);
  // The grid weights sum to pi^(d/2) up to rounding; dividing by their actual
  // sum keeps a constant integrand exact.
  double sum = 0.0;
  double weight_total = 0.0;
  for (std::size_t k = 0; k < total; ++k) {
    sum += weights[k] * values[k];
    weight_total += weights[k];
  }
  return sum / weight_total;
}

double gauss_hermite_expectation(const Vec& mean, const Mat& covariance, int nodes_per_dim,
                                 const BatchIntegrand& integrand) {
  const Eigenbasis e = whiten(covariance);
  return gauss_hermite_expectation(mean, e.basis, e.stddevs, nodes_per_dim, integrand);
}

double collision_probability_quadrature(const GaussianBelief& belief, const Environment& env,
                                        int nodes_per_dim) {
  check_nodes(nodes_per_dim);
  if (belief.covariance.rows() != belief.mean.size()) {
    throw InvalidArgument("belief covariance does not match mean dimension");
  }
  const Eigenbasis e = whiten(belief.covariance);
  return collision_integral(belief.mean, e.basis, e.stddevs, env, nodes_per_dim);
}

double collision_probability_quadrature(const Vec& mean, const Mat& basis, const Vec& stddevs,
                                        const Environment& env, int nodes_per_dim) {
  return collision_integral(mean, basis, stddevs, env, nodes_per_dim);
}

double collision_probability_monte_carlo(const GaussianBelief& belief, const Environment& env,
                                         std::size_t samples, Rng& rng) {
  if (samples < 1) throw InvalidArgument("Monte Carlo needs at least one sample");
  if (!is_symmetric_psd(belief.covariance, 1e-10)) {
    throw InvalidArgument("belief covariance is not symmetric positive semidefinite");
  }
  const Mat factor = psd_factor(belief.covariance);
  const Eigen::Index d = belief.mean.size();
  constexpr std::size_t kChunk = 4096;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::size_t hits = 0;
  for (std::size_t done = 0; done < samples; done += kChunk) {
    const auto m = static_cast<Eigen::Index>(std::min(kChunk, samples - done));
    Mat z(d, m);
    for (Eigen::Index c = 0; c < m; ++c) {
      for (Eigen::Index i = 0; i < d; ++i) z(i, c) = normal(rng);
    }
    const Mat points = (factor * z).colwise() + belief.mean;
    for (auto h : in_collision_batch(points, env)) hits += h;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

std::vector<double> waypoint_risks(std::span<const GaussianBelief> beliefs,
                                   const Environment& env, int nodes_per_dim) {
  std::vector<double> risks;
  risks.reserve(beliefs.size());
  for (const auto& b : beliefs) risks.push_back(collision_probability_quadrature(b, env, nodes_per_dim));
  return risks;
}

}  // namespace ccplan
