#pragma once

// Collision probability of a Gaussian configuration belief, by tensor-product
// Gauss-Hermite quadrature in the covariance eigenbasis, with a Monte Carlo
// estimator alongside.

#include "ccplan/collision.hpp"
#include "ccplan/linalg.hpp"
#include "ccplan/lqg.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ccplan {

inline constexpr int kMaxHermiteNodes = 30;
inline constexpr int kPlanningNodesPerDim = 3;
inline constexpr int kValidationNodesPerDim = 9;
/// Eigenvalues below this are treated as zero variance.
inline constexpr double kEigenvalueClamp = 1e-14;

/// Nodes and weights for integrals against exp(-y^2).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Physicists' Hermite polynomial H_n(y).
double hermite_polynomial(int n, double y);

QuadratureRule hermite_rule(int n);

/// Fills values[k] with the integrand at column k of `points` (d x m).
using BatchIntegrand = std::function<void(const Mat& points, std::span<double> values)>;

/// E[f(x)] for x = mean + basis * diag(stddevs) * z, z ~ N(0, I), using
/// `nodes_per_dim` nodes along every direction with positive stddev and the
/// single mean node along zero-variance directions.
double gauss_hermite_expectation(const Vec& mean, const Mat& basis, const Vec& stddevs,
                                 int nodes_per_dim, const BatchIntegrand& integrand);

/// Same, with the basis and stddevs taken from the eigendecomposition of `covariance`.
double gauss_hermite_expectation(const Vec& mean, const Mat& covariance, int nodes_per_dim,
                                 const BatchIntegrand& integrand);

double collision_probability_quadrature(const GaussianBelief& belief, const Environment& env,
                                        int nodes_per_dim);

double collision_probability_quadrature(const Vec& mean, const Mat& basis, const Vec& stddevs,
                                        const Environment& env, int nodes_per_dim);

double collision_probability_monte_carlo(const GaussianBelief& belief, const Environment& env,
                                         std::size_t samples, Rng& rng);

std::vector<double> waypoint_risks(std::span<const GaussianBelief> beliefs,
                                   const Environment& env, int nodes_per_dim);

}  // namespace ccplan
