#pragma once

#include <Eigen/Dense>

#include <random>

namespace ccplan {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

using Rng = std::mt19937_64;

/// True when `m` is square, symmetric within `tol` and its smallest
/// eigenvalue is at least -tol.
bool is_symmetric_psd(const Mat& m, double tol);

/// Factor F with F F' = m for a symmetric PSD matrix, built from the
/// eigendecomposition with negative eigenvalues clamped to zero.
Mat psd_factor(const Mat& m);

/// Draws one N(0, I) vector of dimension `dim`.
Vec standard_normal(Eigen::Index dim, Rng& rng);

}  // namespace ccplan
