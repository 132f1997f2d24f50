#include "ccplan/lqg.hpp"

#include "ccplan/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <string>

namespace ccplan {

namespace {

Mat symmetrized(const Mat& m) { return 0.5 * (m + m.transpose()); }

// Gain P H' S^+ for innovation covariance S. A singular S is tolerated only
// when the cross covariance has no component along its null space, which is
// the case when there is nothing left to estimate in those directions.
Mat kalman_gain(const Mat& cross, const Mat& innovation, std::size_t step) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(symmetrized(innovation));
  const Vec& lambda = eig.eigenvalues();
  const Mat& V = eig.eigenvectors();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  const double cutoff = 1e-13 * scale;
  Vec inv = Vec::Zero(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] > cutoff) {
      inv[i] = 1.0 / lambda[i];
    } else {
      const double leak = (cross * V.col(i)).cwiseAbs().maxCoeff();
      if (leak > 1e-12 * std::max(1.0, cross.cwiseAbs().maxCoeff())) {
        throw NumericalFailure("singular innovation covariance", step);
      }
    }
  }
  return cross * V * inv.asDiagonal() * V.transpose();
}

}  // namespace

void GaussianBelief::validate(double tol) const {
  if (covariance.rows() != mean.size() || covariance.cols() != mean.size()) {
    throw InvalidArgument("belief covariance does not match mean dimension");
  }
  if (!mean.allFinite()) throw InvalidArgument("belief mean must be finite");
  if (!is_symmetric_psd(covariance, tol)) {
    throw InvalidArgument("belief covariance is not symmetric positive semidefinite");
  }
}

const ProcessNoiseModel& NoiseModel::process_at(std::size_t step) const {
  return step < process_schedule.size() ? process_schedule[step] : process;
}

void NoiseModel::validate(std::size_t joints) const {
  if (process.joints() != joints) {
    throw InvalidArgument("noise.process: expected " + std::to_string(joints) + " joint blocks");
  }
  process.validate();
  for (std::size_t t = 0; t < process_schedule.size(); ++t) {
    if (process_schedule[t].joints() != joints) {
      throw InvalidArgument("noise.process_schedule[" + std::to_string(t) + "]: expected " +
                            std::to_string(joints) + " joint blocks");
    }
    process_schedule[t].validate();
  }
  observation.validate();
  const auto dim = static_cast<Eigen::Index>(2 * joints);
  if (initial_covariance.rows() != dim || initial_covariance.cols() != dim) {
    throw InvalidArgument("noise.initial: expected a " + std::to_string(dim) + "x" +
                          std::to_string(dim) + " covariance");
  }
  if (!is_symmetric_psd(initial_covariance, 1e-12)) {
    throw InvalidArgument("noise.initial is not symmetric positive semidefinite");
  }
}

NoiseModel NoiseModel::zero(std::size_t joints) {
  NoiseModel noise;
  noise.process = ProcessNoiseModel::zero(joints);
  const auto dim = static_cast<Eigen::Index>(2 * joints);
  noise.initial_covariance = Mat::Zero(dim, dim);
  return noise;
}

std::vector<Mat> lqr_gains(const Mat& A, const Mat& B, const Mat& Q, const Mat& R,
                           std::size_t horizon) {
  if (horizon < 1) throw InvalidArgument("LQR horizon must be at least 1");
  if (A.rows() != A.cols() || B.rows() != A.rows() || Q.rows() != A.rows() ||
      Q.cols() != A.cols() || R.rows() != B.cols() || R.cols() != B.cols()) {
    throw InvalidArgument("LQR matrix dimensions disagree");
  }
  if (!is_symmetric_psd(Q, 1e-12)) throw InvalidArgument("LQR state weight must be PSD");
  Eigen::LLT<Mat> r_check(symmetrized(R));
  if (r_check.info() != Eigen::Success || !is_symmetric_psd(R, 1e-12)) {
    throw InvalidArgument("LQR input weight must be positive definite");
  }

  std::vector<Mat> gains(horizon);
  Mat S = Q;
  for (std::size_t k = horizon; k-- > 0;) {
    const Mat BtS = B.transpose() * S;
    const Mat lhs = R + BtS * B;
    gains[k] = lhs.ldlt().solve(BtS * A);
    S = symmetrized(Q + A.transpose() * S * (A - B * gains[k]));
  }
  return gains;
}

KalmanResult kalman_covariances(const Mat& A, std::span<const Mat> observation,
                                std::span<const Mat> process, const Mat& observation_noise,
                                const Mat& noise_scaling, const Mat& initial) {
  if (process.empty()) throw InvalidArgument("Kalman recursion needs a process covariance");
  if (process.size() != 1 && process.size() != observation.size()) {
    throw InvalidArgument("process covariance count must be 1 or one per step");
  }
  const Mat measurement_noise = noise_scaling * observation_noise * noise_scaling.transpose();
  const Mat I = Mat::Identity(A.rows(), A.cols());

  KalmanResult out;
  out.gains.reserve(observation.size());
  out.prior.reserve(observation.size());
  out.posterior.reserve(observation.size());
  Mat P = initial;
  for (std::size_t k = 0; k < observation.size(); ++k) {
    const Mat& H = observation[k];
    const Mat& M = process.size() == 1 ? process[0] : process[k];
    const Mat prior = symmetrized(A * P * A.transpose() + M);
    const Mat innovation = H * prior * H.transpose() + measurement_noise;
    const Mat K = kalman_gain(prior * H.transpose(), innovation, k + 1);
    const Mat IKH = I - K * H;
    P = symmetrized(IKH * prior * IKH.transpose() + K * measurement_noise * K.transpose());
    out.gains.push_back(K);
    out.prior.push_back(prior);
    out.posterior.push_back(P);
  }
  return out;
}

LqgController design_lqg(const NominalTrajectory& traj, const ArmSpec& arm,
                         const NoiseModel& noise, const LqrWeights& weights) {
  traj.check_consistent();
  const std::size_t n = traj.joints();
  if (n != arm.joints()) throw InvalidArgument("trajectory and arm disagree on joint count");
  noise.validate(n);
  const std::size_t steps = traj.steps();
  const auto dim = static_cast<Eigen::Index>(2 * n);

  LqgController c;
  c.A = state_transition(n, traj.dt);
  c.B = input_matrix(n, traj.dt);
  const Mat Q = weights.state * Mat::Identity(dim, dim);
  const Mat R = weights.input * Mat::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  c.feedback = lqr_gains(c.A, c.B, Q, R, steps);

  c.observation.reserve(steps);
  c.process.reserve(steps);
  for (std::size_t t = 1; t <= steps; ++t) {
    const auto J = jacobian(traj.waypoints[t].positions, arm);
    Mat H = Mat::Zero(2, dim);
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j) H.col(2 * j) = J.col(j);
    c.observation.push_back(std::move(H));
    c.process.push_back(noise.process_at(t - 1).full_covariance());
  }
  c.kalman = kalman_covariances(c.A, c.observation, c.process, noise.observation.noise_covariance,
                                noise.observation.noise_scaling, noise.initial_covariance);
  return c;
}

std::vector<Mat> closed_loop_covariances(const LqgController& c, const NoiseModel& noise) {
  const Eigen::Index dim = c.A.rows();
  const Mat& W = noise.observation.noise_scaling;
  const Mat& N = noise.observation.noise_covariance;

  std::vector<Mat> out;
  out.reserve(c.feedback.size() + 1);
  Mat R = Mat::Zero(2 * dim, 2 * dim);
  R.topLeftCorner(dim, dim) = noise.initial_covariance;
  out.push_back(R);

  Mat F(2 * dim, 2 * dim);
  Mat G = Mat::Zero(2 * dim, dim + 2);
  Mat noise_cov = Mat::Zero(dim + 2, dim + 2);
  noise_cov.bottomRightCorner(2, 2) = N;
  for (std::size_t k = 0; k < c.feedback.size(); ++k) {
    const Mat& K = c.kalman.gains[k];
    const Mat& H = c.observation[k];
    const Mat BL = c.B * c.feedback[k];
    const Mat KHA = K * H * c.A;
    F.topLeftCorner(dim, dim) = c.A;
    F.topRightCorner(dim, dim) = -BL;
    F.bottomLeftCorner(dim, dim) = KHA;
    F.bottomRightCorner(dim, dim) = c.A - BL - KHA;
    G.topLeftCorner(dim, dim) = Mat::Identity(dim, dim);
    G.bottomLeftCorner(dim, dim) = K * H;
    G.bottomRightCorner(dim, 2) = K * W;
    noise_cov.topLeftCorner(dim, dim) = c.process[k];
    R = symmetrized(F * R * F.transpose() + G * noise_cov * G.transpose());
    out.push_back(R);
  }
  return out;
}

std::vector<GaussianBelief> apriori_distributions(const NominalTrajectory& traj,
                                                  const ArmSpec& arm, const NoiseModel& noise,
                                                  const LqrWeights& weights) {
  const LqgController controller = design_lqg(traj, arm, noise, weights);
  const auto joint = closed_loop_covariances(controller, noise);
  const Eigen::Index dim = controller.A.rows();
  std::vector<GaussianBelief> beliefs;
  beliefs.reserve(joint.size());
  for (std::size_t t = 0; t < joint.size(); ++t) {
    beliefs.push_back(GaussianBelief{traj.waypoints[t].positions,
                                     symmetrized(position_block(joint[t].topLeftCorner(dim, dim)))});
  }
  return beliefs;
}

}  // namespace ccplan
