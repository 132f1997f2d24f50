#pragma once

// A-priori state distributions along a nominal trajectory under LQR tracking
// and Kalman filtering (the LQG-MP construction).
//
// Sign convention: the deviation control is u_bar = -L_t * x_hat_t.

#include "ccplan/dynamics.hpp"
#include "ccplan/kinematics.hpp"
#include "ccplan/linalg.hpp"
#include "ccplan/trajectory.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ccplan {

struct GaussianBelief {
  Vec mean;
  /// Over joint positions only.
  Mat covariance;

  void validate(double tol = 1e-10) const;
};

struct NoiseModel {
  ProcessNoiseModel process;
  /// Optional per-step override; entry t drives the transition into waypoint t + 1.
  std::vector<ProcessNoiseModel> process_schedule;
  ObservationModel observation;
  /// Full-state (interleaved, 2n x 2n) covariance of the initial state.
  Mat initial_covariance;

  const ProcessNoiseModel& process_at(std::size_t step) const;
  void validate(std::size_t joints) const;

  static NoiseModel zero(std::size_t joints);
};

/// Q = state * I, R = input * I.
struct LqrWeights {
  double state = 1.0;
  double input = 1.0;
};

/// Finite-horizon LQR gains L_0..L_{T-1} from the backward Riccati pass with
/// terminal cost Q.
std::vector<Mat> lqr_gains(const Mat& A, const Mat& B, const Mat& Q, const Mat& R,
                           std::size_t horizon);

struct KalmanResult {
  /// Entry k belongs to measurement step k + 1.
  std::vector<Mat> gains;
  std::vector<Mat> prior;
  std::vector<Mat> posterior;
};

/// Predict/update covariance recursion. `observation[k]` and
/// `process[k]` belong to step k + 1; a single-element `process` span applies
/// to every step.
KalmanResult kalman_covariances(const Mat& A, std::span<const Mat> observation,
                                std::span<const Mat> process, const Mat& observation_noise,
                                const Mat& noise_scaling, const Mat& initial);

/// Everything a closed-loop execution of `traj` needs.
struct LqgController {
  Mat A;
  Mat B;
  /// L_t, one per control step.
  std::vector<Mat> feedback;
  /// H_t for t = 1..T (index t - 1): nominal Jacobian padded with zero velocity columns.
  std::vector<Mat> observation;
  /// Process covariance for step t = 1..T (index t - 1).
  std::vector<Mat> process;
  KalmanResult kalman;
};

LqgController design_lqg(const NominalTrajectory& traj, const ArmSpec& arm,
                         const NoiseModel& noise, const LqrWeights& weights = {});

/// Joint covariance of (true deviation, estimated deviation) at every waypoint,
/// each 4n x 4n.
std::vector<Mat> closed_loop_covariances(const LqgController& controller,
                                         const NoiseModel& noise);

/// One belief per waypoint: mean = nominal configuration, covariance =
/// position marginal of the true-deviation covariance.
std::vector<GaussianBelief> apriori_distributions(const NominalTrajectory& traj,
                                                  const ArmSpec& arm, const NoiseModel& noise,
                                                  const LqrWeights& weights = {});

}  // namespace ccplan
