#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "persid/domain.hpp"
#include "persid/seeding.hpp"

namespace persid {

/// Linear Gaussian state-space model
///   x_{t+1} = A x_t + B u_t + w_t,  w_t ~ N(0, Q)
///   y_t     = C x_t + v_t,          v_t ~ N(0, R)
/// with x_0 ~ N(mu0, Sigma0).
struct LgssParams {
  Eigen::MatrixXd A, B, C, Q, R;
  Eigen::VectorXd mu0;
  Eigen::MatrixXd Sigma0;

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }
  int output_dim() const { return static_cast<int>(C.rows()); }
};

/// Throws DimensionMismatch for inconsistent shapes and NotPSD when Q or
/// Sigma0 has an eigenvalue below -1e-10 or R one below 1e-8.
void validate(const LgssParams& params);

/// Copy with Q, R, Sigma0 symmetrized and slightly negative eigenvalues of
/// Q and Sigma0 clamped to zero.
LgssParams sanitized(const LgssParams& params);

/// (S A S^-1, S B, C S^-1, S Q S^T, R, S mu0, S Sigma0 S^T).
LgssParams similarity_transform(const LgssParams& params, const Eigen::MatrixXd& S);

/// Law of the stacked output y_{0:T}; block t of the mean holds y_t.
struct GaussianTrajectoryLaw {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  int output_dim = 1;

  int steps() const { return output_dim == 0 ? 0 : static_cast<int>(mean.size()) / output_dim; }
};

struct FilterResult {
  double loglik = 0.0;
  Eigen::MatrixXd filtered_means;   // (T+1) x n, x_{t|t}
  std::vector<Eigen::MatrixXd> filtered_covs;
  Eigen::MatrixXd predicted_means;  // (T+1) x n, x_{t|t-1}
  std::vector<Eigen::MatrixXd> predicted_covs;
};

struct SmootherResult {
  double loglik = 0.0;
  Eigen::MatrixXd means;  // (T+1) x n, x_{t|T}
  std::vector<Eigen::MatrixXd> covs;
  /// lag_covs[t] = Cov(x_{t+1}, x_t | y_{0:T}), t = 0..T-1.
  std::vector<Eigen::MatrixXd> lag_covs;
};

/// Step-by-step sampler. Draw order per step is fixed (state noise, then
/// measurement noise) so that the batch and closed-loop paths agree.
class LgssStepper {
 public:
  LgssStepper(const LgssParams& params, std::uint64_t seed);

  /// Samples x_0 and returns y_0.
  Eigen::VectorXd start();
  /// Advances with input u and returns the next output.
  Eigen::VectorXd step(const Eigen::VectorXd& u);

 private:
  Eigen::VectorXd noise(const Eigen::MatrixXd& factor);

  LgssParams params_;
  Eigen::MatrixXd q_factor_, r_factor_, sigma0_factor_;
  Rng rng_;
  std::normal_distribution<double> normal_;
  Eigen::VectorXd x_;
};

TrajectoryRecord simulate(const LgssParams& params, const PerturbationSequence& u,
                          std::uint64_t seed);

GaussianTrajectoryLaw trajectory_law(const LgssParams& params, const PerturbationSequence& u);

FilterResult kalman_filter(const LgssParams& params, const PerturbationSequence& u,
                           const Eigen::MatrixXd& y);

SmootherResult kalman_smooth(const LgssParams& params, const PerturbationSequence& u,
                             const Eigen::MatrixXd& y);

/// Sum of kalman_filter log-likelihoods over the records of a dataset.
double dataset_loglik(const LgssParams& params, const Dataset& data);

struct LgssFixedFields {
  bool A = false, B = false, C = false, Q = false, R = false, mu0 = false, Sigma0 = false;
};

struct EmOptions {
  int max_iter = 200;
  double tol = 1e-6;  // stop when |loglik_k - loglik_{k-1}| < tol
  LgssFixedFields fixed;
  /// Raise MonotonicityViolation when the log-likelihood drops by more than
  /// monotonicity_tol * max(1, |loglik|).
  bool check_monotone = true;
  double monotonicity_tol = 1e-9;
  /// Applied to the parameters after every M-step, before the floors.
  std::function<void(LgssParams&)> post_m_step;
};

struct EmResult {
  LgssParams params;
  /// loglik_trace[k] is the dataset log-likelihood after k M-steps.
  std::vector<double> loglik_trace;
  int iterations = 0;
  bool converged = false;
};

EmResult em_fit(const LgssParams& init, const Dataset& data, const EmOptions& options = {});

struct ControllabilityResult {
  Eigen::MatrixXd matrix;  // [B, AB, ..., A^{n-1}B]
  int rank = 0;
};

ControllabilityResult controllability_matrix(const LgssParams& params);

/// [CB, CAB, ..., C A^{k_max} B].
std::vector<Eigen::MatrixXd> markov_parameters(const LgssParams& params, int k_max);

/// Random stable starting point for EM: spectral radius of A is 0.5.
LgssParams random_lgss(int n, int m, int p, std::uint64_t seed);

}  // namespace persid
