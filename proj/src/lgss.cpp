#include "persid/lgss.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "persid/error.hpp"
#include "persid/parallel.hpp"

namespace persid {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kCovarianceFloor = 1e-8;
constexpr double kCancellationUlps = 1e3;
constexpr double kPsdTolerance = 1e-10;

MatrixXd symmetrize(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

/// F with F F^T = m, negative eigenvalues treated as zero.
MatrixXd psd_factor(const MatrixXd& m) {
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m));
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

/// Eigenvalues at or below `noise` are set to zero before clamping to `floor`.
MatrixXd floor_eigenvalues(const MatrixXd& m, double floor, double noise = 0.0) {
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m));
  const VectorXd clamped =
      es.eigenvalues().unaryExpr([noise](double v) { return v <= noise ? 0.0 : v; }).cwiseMax(floor);
  return symmetrize(es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose());
}

MatrixXd pinv_psd(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(m));
  const VectorXd& ev = es.eigenvalues();
  const double cutoff = std::max(ev.cwiseAbs().maxCoeff(), 0.0) * m.rows() * 1e-12;
  VectorXd inv = VectorXd::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > cutoff && ev(i) > 0.0) inv(i) = 1.0 / ev(i);
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

double min_eigenvalue(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::SelfAdjointEigenSolver<MatrixXd>(symmetrize(m), Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::kDimensionMismatch, what);
}

void check_io(const LgssParams& params, const PerturbationSequence& u) {
  require(u.input_dim() == params.input_dim(),
          "input has " + std::to_string(u.input_dim()) + " channels, model expects " +
              std::to_string(params.input_dim()));
}

void check_outputs(const LgssParams& params, const PerturbationSequence& u,
                   const MatrixXd& y) {
  check_io(params, u);
  require(y.rows() == u.horizon() + 1, "outputs must have T+1 rows");
  require(y.cols() == params.output_dim(), "output width does not match C");
}

/// Covariance recursions of the filter and smoother. They depend only on
/// the parameters and the horizon, so EM computes them once per horizon and
/// shares them across records.
struct CovarianceSchedule {
  std::vector<MatrixXd> predicted;  // P_{t|t-1}
  std::vector<MatrixXd> filtered;   // P_{t|t}
  std::vector<MatrixXd> gain;       // K_t
  std::vector<MatrixXd> innovation_inv;
  std::vector<double> innovation_logdet;
  std::vector<MatrixXd> smoother_gain;  // J_t, t < T
  std::vector<MatrixXd> smoothed;       // P_{t|T}
  std::vector<MatrixXd> lag;            // Cov(x_{t+1}, x_t | y)
};

CovarianceSchedule covariance_schedule(const LgssParams& params, int horizon, bool smooth) {
  const int n = params.state_dim();
  const int steps = horizon + 1;
  CovarianceSchedule s;
  s.predicted.resize(steps);
  s.filtered.resize(steps);
  s.gain.resize(steps);
  s.innovation_inv.resize(steps);
  s.innovation_logdet.resize(steps);
  const MatrixXd eye = MatrixXd::Identity(n, n);

  MatrixXd P = symmetrize(params.Sigma0);
  for (int t = 0; t < steps; ++t) {
    s.predicted[t] = P;
    const MatrixXd S = symmetrize(params.C * P * params.C.transpose() + params.R);
    Eigen::LLT<MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) {
      fail(ErrorCode::kNumericalFailure,
           "innovation covariance is not positive definite at t=" + std::to_string(t));
    }
    const MatrixXd S_inv = llt.solve(MatrixXd::Identity(S.rows(), S.cols()));
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < S.rows(); ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    const MatrixXd K = P * params.C.transpose() * S_inv;
    const MatrixXd IKC = eye - K * params.C;
    // Joseph form.
    const MatrixXd Pf = symmetrize(IKC * P * IKC.transpose() + K * params.R * K.transpose());
    s.gain[t] = K;
    s.innovation_inv[t] = symmetrize(S_inv);
    s.innovation_logdet[t] = logdet;
    s.filtered[t] = Pf;
    if (t + 1 < steps) P = symmetrize(params.A * Pf * params.A.transpose() + params.Q);
  }

  if (smooth) {
    s.smoother_gain.resize(horizon);
    s.smoothed.resize(steps);
    s.lag.resize(horizon);
    s.smoothed[horizon] = s.filtered[horizon];
    for (int t = horizon - 1; t >= 0; --t) {
      const MatrixXd J = s.filtered[t] * params.A.transpose() * pinv_psd(s.predicted[t + 1]);
      s.smoother_gain[t] = J;
      s.smoothed[t] = symmetrize(s.filtered[t] +
                                 J * (s.smoothed[t + 1] - s.predicted[t + 1]) * J.transpose());
      s.lag[t] = s.smoothed[t + 1] * J.transpose();
    }
  }
  return s;
}

struct MeanPass {
  double loglik = 0.0;
  MatrixXd predicted;  // (T+1) x n
  MatrixXd filtered;
  MatrixXd smoothed;
};

MeanPass mean_pass(const LgssParams& params, const CovarianceSchedule& s,
                   const PerturbationSequence& u, const MatrixXd& y, bool smooth) {
  const int n = params.state_dim();
  const int p = params.output_dim();
  const int steps = static_cast<int>(y.rows());
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  MeanPass r;
  r.predicted.resize(steps, n);
  r.filtered.resize(steps, n);
  VectorXd xp = params.mu0;
  VectorXd xf(n);
  VectorXd e(p);
  for (int t = 0; t < steps; ++t) {
    r.predicted.row(t) = xp.transpose();
    e.noalias() = y.row(t).transpose() - params.C * xp;
    xf = xp;
    xf.noalias() += s.gain[t] * e;
    r.filtered.row(t) = xf.transpose();
    r.loglik -= 0.5 * (p * log_2pi + s.innovation_logdet[t] + e.dot(s.innovation_inv[t] * e));
    if (t + 1 < steps) {
      xp.noalias() = params.A * xf;
      xp.noalias() += params.B * u.values.row(t).transpose();
    }
  }
  if (smooth) {
    r.smoothed.resize(steps, n);
    r.smoothed.row(steps - 1) = r.filtered.row(steps - 1);
    for (int t = steps - 2; t >= 0; --t) {
      r.smoothed.row(t) =
          r.filtered.row(t) +
          (s.smoother_gain[t] * (r.smoothed.row(t + 1) - r.predicted.row(t + 1)).transpose())
              .transpose();
    }
  }
  return r;
}

}  // namespace

void validate(const LgssParams& p) {
  const auto n = p.A.rows();
  require(p.A.cols() == n, "A must be square");
  require(p.B.rows() == n, "B must have n rows");
  require(p.C.cols() == n, "C must have n columns");
  require(p.Q.rows() == n && p.Q.cols() == n, "Q must be n x n");
  require(p.R.rows() == p.C.rows() && p.R.cols() == p.C.rows(), "R must be p x p");
  require(p.mu0.size() == n, "mu0 must have length n");
  require(p.Sigma0.rows() == n && p.Sigma0.cols() == n, "Sigma0 must be n x n");
  if (min_eigenvalue(p.Q) < -kPsdTolerance) fail(ErrorCode::kNotPSD, "Q is not PSD");
  if (min_eigenvalue(p.Sigma0) < -kPsdTolerance) fail(ErrorCode::kNotPSD, "Sigma0 is not PSD");
  if (p.R.size() > 0 && min_eigenvalue(p.R) < kCovarianceFloor) {
    fail(ErrorCode::kNotPSD, "R must have eigenvalues >= 1e-8");
  }
}

LgssParams sanitized(const LgssParams& params) {
  LgssParams out = params;
  out.Q = floor_eigenvalues(params.Q, 0.0);
  out.Sigma0 = floor_eigenvalues(params.Sigma0, 0.0);
  out.R = symmetrize(params.R);
  return out;
}

LgssParams similarity_transform(const LgssParams& params, const MatrixXd& S) {
  const MatrixXd S_inv = S.inverse();
  LgssParams out = params;
  out.A = S * params.A * S_inv;
  out.B = S * params.B;
  out.C = params.C * S_inv;
  out.Q = symmetrize(S * params.Q * S.transpose());
  out.mu0 = S * params.mu0;
  out.Sigma0 = symmetrize(S * params.Sigma0 * S.transpose());
  return out;
}

LgssStepper::LgssStepper(const LgssParams& params, std::uint64_t seed)
    : params_(params),
      q_factor_(psd_factor(params.Q)),
      r_factor_(psd_factor(params.R)),
      sigma0_factor_(psd_factor(params.Sigma0)),
      rng_(make_rng(seed)) {}

VectorXd LgssStepper::noise(const MatrixXd& factor) {
  VectorXd z(factor.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal_(rng_);
  return factor * z;
}

VectorXd LgssStepper::start() {
  x_ = params_.mu0 + noise(sigma0_factor_);
  return params_.C * x_ + noise(r_factor_);
}

VectorXd LgssStepper::step(const VectorXd& u) {
  x_ = params_.A * x_ + params_.B * u + noise(q_factor_);
  return params_.C * x_ + noise(r_factor_);
}

TrajectoryRecord simulate(const LgssParams& params, const PerturbationSequence& u,
                          std::uint64_t seed) {
  check_io(params, u);
  LgssStepper stepper(params, seed);
  MatrixXd y(u.horizon() + 1, params.output_dim());
  y.row(0) = stepper.start().transpose();
  for (int t = 0; t < u.horizon(); ++t) {
    y.row(t + 1) = stepper.step(u.values.row(t).transpose()).transpose();
  }
  TrajectoryRecord record;
  record.inputs = u;
  record.outputs = std::move(y);
  record.seed = seed;
  return record;
}

GaussianTrajectoryLaw trajectory_law(const LgssParams& params, const PerturbationSequence& u) {
  check_io(params, u);
  const int n = params.state_dim();
  const int p = params.output_dim();
  const int steps = u.horizon() + 1;

  std::vector<VectorXd> state_mean(steps);
  std::vector<MatrixXd> state_cov(steps);
  state_mean[0] = params.mu0;
  state_cov[0] = symmetrize(params.Sigma0);
  for (int t = 0; t + 1 < steps; ++t) {
    state_mean[t + 1] = params.A * state_mean[t] + params.B * u.values.row(t).transpose();
    state_cov[t + 1] = symmetrize(params.A * state_cov[t] * params.A.transpose() + params.Q);
  }

  GaussianTrajectoryLaw law;
  law.output_dim = p;
  law.mean.resize(steps * p);
  law.cov.resize(steps * p, steps * p);
  for (int s = 0; s < steps; ++s) {
    law.mean.segment(s * p, p) = params.C * state_mean[s];
    // cross = Cov(x_s, x_t) = P_s (A^{t-s})^T
    MatrixXd cross = state_cov[s];
    for (int t = s; t < steps; ++t) {
      MatrixXd block = params.C * cross * params.C.transpose();
      if (t == s) block = symmetrize(block + params.R);
      law.cov.block(s * p, t * p, p, p) = block;
      law.cov.block(t * p, s * p, p, p) = block.transpose();
      cross = cross * params.A.transpose();
    }
  }
  (void)n;
  return law;
}

FilterResult kalman_filter(const LgssParams& params, const PerturbationSequence& u,
                           const MatrixXd& y) {
  check_outputs(params, u, y);
  const auto schedule = covariance_schedule(params, u.horizon(), false);
  auto pass = mean_pass(params, schedule, u, y, false);
  FilterResult r;
  r.loglik = pass.loglik;
  r.filtered_means = std::move(pass.filtered);
  r.predicted_means = std::move(pass.predicted);
  r.filtered_covs = schedule.filtered;
  r.predicted_covs = schedule.predicted;
  return r;
}

SmootherResult kalman_smooth(const LgssParams& params, const PerturbationSequence& u,
                             const MatrixXd& y) {
  check_outputs(params, u, y);
  const auto schedule = covariance_schedule(params, u.horizon(), true);
  auto pass = mean_pass(params, schedule, u, y, true);
  SmootherResult r;
  r.loglik = pass.loglik;
  r.means = std::move(pass.smoothed);
  r.covs = schedule.smoothed;
  r.lag_covs = schedule.lag;
  return r;
}

double dataset_loglik(const LgssParams& params, const Dataset& data) {
  std::map<int, CovarianceSchedule> schedules;
  double total = 0.0;
  for (const auto& record : data.records) {
    check_outputs(params, record.inputs, record.continuous());
    const int T = record.inputs.horizon();
    auto it = schedules.find(T);
    if (it == schedules.end()) it = schedules.emplace(T, covariance_schedule(params, T, false)).first;
    total += mean_pass(params, it->second, record.inputs, record.continuous(), false).loglik;
  }
  return total;
}

namespace {

/// Expected complete-data sufficient statistics accumulated over records.
struct SufficientStats {
  double loglik = 0.0;
  MatrixXd xx_obs, yx, yy;       // over t = 0..T
  MatrixXd x1x1, x1x0, x0x0;     // transitions t -> t+1
  MatrixXd x1u, x0u, uu;
  VectorXd x0_sum;
  MatrixXd x0x0_init;
  double n_obs = 0, n_trans = 0, n_records = 0;

  SufficientStats(int n, int m, int p)
      : xx_obs(MatrixXd::Zero(n, n)), yx(MatrixXd::Zero(p, n)), yy(MatrixXd::Zero(p, p)),
        x1x1(MatrixXd::Zero(n, n)), x1x0(MatrixXd::Zero(n, n)), x0x0(MatrixXd::Zero(n, n)),
        x1u(MatrixXd::Zero(n, m)), x0u(MatrixXd::Zero(n, m)), uu(MatrixXd::Zero(m, m)),
        x0_sum(VectorXd::Zero(n)), x0x0_init(MatrixXd::Zero(n, n)) {}

  void add(const SufficientStats& o) {
    loglik += o.loglik;
    xx_obs += o.xx_obs; yx += o.yx; yy += o.yy;
    x1x1 += o.x1x1; x1x0 += o.x1x0; x0x0 += o.x0x0;
    x1u += o.x1u; x0u += o.x0u; uu += o.uu;
    x0_sum += o.x0_sum; x0x0_init += o.x0x0_init;
    n_obs += o.n_obs; n_trans += o.n_trans; n_records += o.n_records;
  }
};

SufficientStats e_step(const LgssParams& params, const Dataset& data) {
  const int n = params.state_dim(), m = params.input_dim(), p = params.output_dim();
  std::map<int, CovarianceSchedule> schedules;
  std::map<int, int> horizon_counts;
  for (const auto& record : data.records) {
    check_outputs(params, record.inputs, record.continuous());
    const int T = record.inputs.horizon();
    if (!schedules.count(T)) schedules.emplace(T, covariance_schedule(params, T, true));
    ++horizon_counts[T];
  }

  std::vector<SufficientStats> partial(data.size(), SufficientStats(n, m, p));
  parallel_for(data.size(), [&](std::size_t i) {
    const auto& record = data.records[i];
    const MatrixXd& Y = record.continuous();
    const MatrixXd& U = record.inputs.values;
    const int T = record.inputs.horizon();
    const auto pass = mean_pass(params, schedules.at(T), record.inputs, Y, true);
    const MatrixXd& X = pass.smoothed;
    auto& s = partial[i];
    s.loglik = pass.loglik;
    s.xx_obs.noalias() = X.transpose() * X;
    s.yx.noalias() = Y.transpose() * X;
    s.yy.noalias() = Y.transpose() * Y;
    if (T > 0) {
      const auto X0 = X.topRows(T);
      const auto X1 = X.bottomRows(T);
      s.x1x1.noalias() = X1.transpose() * X1;
      s.x1x0.noalias() = X1.transpose() * X0;
      s.x0x0.noalias() = X0.transpose() * X0;
      s.x1u.noalias() = X1.transpose() * U;
      s.x0u.noalias() = X0.transpose() * U;
      s.uu.noalias() = U.transpose() * U;
    }
    s.x0_sum = X.row(0).transpose();
    s.x0x0_init.noalias() = s.x0_sum * s.x0_sum.transpose();
    s.n_obs = T + 1;
    s.n_trans = T;
    s.n_records = 1;
  });

  SufficientStats total(n, m, p);
  for (const auto& s : partial) total.add(s);

  // Covariance terms are shared by all records of a given horizon.
  for (const auto& [T, count] : horizon_counts) {
    const auto& sched = schedules.at(T);
    for (int t = 0; t <= T; ++t) total.xx_obs += count * sched.smoothed[t];
    for (int t = 0; t < T; ++t) {
      total.x0x0 += count * sched.smoothed[t];
      total.x1x1 += count * sched.smoothed[t + 1];
      total.x1x0 += count * sched.lag[t];
    }
    total.x0x0_init += count * sched.smoothed[0];
  }
  return total;
}

/// Least-squares solution X of X * gram = cross (gram symmetric PSD).
MatrixXd regress(const MatrixXd& cross, const MatrixXd& gram) {
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(gram);
  return cod.solve(cross.transpose()).transpose();
}

void m_step(LgssParams& p, const SufficientStats& s, const LgssFixedFields& fixed) {
  const int n = p.state_dim(), m = p.input_dim();
  if (s.n_trans > 0) {
    if (!fixed.A && !fixed.B) {
      MatrixXd gram(n + m, n + m);
      gram << s.x0x0, s.x0u, s.x0u.transpose(), s.uu;
      MatrixXd cross(n, n + m);
      cross << s.x1x0, s.x1u;
      const MatrixXd W = regress(cross, gram);
      p.A = W.leftCols(n);
      p.B = W.rightCols(m);
    } else if (!fixed.A) {
      p.A = regress(s.x1x0 - p.B * s.x0u.transpose(), s.x0x0);
    } else if (!fixed.B) {
      p.B = regress(s.x1u - p.A * s.x0u, s.uu);
    }
    if (!fixed.Q) {
      MatrixXd gram(n + m, n + m);
      gram << s.x0x0, s.x0u, s.x0u.transpose(), s.uu;
      MatrixXd cross(n, n + m);
      cross << s.x1x0, s.x1u;
      MatrixXd W(n, n + m);
      W << p.A, p.B;
      const MatrixXd Q = (s.x1x1 - W * cross.transpose() - cross * W.transpose() +
                          W * gram * W.transpose()) /
                         s.n_trans;
      // Q is a difference of O(trace(x1x1)) terms; anything below that
      // cancellation level is roundoff.
      const double noise = kCancellationUlps * std::numeric_limits<double>::epsilon() *
                           s.x1x1.trace() / s.n_trans;
      p.Q = floor_eigenvalues(Q, 0.0, noise);
    }
  }
  if (!fixed.C) p.C = regress(s.yx, s.xx_obs);
  if (!fixed.R) {
    const MatrixXd R = (s.yy - p.C * s.yx.transpose() - s.yx * p.C.transpose() +
                        p.C * s.xx_obs * p.C.transpose()) /
                       s.n_obs;
    p.R = floor_eigenvalues(R, kCovarianceFloor);
  }
  const VectorXd mu0 = s.x0_sum / s.n_records;
  if (!fixed.mu0) p.mu0 = mu0;
  if (!fixed.Sigma0) {
    const MatrixXd S0 = s.x0x0_init / s.n_records - s.x0_sum * p.mu0.transpose() / s.n_records -
                        p.mu0 * s.x0_sum.transpose() / s.n_records + p.mu0 * p.mu0.transpose();
    const double noise = kCancellationUlps * std::numeric_limits<double>::epsilon() *
                         s.x0x0_init.trace() / s.n_records;
    p.Sigma0 = floor_eigenvalues(S0, 0.0, noise);
  }
}

}  // namespace

EmResult em_fit(const LgssParams& init, const Dataset& data, const EmOptions& options) {
  if (data.empty()) fail(ErrorCode::kEmptyDataset, "em_fit needs at least one record");
  if (data.records.front().is_discrete()) {
    fail(ErrorCode::kInvalidArgument, "em_fit needs continuous outputs");
  }
  validate(init);

  EmResult result;
  result.params = init;
  auto stats = e_step(result.params, data);
  result.loglik_trace.push_back(stats.loglik);
  for (int k = 1; k <= options.max_iter; ++k) {
    LgssParams next = result.params;
    m_step(next, stats, options.fixed);
    if (options.post_m_step) {
      options.post_m_step(next);
      next.Q = floor_eigenvalues(next.Q, 0.0);
      next.R = floor_eigenvalues(next.R, kCovarianceFloor);
    }
    auto next_stats = e_step(next, data);
    const double prev = result.loglik_trace.back();
    const double curr = next_stats.loglik;
    if (!std::isfinite(curr)) {
      fail(ErrorCode::kNumericalFailure, "log-likelihood became non-finite at iteration " +
                                             std::to_string(k));
    }
    if (options.check_monotone &&
        curr < prev - options.monotonicity_tol * std::max(1.0, std::abs(prev))) {
      fail(ErrorCode::kMonotonicityViolation,
           "log-likelihood decreased from " + std::to_string(prev) + " to " +
               std::to_string(curr) + " at iteration " + std::to_string(k));
    }
    result.params = std::move(next);
    stats = std::move(next_stats);
    result.loglik_trace.push_back(curr);
    result.iterations = k;
    if (std::abs(curr - prev) < options.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

ControllabilityResult controllability_matrix(const LgssParams& params) {
  const int n = params.state_dim();
  const int m = params.input_dim();
  ControllabilityResult r;
  r.matrix.resize(n, n * m);
  MatrixXd block = params.B;
  for (int k = 0; k < n; ++k) {
    r.matrix.middleCols(k * m, m) = block;
    block = params.A * block;
  }
  if (r.matrix.size() == 0) return r;
  Eigen::JacobiSVD<MatrixXd> svd(r.matrix);
  const VectorXd& sv = svd.singularValues();
  const double threshold = n * sv.maxCoeff() * 1e-12;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > threshold) ++r.rank;
  }
  return r;
}

std::vector<MatrixXd> markov_parameters(const LgssParams& params, int k_max) {
  if (k_max < 0) fail(ErrorCode::kInvalidArgument, "k_max must be >= 0");
  std::vector<MatrixXd> out;
  out.reserve(k_max + 1);
  MatrixXd block = params.B;
  for (int k = 0; k <= k_max; ++k) {
    out.push_back(params.C * block);
    block = params.A * block;
  }
  return out;
}

LgssParams random_lgss(int n, int m, int p, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal;
  auto draw = [&](int rows, int cols) {
    MatrixXd out(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) out(i, j) = normal(rng);
    return out;
  };
  LgssParams params;
  params.A = draw(n, n);
  const double radius = Eigen::EigenSolver<MatrixXd>(params.A).eigenvalues().cwiseAbs().maxCoeff();
  if (radius > 0.0) params.A *= 0.5 / radius;
  params.B = draw(n, m);
  params.C = draw(p, n);
  params.Q = 0.5 * MatrixXd::Identity(n, n);
  params.R = MatrixXd::Identity(p, p);
  params.mu0 = VectorXd::Zero(n);
  params.Sigma0 = MatrixXd::Identity(n, n);
  return params;
}

}  // namespace persid
