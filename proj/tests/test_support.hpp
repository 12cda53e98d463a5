#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library routine it is used to check.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "persid/domain.hpp"
#include "persid/iohmm.hpp"
#include "persid/lgss.hpp"

namespace persid::testing {

inline Eigen::MatrixXd random_matrix(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = n(rng);
  }
  return m;
}

inline Eigen::MatrixXd random_spd(int n, std::mt19937_64& rng, double floor = 0.1) {
  const Eigen::MatrixXd g = random_matrix(n, n, rng, 0.5);
  return g * g.transpose() + floor * Eigen::MatrixXd::Identity(n, n);
}

/// Random stable LGSS with generic (non-diagonal) covariances.
inline LgssParams random_instance(int n, int m, int p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  LgssParams P;
  P.A = random_matrix(n, n, rng);
  const double radius = Eigen::EigenSolver<Eigen::MatrixXd>(P.A).eigenvalues().cwiseAbs().maxCoeff();
  P.A *= 0.85 / std::max(radius, 1e-12);
  P.B = random_matrix(n, m, rng);
  P.C = random_matrix(p, n, rng);
  P.Q = random_spd(n, rng);
  P.R = random_spd(p, rng);
  P.mu0 = random_matrix(n, 1, rng);
  P.Sigma0 = random_spd(n, rng);
  return P;
}

inline PerturbationSequence random_inputs(int T, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PerturbationSequence seq;
  seq.values.resize(T, m);
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < m; ++k) seq.values(t, k) = u(rng);
  }
  seq.policy_id = "random";
  return seq;
}

struct DenseLaw {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Stacked law of y_{0:T} by writing y as an affine map of the independent
/// Gaussians (x_0, w_0..w_{T-1}, v_0..v_T) and pushing their covariance
/// through that map.
inline DenseLaw dense_lgss_law(const LgssParams& P, const PerturbationSequence& u) {
  const int n = P.A.rows(), p = P.C.rows(), T = u.values.rows();
  const int dz = n + T * n + (T + 1) * p;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero((T + 1) * p, dz);
  Eigen::VectorXd c = Eigen::VectorXd::Zero((T + 1) * p);
  Eigen::MatrixXd Sz = Eigen::MatrixXd::Zero(dz, dz);
  Sz.block(0, 0, n, n) = P.Sigma0;
  for (int t = 0; t < T; ++t) Sz.block(n + t * n, n + t * n, n, n) = P.Q;
  for (int t = 0; t <= T; ++t) {
    Sz.block(n + T * n + t * p, n + T * n + t * p, p, p) = P.R;
  }
  for (int t = 0; t <= T; ++t) {
    Eigen::MatrixXd Apow = Eigen::MatrixXd::Identity(n, n);
    for (int k = 0; k < t; ++k) Apow = P.A * Apow;
    // x_t = A^t x0 + sum_{j<t} A^{t-1-j} (B u_j + w_j)
    M.block(t * p, 0, p, n) = P.C * Apow;
    Eigen::VectorXd mean_x = Apow * P.mu0;
    for (int j = 0; j < t; ++j) {
      Eigen::MatrixXd Ak = Eigen::MatrixXd::Identity(n, n);
      for (int k = 0; k < t - 1 - j; ++k) Ak = P.A * Ak;
      mean_x += Ak * P.B * u.values.row(j).transpose();
      M.block(t * p, n + j * n, p, n) = P.C * Ak;
    }
    M.block(t * p, n + T * n + t * p, p, p) = Eigen::MatrixXd::Identity(p, p);
    c.segment(t * p, p) = P.C * mean_x;
  }
  return {c, M * Sz * M.transpose()};
}

inline double gaussian_logpdf(const Eigen::VectorXd& y, const Eigen::VectorXd& mean,
                              const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  const Eigen::VectorXd z = llt.matrixL().solve(y - mean);
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (z.squaredNorm() + logdet + y.size() * std::log(2.0 * M_PI));
}

inline Eigen::VectorXd stack_rows(const Eigen::MatrixXd& y) {
  Eigen::VectorXd v(y.size());
  for (int t = 0; t < y.rows(); ++t) v.segment(t * y.cols(), y.cols()) = y.row(t).transpose();
  return v;
}

inline Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()));
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

/// Textbook closed form sqrt(|dm|^2 + tr(Sa + Sb - 2 (Sa^1/2 Sb Sa^1/2)^1/2)).
inline double w2_textbook(const Eigen::VectorXd& ma, const Eigen::MatrixXd& Sa,
                          const Eigen::VectorXd& mb, const Eigen::MatrixXd& Sb) {
  const Eigen::MatrixXd ra = sqrtm_psd(Sa);
  const double tr = (Sa + Sb - 2.0 * sqrtm_psd(ra * Sb * ra)).trace();
  return std::sqrt(std::max(0.0, (ma - mb).squaredNorm() + tr));
}

inline double naive_energy(const Eigen::MatrixXd& xs, const Eigen::MatrixXd& ys) {
  auto mean_dist = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i) {
      for (int j = 0; j < b.rows(); ++j) s += (a.row(i) - b.row(j)).norm();
    }
    return s / (double(a.rows()) * b.rows());
  };
  return std::max(0.0, 2.0 * mean_dist(xs, ys) - mean_dist(xs, xs) - mean_dist(ys, ys));
}

inline double naive_mmd2(const Eigen::MatrixXd& xs, const Eigen::MatrixXd& ys, double sigma) {
  auto mean_k = [sigma](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i) {
      for (int j = 0; j < b.rows(); ++j) {
        s += std::exp(-(a.row(i) - b.row(j)).squaredNorm() / (2.0 * sigma * sigma));
      }
    }
    return s / (double(a.rows()) * b.rows());
  };
  return std::max(0.0, mean_k(xs, xs) + mean_k(ys, ys) - 2.0 * mean_k(xs, ys));
}

/// Random IO-HMM with strictly positive tables.
inline IoHmmParams random_hmm(int S, int U, int O, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  auto stochastic = [&](int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) m(r, c) = unit(rng);
      m.row(r) /= m.row(r).sum();
    }
    return m;
  };
  IoHmmParams h;
  h.n_states = S;
  h.n_inputs = U;
  h.n_obs = O;
  for (int u = 0; u < U; ++u) h.trans.push_back(stochastic(S, S));
  h.emit = stochastic(S, O);
  h.init = stochastic(1, S).row(0).transpose();
  return h;
}

/// Sum over all S^(T+1) hidden paths of the joint path probability.
inline double brute_force_likelihood(const IoHmmParams& h, const Symbols& u, const Symbols& y) {
  const int S = h.n_states;
  const int L = static_cast<int>(y.size());
  std::size_t paths = 1;
  for (int t = 0; t < L; ++t) paths *= S;
  double total = 0.0;
  std::vector<int> x(L);
  for (std::size_t code = 0; code < paths; ++code) {
    std::size_t c = code;
    for (int t = 0; t < L; ++t) {
      x[t] = static_cast<int>(c % S);
      c /= S;
    }
    double p = h.init(x[0]) * h.emit(x[0], y[0]);
    for (int t = 0; t + 1 < L; ++t) p *= h.trans[u[t]](x[t], x[t + 1]) * h.emit(x[t + 1], y[t + 1]);
    total += p;
  }
  return total;
}

inline PerturbationSequence symbol_inputs(const Symbols& u) {
  PerturbationSequence seq;
  seq.values.resize(static_cast<int>(u.size()), 1);
  for (std::size_t t = 0; t < u.size(); ++t) seq.values(static_cast<int>(t), 0) = u[t];
  seq.policy_id = "symbols";
  return seq;
}

inline ExperimentalDomain scalar_domain(int horizon, std::vector<std::string> ids, double lo = -1.0,
                                        double hi = 1.0) {
  ExperimentalDomain d;
  d.input_dim = 1;
  d.output_dim = 1;
  d.input_bounds = {{lo, hi}};
  d.horizon = horizon;
  d.policy_family_ids = std::move(ids);
  return d;
}

}  // namespace persid::testing
