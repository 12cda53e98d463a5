#include "persid/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "persid/error.hpp"

namespace persid {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kPsdTolerance = 1e-10;

MatrixXd psd_sqrt(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()));
  const VectorXd& ev = es.eigenvalues();
  if (ev.size() > 0 && ev.minCoeff() < -kPsdTolerance) {
    fail(ErrorCode::kNotPSD, "covariance has eigenvalue " + std::to_string(ev.minCoeff()));
  }
  return es.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

void check_samples(const MatrixXd& xs, const MatrixXd& ys) {
  if (xs.rows() == 0 || ys.rows() == 0) fail(ErrorCode::kEmptySample, "sample set is empty");
  if (xs.cols() != ys.cols()) {
    fail(ErrorCode::kDimensionMismatch, "sample vectors have different lengths");
  }
}

}  // namespace

std::string_view discrepancy_kind_name(DiscrepancyKind kind) {
  switch (kind) {
    case DiscrepancyKind::kGaussianW2: return "gaussian_w2";
    case DiscrepancyKind::kMmd: return "mmd";
    case DiscrepancyKind::kEnergy: return "energy";
    case DiscrepancyKind::kTvExhaustive: return "tv_exhaustive";
  }
  return "unknown";
}

DiscrepancyKind parse_discrepancy_kind(std::string_view name) {
  for (auto kind : {DiscrepancyKind::kGaussianW2, DiscrepancyKind::kMmd, DiscrepancyKind::kEnergy,
                    DiscrepancyKind::kTvExhaustive}) {
    if (discrepancy_kind_name(kind) == name) return kind;
  }
  fail(ErrorCode::kConfigError, "unknown discrepancy kind '" + std::string(name) + "'");
}

DiscrepancyResult gaussian_w2(const GaussianTrajectoryLaw& a, const GaussianTrajectoryLaw& b,
                              Normalization normalization) {
  if (a.mean.size() != b.mean.size() || a.cov.rows() != b.cov.rows() ||
      a.cov.rows() != a.mean.size()) {
    fail(ErrorCode::kDimensionMismatch, "laws have different dimensions");
  }
  // tr(Sa + Sb - 2 (Sa^1/2 Sb Sa^1/2)^1/2) equals min over orthogonal W of
  // |Sa^1/2 - Sb^1/2 W|_F^2, attained at the polar factor of Sb^1/2 Sa^1/2.
  // Evaluating the Frobenius norm directly avoids the cancellation of the
  // trace form when the two covariances are close.
  const MatrixXd root_a = psd_sqrt(a.cov);
  const MatrixXd root_b = psd_sqrt(b.cov);
  double cov_term = 0.0;
  if (root_a.size() > 0) {
    Eigen::JacobiSVD<MatrixXd> svd(root_b.transpose() * root_a,
                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
    const MatrixXd W = svd.matrixU() * svd.matrixV().transpose();
    cov_term = (root_a - root_b * W).squaredNorm();
  }
  const double squared = (a.mean - b.mean).squaredNorm() + cov_term;
  DiscrepancyResult r;
  r.kind = DiscrepancyKind::kGaussianW2;
  r.normalization = normalization;
  r.size_a = a.mean.size();
  r.size_b = b.mean.size();
  r.value = std::sqrt(std::max(squared, 0.0));
  if (normalization == Normalization::kPerTimestep) {
    r.value /= std::sqrt(static_cast<double>(std::max(a.steps(), 1)));
  }
  return r;
}

MatrixXd pairwise_distances(const MatrixXd& xs, const MatrixXd& ys) {
  const VectorXd nx = xs.rowwise().squaredNorm();
  const VectorXd ny = ys.rowwise().squaredNorm();
  MatrixXd d2 = -2.0 * xs * ys.transpose();
  d2.colwise() += nx;
  d2.rowwise() += ny.transpose();
  return d2.cwiseMax(0.0).cwiseSqrt();
}

namespace {

/// Mean pairwise distance within one set, computed exactly (not via the
/// Gram expansion) so identical rows contribute exactly 0.
double mean_self_distance(const MatrixXd& xs) {
  const MatrixXd cols = xs.transpose();
  const Eigen::Index n = cols.cols();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) total += (cols.col(i) - cols.col(j)).norm();
  }
  return 2.0 * total / static_cast<double>(n * n);
}

double mean_cross_distance(const MatrixXd& xs, const MatrixXd& ys) {
  const MatrixXd xc = xs.transpose();
  const MatrixXd yc = ys.transpose();
  double total = 0.0;
  for (Eigen::Index i = 0; i < xc.cols(); ++i) {
    for (Eigen::Index j = 0; j < yc.cols(); ++j) total += (xc.col(i) - yc.col(j)).norm();
  }
  return total / static_cast<double>(xc.cols() * yc.cols());
}

}  // namespace

DiscrepancyResult mmd2_biased(const MatrixXd& xs, const MatrixXd& ys,
                              std::optional<double> bandwidth) {
  check_samples(xs, ys);
  MatrixXd pooled(xs.rows() + ys.rows(), xs.cols());
  pooled << xs, ys;
  const Eigen::Index nx = xs.rows(), n = pooled.rows();

  const MatrixXd cols = pooled.transpose();
  MatrixXd d2(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d2(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d2(i, j) = d2(j, i) = (cols.col(i) - cols.col(j)).squaredNorm();
    }
  }
  double sigma = 1.0;
  if (bandwidth) {
    if (!(*bandwidth > 0.0)) fail(ErrorCode::kInvalidArgument, "bandwidth must be positive");
    sigma = *bandwidth;
  } else {
    std::vector<double> dists;
    dists.reserve(n * (n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) dists.push_back(std::sqrt(d2(i, j)));
    if (!dists.empty()) {
      std::sort(dists.begin(), dists.end());
      const std::size_t k = dists.size();
      const double median = k % 2 ? dists[k / 2] : 0.5 * (dists[k / 2 - 1] + dists[k / 2]);
      if (median > 0.0) sigma = median;
    }
  }
  const MatrixXd K = (-d2 / (2.0 * sigma * sigma)).array().exp().matrix();
  const Eigen::Index ny = ys.rows();
  const double kxx = K.topLeftCorner(nx, nx).sum() / static_cast<double>(nx * nx);
  const double kyy = K.bottomRightCorner(ny, ny).sum() / static_cast<double>(ny * ny);
  const double kxy = K.topRightCorner(nx, ny).sum() / static_cast<double>(nx * ny);

  DiscrepancyResult r;
  r.kind = DiscrepancyKind::kMmd;
  r.size_a = nx;
  r.size_b = ny;
  r.value = std::max(0.0, kxx + kyy - 2.0 * kxy);
  return r;
}

DiscrepancyResult energy_distance(const MatrixXd& xs, const MatrixXd& ys) {
  check_samples(xs, ys);
  const double value =
      2.0 * mean_cross_distance(xs, ys) - mean_self_distance(xs) - mean_self_distance(ys);
  DiscrepancyResult r;
  r.kind = DiscrepancyKind::kEnergy;
  r.size_a = xs.rows();
  r.size_b = ys.rows();
  r.value = std::max(0.0, value);
  return r;
}

DiscrepancyResult tv_exhaustive(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::kSupportMismatch, "laws have supports of size " + std::to_string(a.size()) +
                                          " and " + std::to_string(b.size()));
  }
  double sum_a = 0.0, sum_b = 0.0, total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum_a += a[i];
    sum_b += b[i];
    total += std::abs(a[i] - b[i]);
  }
  if (std::abs(sum_a - 1.0) > 1e-9 || std::abs(sum_b - 1.0) > 1e-9) {
    fail(ErrorCode::kInvalidArgument, "laws must sum to 1 within 1e-9");
  }
  DiscrepancyResult r;
  r.kind = DiscrepancyKind::kTvExhaustive;
  r.size_a = static_cast<Eigen::Index>(a.size());
  r.size_b = static_cast<Eigen::Index>(b.size());
  r.value = std::min(0.5 * total, 1.0);
  return r;
}

}  // namespace persid
