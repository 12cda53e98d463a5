#pragma once

#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "persid/lgss.hpp"

namespace persid {

enum class DiscrepancyKind { kGaussianW2, kMmd, kEnergy, kTvExhaustive };
enum class Normalization { kRaw, kPerTimestep };

std::string_view discrepancy_kind_name(DiscrepancyKind kind);
DiscrepancyKind parse_discrepancy_kind(std::string_view name);

struct DiscrepancyResult {
  double value = 0.0;
  DiscrepancyKind kind = DiscrepancyKind::kGaussianW2;
  Normalization normalization = Normalization::kRaw;
  /// Sample sizes for sample-based kinds; vector dimension for exact kinds.
  Eigen::Index size_a = 0;
  Eigen::Index size_b = 0;
};

/// 2-Wasserstein distance between Gaussian trajectory laws. kPerTimestep
/// divides by sqrt(T+1).
DiscrepancyResult gaussian_w2(const GaussianTrajectoryLaw& a, const GaussianTrajectoryLaw& b,
                              Normalization normalization = Normalization::kRaw);

/// Squared MMD (biased V-statistic) with an RBF kernel. Rows are samples.
/// Without a bandwidth, sigma is the median pairwise distance of the pooled
/// sample (1 if that median is 0).
DiscrepancyResult mmd2_biased(const Eigen::MatrixXd& xs, const Eigen::MatrixXd& ys,
                              std::optional<double> bandwidth = std::nullopt);

/// Energy distance 2 E|X-Y| - E|X-X'| - E|Y-Y'| (V-statistic). Rows are samples.
DiscrepancyResult energy_distance(const Eigen::MatrixXd& xs, const Eigen::MatrixXd& ys);

/// Total variation 0.5 * sum |a_i - b_i| between two probability vectors.
DiscrepancyResult tv_exhaustive(std::span<const double> a, std::span<const double> b);

/// Pairwise Euclidean distances between the rows of xs and ys.
Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& xs, const Eigen::MatrixXd& ys);

}  // namespace persid
