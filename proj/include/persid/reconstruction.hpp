#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "persid/lgss.hpp"
#include "persid/model_class.hpp"
#include "persid/policies.hpp"

namespace persid {

enum class Regularizer { kNone, kRidge };
enum class LossMode { kNll, kDistributional };

/// Empirical loss L_N = (1/N) sum_i D_i + lambda * Omega.
struct LossConfig {
  double lambda = 0.0;
  Regularizer regularizer = Regularizer::kNone;
  LossMode mode = LossMode::kNll;
  DiscrepancyKind distributional_kind = DiscrepancyKind::kEnergy;
};

void validate(const LossConfig& config);

struct FitOptions {
  int max_iter = 200;
  double tol = 1e-6;
  LgssFixedFields fixed;
  /// Proximal step of the ridge shrinkage: A, B, C are scaled by
  /// 1 / (1 + lambda * prox_step) after each M-step.
  double prox_step = 1.0;
};

struct FitReport {
  SystemParams theta_hat;
  double final_loss = 0.0;
  std::vector<double> trace;  // loss after k iterations
  int iterations = 0;
  bool converged = false;
  std::size_t n_records = 0;
};

/// nll mode: -(1/N) sum loglik + lambda * Omega. distributional mode: mean
/// over replicate groups of size >= 2 of D(group outputs, model samples of
/// the same size under the group's inputs). Model samples for group g use
/// derive_seed(seed, "loss_group", g).
double empirical_loss(const SystemParams& theta, const Dataset& data, const LossConfig& config,
                      std::uint64_t seed = 0);

/// Minimizes the nll loss by EM (LGSS) or Baum-Welch (IO-HMM) from `init`.
FitReport fit(const SystemParams& init, const Dataset& data, const LossConfig& config,
              const FitOptions& options = {});

struct ConsistencyRow {
  std::size_t n_records = 0;
  double discrepancy = 0.0;
};

/// For each N: draws N trajectories from truth (record i uses policy
/// i mod |train_policies|, so smaller datasets are prefixes of larger ones),
/// fits from `init`, and reports the sup over probe policies of the exact
/// law discrepancy between fit and truth.
std::vector<ConsistencyRow> consistency_probe(const SystemParams& truth,
                                              const SystemParams& init,
                                              std::span<const PerturbationPolicy> train_policies,
                                              std::span<const PerturbationPolicy> probe_policies,
                                              const ExperimentalDomain& domain,
                                              std::span<const std::size_t> sizes,
                                              std::uint64_t seed,
                                              const FitOptions& options = {});

}  // namespace persid
