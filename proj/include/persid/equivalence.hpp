#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "persid/model_class.hpp"
#include "persid/policies.hpp"
#include "persid/reconstruction.hpp"

namespace persid {

/// kExact compares exact trajectory laws, kSampled compares `reps` samples
/// per side, kAuto picks kExact whenever both sides admit an exact law.
enum class ValidationMode { kAuto, kExact, kSampled };

std::string_view validation_mode_name(ValidationMode mode);
ValidationMode parse_validation_mode(std::string_view name);

/// The reference behavior. Params are optional: a source built from a
/// sampler alone can only be compared in sampled mode.
struct BehaviorSource {
  std::optional<SystemParams> params;
  TrajectorySampler sampler;

  static BehaviorSource from_params(SystemParams params);
  static BehaviorSource from_sampler(TrajectorySampler sampler);
};

struct PolicyDiscrepancy {
  std::string policy_id;
  double value = 0.0;
  DiscrepancyKind kind = DiscrepancyKind::kGaussianW2;
};

struct EquivalenceReport {
  std::vector<PolicyDiscrepancy> per_policy;
  double sup_value = 0.0;
  double delta = 0.0;
  bool pass = false;
  int replicates_per_policy = 0;  // 0 in exact mode
  ValidationMode mode = ValidationMode::kExact;
  std::map<std::string, std::uint64_t> seeds;
};

struct EquivalenceOptions {
  ValidationMode mode = ValidationMode::kAuto;
  int reps = 100;
  /// Policies the model was fitted on; any overlap with the test set is a
  /// SplitViolation.
  std::vector<std::string> fitted_policy_ids;
};

/// Minimum replicate count per side in sampled mode.
inline constexpr int kMinSampledReplicates = 20;

/// One sequence per test policy (seed sequence_seed(seed, id)); truth and
/// model samples use derive_seed(seed, "truth_samples:" + id) and
/// derive_seed(seed, "model_samples:" + id).
EquivalenceReport equivalence_test(const BehaviorSource& truth, const SystemParams& model,
                                   std::span<const PerturbationPolicy> test_policies,
                                   const ExperimentalDomain& domain, double delta,
                                   std::uint64_t seed, const EquivalenceOptions& options = {});

/// Sup-over-policies discrepancy without a verdict; shared by
/// equivalence_test and intrinsic_error.
std::vector<PolicyDiscrepancy> policy_discrepancies(
    const BehaviorSource& truth, const SystemParams& model,
    std::span<const PerturbationPolicy> test_policies, const ExperimentalDomain& domain,
    std::uint64_t seed, ValidationMode mode, int reps,
    std::map<std::string, std::uint64_t>* seeds_out = nullptr);

/// Resolves kAuto against the truth and model.
ValidationMode resolve_mode(ValidationMode requested, const BehaviorSource& truth,
                            const SystemParams* model, int horizon);

struct CalibrationResult {
  double delta = 0.0;
  std::vector<double> null_sups;  // one per calibration repetition
};

/// Truth-vs-truth bootstrap: the `quantile` order statistic
/// (rank ceil(quantile * n)) of the sup-over-policies discrepancy between two
/// independent truth sample sets. Uses the same sequences as
/// equivalence_test with the same seed.
CalibrationResult calibrate_delta(const BehaviorSource& truth,
                                  std::span<const PerturbationPolicy> test_policies,
                                  const ExperimentalDomain& domain, int reps, int n_calibration,
                                  double quantile, std::uint64_t seed,
                                  ValidationMode mode = ValidationMode::kSampled);

struct IntrinsicErrorOptions {
  /// Number of random EM starts.
  int fit_budget = 1;
  /// Latent dimension of the candidate class (LGSS state dim / HMM states).
  int latent_dim = 1;
  int train_reps = 50;
  ValidationMode mode = ValidationMode::kAuto;
  int validation_reps = 100;
  LossConfig loss;
  FitOptions fit;
  /// When non-empty, Theta is this finite set and nothing is fitted.
  std::vector<SystemParams> candidates;
};

struct IntrinsicErrorResult {
  /// Upper bound on the intrinsic error: min over starts of the sup
  /// discrepancy over test policies.
  double epsilon_star_estimate = 0.0;
  SystemParams best_theta;
  std::vector<double> start_sups;
  std::vector<FitReport> fits;
};

/// Random starting point of the given class for a domain.
SystemParams random_system(ModelClass cls, int latent_dim, const ExperimentalDomain& domain,
                           std::uint64_t seed);

/// Multi-start estimate of the intrinsic error. Start k is initialised with
/// random_system(..., derive_seed(seed, "init", k)) and fitted on
/// `training`; the sup discrepancy is evaluated with `seed`.
IntrinsicErrorResult intrinsic_error(ModelClass cls, const BehaviorSource& truth,
                                     const Dataset& training,
                                     std::span<const PerturbationPolicy> test_policies,
                                     const ExperimentalDomain& domain, std::uint64_t seed,
                                     const IntrinsicErrorOptions& options);

/// Same, collecting the training set from truth params under
/// `train_policies` with options.train_reps replicates each.
IntrinsicErrorResult intrinsic_error(ModelClass cls, const SystemParams& truth,
                                     std::span<const PerturbationPolicy> train_policies,
                                     std::span<const PerturbationPolicy> test_policies,
                                     const ExperimentalDomain& domain, std::uint64_t seed,
                                     const IntrinsicErrorOptions& options);

}  // namespace persid
