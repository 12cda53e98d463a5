#include "persid/equivalence.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <set>

#include "persid/error.hpp"
#include "persid/parallel.hpp"
#include "persid/runner.hpp"
#include "persid/seeding.hpp"

namespace persid {

std::string_view validation_mode_name(ValidationMode mode) {
  switch (mode) {
    case ValidationMode::kAuto: return "auto";
    case ValidationMode::kExact: return "exact";
    case ValidationMode::kSampled: return "sampled";
  }
  return "unknown";
}

ValidationMode parse_validation_mode(std::string_view name) {
  for (auto mode : {ValidationMode::kAuto, ValidationMode::kExact, ValidationMode::kSampled}) {
    if (validation_mode_name(mode) == name) return mode;
  }
  fail(ErrorCode::kConfigError, "unknown validation mode '" + std::string(name) + "'");
}

BehaviorSource BehaviorSource::from_params(SystemParams params) {
  BehaviorSource source;
  source.sampler = make_sampler(params);
  source.params = std::move(params);
  return source;
}

BehaviorSource BehaviorSource::from_sampler(TrajectorySampler sampler) {
  BehaviorSource source;
  source.sampler = std::move(sampler);
  return source;
}

ValidationMode resolve_mode(ValidationMode requested, const BehaviorSource& truth,
                            const SystemParams* model, int horizon) {
  const bool exact_possible = truth.params && has_exact_law(*truth.params, horizon) &&
                              (model == nullptr || has_exact_law(*model, horizon));
  switch (requested) {
    case ValidationMode::kAuto:
      return exact_possible ? ValidationMode::kExact : ValidationMode::kSampled;
    case ValidationMode::kExact:
      if (!exact_possible) {
        fail(ErrorCode::kInvalidArgument, "exact mode needs exact laws on both sides");
      }
      return ValidationMode::kExact;
    case ValidationMode::kSampled:
      return ValidationMode::kSampled;
  }
  return requested;
}

std::vector<PolicyDiscrepancy> policy_discrepancies(
    const BehaviorSource& truth, const SystemParams& model,
    std::span<const PerturbationPolicy> test_policies, const ExperimentalDomain& domain,
    std::uint64_t seed, ValidationMode mode, int reps,
    std::map<std::string, std::uint64_t>* seeds_out) {
  mode = resolve_mode(mode, truth, &model, domain.horizon);
  if (mode == ValidationMode::kSampled && reps < kMinSampledReplicates) {
    fail(ErrorCode::kInsufficientReplicates,
         "sampled mode needs at least " + std::to_string(kMinSampledReplicates) +
             " replicates, got " + std::to_string(reps));
  }
  const auto model_sampler = make_sampler(model);
  std::vector<PolicyDiscrepancy> out(test_policies.size());
  std::vector<std::array<std::uint64_t, 3>> seeds(test_policies.size());
  parallel_for(test_policies.size(), [&](std::size_t i) {
    const auto& policy = test_policies[i];
    const std::uint64_t seq_seed = sequence_seed(seed, policy.id);
    const auto u = generate_for_domain(policy, domain, domain.horizon, seq_seed);
    out[i].policy_id = policy.id;
    seeds[i][0] = seq_seed;
    if (mode == ValidationMode::kExact) {
      const auto d = exact_discrepancy(*truth.params, model, u);
      out[i].value = d.value;
      out[i].kind = d.kind;
      return;
    }
    const std::uint64_t truth_seed = derive_seed(seed, "truth_samples:" + policy.id);
    const std::uint64_t model_seed = derive_seed(seed, "model_samples:" + policy.id);
    seeds[i][1] = truth_seed;
    seeds[i][2] = model_seed;
    const auto xs = sample_set(truth.sampler, u, reps, truth_seed, domain.output_space);
    const auto ys = sample_set(model_sampler, u, reps, model_seed, domain.output_space);
    const auto d = sampled_discrepancy(xs, ys, domain.output_space);
    out[i].value = d.value;
    out[i].kind = d.kind;
  });
  if (seeds_out) {
    for (std::size_t i = 0; i < test_policies.size(); ++i) {
      const auto& id = test_policies[i].id;
      (*seeds_out)["sequence:" + id] = seeds[i][0];
      if (mode == ValidationMode::kSampled) {
        (*seeds_out)["truth_samples:" + id] = seeds[i][1];
        (*seeds_out)["model_samples:" + id] = seeds[i][2];
      }
    }
  }
  return out;
}

EquivalenceReport equivalence_test(const BehaviorSource& truth, const SystemParams& model,
                                   std::span<const PerturbationPolicy> test_policies,
                                   const ExperimentalDomain& domain, double delta,
                                   std::uint64_t seed, const EquivalenceOptions& options) {
  const std::set<std::string> fitted(options.fitted_policy_ids.begin(),
                                     options.fitted_policy_ids.end());
  for (const auto& policy : test_policies) {
    if (fitted.count(policy.id)) {
      fail(ErrorCode::kSplitViolation, "test policy '" + policy.id + "' was used for fitting");
    }
  }
  if (test_policies.empty()) fail(ErrorCode::kInvalidArgument, "no test policies");
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    fail(ErrorCode::kInvalidArgument, "delta must be positive and finite");
  }

  EquivalenceReport report;
  report.mode = resolve_mode(options.mode, truth, &model, domain.horizon);
  report.delta = delta;
  report.replicates_per_policy = report.mode == ValidationMode::kSampled ? options.reps : 0;
  report.seeds["master"] = seed;
  report.per_policy = policy_discrepancies(truth, model, test_policies, domain, seed, report.mode,
                                           options.reps, &report.seeds);
  report.sup_value = 0.0;
  for (const auto& row : report.per_policy) report.sup_value = std::max(report.sup_value, row.value);
  report.pass = report.sup_value <= delta;
  return report;
}

CalibrationResult calibrate_delta(const BehaviorSource& truth,
                                  std::span<const PerturbationPolicy> test_policies,
                                  const ExperimentalDomain& domain, int reps, int n_calibration,
                                  double quantile, std::uint64_t seed, ValidationMode mode) {
  if (!(quantile > 0.5 && quantile < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "quantile must lie in (0.5, 1)");
  }
  if (n_calibration < 1) fail(ErrorCode::kInvalidArgument, "n_calibration must be >= 1");
  if (resolve_mode(mode, truth, nullptr, domain.horizon) == ValidationMode::kExact) {
    fail(ErrorCode::kCalibrationUnnecessary, "exact-law comparisons need no calibration");
  }
  if (reps < kMinSampledReplicates) {
    fail(ErrorCode::kInsufficientReplicates,
         "calibration needs at least " + std::to_string(kMinSampledReplicates) + " replicates");
  }
  if (test_policies.empty()) fail(ErrorCode::kInvalidArgument, "no test policies");

  std::vector<PerturbationSequence> sequences;
  for (const auto& policy : test_policies) {
    sequences.push_back(
        generate_for_domain(policy, domain, domain.horizon, sequence_seed(seed, policy.id)));
  }
  CalibrationResult result;
  result.null_sups.resize(n_calibration);
  parallel_for(static_cast<std::size_t>(n_calibration), [&](std::size_t c) {
    double sup = 0.0;
    for (std::size_t i = 0; i < sequences.size(); ++i) {
      const auto& id = test_policies[i].id;
      const auto xs = sample_set(truth.sampler, sequences[i], reps,
                                 derive_seed(seed, "calibration_a:" + id, c), domain.output_space);
      const auto ys = sample_set(truth.sampler, sequences[i], reps,
                                 derive_seed(seed, "calibration_b:" + id, c), domain.output_space);
      sup = std::max(sup, sampled_discrepancy(xs, ys, domain.output_space).value);
    }
    result.null_sups[c] = sup;
  });
  std::vector<double> sorted = result.null_sups;
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(std::ceil(quantile * n_calibration));
  result.delta = sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
  return result;
}

SystemParams random_system(ModelClass cls, int latent_dim, const ExperimentalDomain& domain,
                           std::uint64_t seed) {
  if (latent_dim < 1) fail(ErrorCode::kInvalidArgument, "latent dimension must be >= 1");
  if (cls == ModelClass::kLgss) {
    return random_lgss(latent_dim, domain.input_dim, domain.output_dim, seed);
  }
  if (domain.input_bounds.size() != 1) {
    fail(ErrorCode::kDimensionMismatch, "IO-HMM domains have one input channel");
  }
  const int n_inputs = static_cast<int>(std::floor(domain.input_bounds[0].hi)) + 1;
  return random_iohmm(latent_dim, n_inputs, domain.output_space.alphabet_size, seed);
}

IntrinsicErrorResult intrinsic_error(ModelClass cls, const BehaviorSource& truth,
                                     const Dataset& training,
                                     std::span<const PerturbationPolicy> test_policies,
                                     const ExperimentalDomain& domain, std::uint64_t seed,
                                     const IntrinsicErrorOptions& options) {
  if (test_policies.empty()) fail(ErrorCode::kInvalidArgument, "no test policies");
  std::vector<SystemParams> thetas;
  IntrinsicErrorResult result;
  if (!options.candidates.empty()) {
    thetas = options.candidates;
  } else {
    if (options.fit_budget < 1) fail(ErrorCode::kInvalidArgument, "fit_budget must be >= 1");
    for (int k = 0; k < options.fit_budget; ++k) {
      const auto init = random_system(cls, options.latent_dim, domain,
                                      derive_seed(seed, "init", static_cast<std::uint64_t>(k)));
      result.fits.push_back(fit(init, training, options.loss, options.fit));
      thetas.push_back(result.fits.back().theta_hat);
    }
  }
  result.epsilon_star_estimate = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    const auto rows = policy_discrepancies(truth, thetas[k], test_policies, domain, seed,
                                           options.mode, options.validation_reps);
    double sup = 0.0;
    for (const auto& row : rows) sup = std::max(sup, row.value);
    result.start_sups.push_back(sup);
    if (sup < result.epsilon_star_estimate) {
      result.epsilon_star_estimate = sup;
      result.best_theta = thetas[k];
    }
  }
  return result;
}

IntrinsicErrorResult intrinsic_error(ModelClass cls, const SystemParams& truth,
                                     std::span<const PerturbationPolicy> train_policies,
                                     std::span<const PerturbationPolicy> test_policies,
                                     const ExperimentalDomain& domain, std::uint64_t seed,
                                     const IntrinsicErrorOptions& options) {
  Dataset training;
  if (options.candidates.empty()) {
    training = collect_dataset(truth, EnvironmentSpec{}, train_policies, options.train_reps,
                               domain.horizon, domain, derive_seed(seed, "training"));
  }
  return intrinsic_error(cls, BehaviorSource::from_params(truth), training, test_policies,
                         domain, seed, options);
}

}  // namespace persid
