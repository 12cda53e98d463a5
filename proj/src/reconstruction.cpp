#include "persid/reconstruction.hpp"

#include <algorithm>

#include "persid/error.hpp"
#include "persid/runner.hpp"
#include "persid/seeding.hpp"

namespace persid {
namespace {

OutputSpace output_space_of(const SystemParams& theta) {
  if (const auto* h = std::get_if<IoHmmParams>(&theta)) {
    return {OutputKind::kDiscrete, h->n_obs};
  }
  return {OutputKind::kContinuous, 0};
}

void check_class_matches(const SystemParams& theta, const Dataset& data) {
  if (data.empty()) return;
  const bool discrete = data.records.front().is_discrete();
  if (discrete != (model_class_of(theta) == ModelClass::kIoHmm)) {
    fail(ErrorCode::kInvalidArgument, "model class does not match the dataset's output type");
  }
}

}  // namespace

void validate(const LossConfig& config) {
  if (!(config.lambda >= 0.0)) fail(ErrorCode::kInvalidArgument, "lambda must be >= 0");
}

double empirical_loss(const SystemParams& theta, const Dataset& data, const LossConfig& config,
                      std::uint64_t seed) {
  validate(config);
  if (data.empty()) fail(ErrorCode::kEmptyDataset, "loss over an empty dataset");
  check_class_matches(theta, data);
  const double penalty =
      config.regularizer == Regularizer::kRidge ? config.lambda * ridge_penalty(theta) : 0.0;

  if (config.mode == LossMode::kNll) {
    return -dataset_loglik(theta, data) / static_cast<double>(data.size()) + penalty;
  }

  const OutputSpace space = output_space_of(theta);
  const auto sampler = make_sampler(theta);
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t g = 0; g < data.groups.size(); ++g) {
    const auto& members = data.groups[g];
    if (members.size() < 2) continue;
    std::vector<TrajectoryRecord> group;
    group.reserve(members.size());
    for (auto i : members) group.push_back(data.records[i]);
    const Eigen::MatrixXd empirical = stack_outputs(group, space);
    const Eigen::MatrixXd model =
        sample_set(sampler, group.front().inputs, static_cast<int>(members.size()),
                   derive_seed(seed, "loss_group", g), space);
    switch (config.distributional_kind) {
      case DiscrepancyKind::kEnergy:
        total += energy_distance(empirical, model).value;
        break;
      case DiscrepancyKind::kMmd:
        total += mmd2_biased(empirical, model).value;
        break;
      default:
        fail(ErrorCode::kInvalidArgument, "distributional loss needs a sample-based discrepancy");
    }
    ++used;
  }
  if (used == 0) {
    fail(ErrorCode::kSingletonGroups, "every replicate group is a singleton; use nll mode");
  }
  return total / static_cast<double>(used) + penalty;
}

FitReport fit(const SystemParams& init, const Dataset& data, const LossConfig& config,
              const FitOptions& options) {
  validate(config);
  if (config.mode != LossMode::kNll) {
    fail(ErrorCode::kInvalidArgument, "fitting supports the nll loss only");
  }
  if (data.empty()) fail(ErrorCode::kEmptyDataset, "fit needs at least one record");
  check_class_matches(init, data);
  const double n = static_cast<double>(data.size());
  const bool ridge = config.regularizer == Regularizer::kRidge && config.lambda > 0.0;

  FitReport report;
  report.n_records = data.size();
  if (const auto* lgss_init = std::get_if<LgssParams>(&init)) {
    EmOptions em;
    em.max_iter = options.max_iter;
    em.tol = options.tol;
    em.fixed = options.fixed;
    std::vector<double> penalties{ridge ? config.lambda * ridge_penalty(init) : 0.0};
    if (ridge) {
      // Shrinkage is not an exact M-step, so the likelihood may dip.
      em.check_monotone = false;
      const double shrink = 1.0 / (1.0 + config.lambda * options.prox_step);
      em.post_m_step = [&](LgssParams& p) {
        if (!options.fixed.A) p.A *= shrink;
        if (!options.fixed.B) p.B *= shrink;
        if (!options.fixed.C) p.C *= shrink;
        penalties.push_back(config.lambda * ridge_penalty(SystemParams(p)));
      };
    }
    auto result = em_fit(*lgss_init, data, em);
    for (std::size_t k = 0; k < result.loglik_trace.size(); ++k) {
      report.trace.push_back(-result.loglik_trace[k] / n + (ridge ? penalties[k] : 0.0));
    }
    report.theta_hat = std::move(result.params);
    report.iterations = result.iterations;
    report.converged = result.converged;
  } else {
    if (ridge) {
      fail(ErrorCode::kInvalidArgument, "ridge shrinkage is undefined for stochastic tables");
    }
    BaumWelchOptions bw;
    bw.max_iter = options.max_iter;
    bw.tol = options.tol;
    auto result = baum_welch_fit(std::get<IoHmmParams>(init), data, bw);
    for (double ll : result.loglik_trace) report.trace.push_back(-ll / n);
    report.theta_hat = std::move(result.params);
    report.iterations = result.iterations;
    report.converged = result.converged;
  }
  report.final_loss = report.trace.back();
  return report;
}

std::vector<ConsistencyRow> consistency_probe(const SystemParams& truth,
                                              const SystemParams& init,
                                              std::span<const PerturbationPolicy> train_policies,
                                              std::span<const PerturbationPolicy> probe_policies,
                                              const ExperimentalDomain& domain,
                                              std::span<const std::size_t> sizes,
                                              std::uint64_t seed, const FitOptions& options) {
  if (train_policies.empty() || probe_policies.empty()) {
    fail(ErrorCode::kInvalidArgument, "consistency probe needs training and probe policies");
  }
  const std::size_t largest = sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
  const EnvironmentSpec passthrough;
  std::vector<TrajectoryRecord> pool(largest);
  for (std::size_t i = 0; i < largest; ++i) {
    const auto& policy = train_policies[i % train_policies.size()];
    pool[i] = run_closed_loop(truth, passthrough, policy, domain, domain.horizon,
                              ClosedLoopSeeds{sequence_seed(seed, policy.id),
                                              derive_seed(seed, "consistency_record", i)});
  }
  std::vector<PerturbationSequence> probes;
  for (const auto& policy : probe_policies) {
    probes.push_back(generate_for_domain(policy, domain, domain.horizon,
                                         sequence_seed(seed, policy.id)));
  }

  std::vector<ConsistencyRow> table;
  for (std::size_t n : sizes) {
    if (n == 0) fail(ErrorCode::kEmptyDataset, "consistency probe with N = 0");
    auto data = group_dataset({pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n)});
    const auto report = fit(init, data, LossConfig{}, options);
    double sup = 0.0;
    for (const auto& u : probes) {
      sup = std::max(sup, exact_discrepancy(report.theta_hat, truth, u).value);
    }
    table.push_back({n, sup});
  }
  return table;
}

}  // namespace persid
