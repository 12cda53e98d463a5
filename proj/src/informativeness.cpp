#include "persid/informativeness.hpp"

#include <algorithm>
#include <limits>

#include "persid/error.hpp"
#include "persid/parallel.hpp"
#include "persid/runner.hpp"
#include "persid/seeding.hpp"

namespace persid {
namespace {

void check_models(std::span<const SystemParams> models) {
  if (models.size() < 2) {
    fail(ErrorCode::kVacuousInf, "the inf over distinct model pairs needs at least two models");
  }
  const auto cls = model_class_of(models[0]);
  for (const auto& m : models) {
    validate(m);
    if (model_class_of(m) != cls) {
      fail(ErrorCode::kInvalidArgument, "models must share one class");
    }
  }
}

struct PairMatrix {
  std::vector<PairRow> rows;
  bool exact = true;
};

PairMatrix pair_matrix(std::span<const SystemParams> models,
                       std::span<const PerturbationPolicy> policies,
                       const ExperimentalDomain& domain, std::uint64_t seed, int reps) {
  bool exact = true;
  for (const auto& m : models) exact = exact && has_exact_law(m, domain.horizon);

  std::vector<PerturbationSequence> sequences;
  for (const auto& policy : policies) {
    sequences.push_back(
        generate_for_domain(policy, domain, domain.horizon, sequence_seed(seed, policy.id)));
  }

  // Sampled mode draws each (model, policy) sample set once and reuses it
  // across pairs.
  std::vector<Eigen::MatrixXd> samples;
  if (!exact) {
    samples.resize(models.size() * policies.size());
    parallel_for(samples.size(), [&](std::size_t idx) {
      const std::size_t mi = idx / policies.size();
      const std::size_t pi = idx % policies.size();
      samples[idx] = sample_set(make_sampler(models[mi]), sequences[pi], reps,
                                derive_seed(seed, "discrimination:" + policies[pi].id, mi),
                                domain.output_space);
    });
  }

  PairMatrix out;
  out.exact = exact;
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (std::size_t j = i + 1; j < models.size(); ++j) {
      out.rows.push_back({i, j, std::vector<double>(policies.size(), 0.0)});
    }
  }
  const std::size_t cells = out.rows.size() * policies.size();
  parallel_for(cells, [&](std::size_t idx) {
    auto& row = out.rows[idx / policies.size()];
    const std::size_t pi = idx % policies.size();
    if (exact) {
      row.values[pi] = exact_discrepancy(models[row.i], models[row.j], sequences[pi]).value;
    } else {
      row.values[pi] = sampled_discrepancy(samples[row.i * policies.size() + pi],
                                           samples[row.j * policies.size() + pi],
                                           domain.output_space)
                           .value;
    }
  });
  return out;
}

DiscriminationReport summarize(PairMatrix matrix, std::span<const PerturbationPolicy> policies) {
  DiscriminationReport report;
  report.exact = matrix.exact;
  for (const auto& p : policies) report.policy_ids.push_back(p.id);
  report.delta_value = std::numeric_limits<double>::infinity();
  for (const auto& row : matrix.rows) {
    std::size_t arg = 0;
    for (std::size_t k = 1; k < row.values.size(); ++k) {
      if (row.values[k] > row.values[arg]) arg = k;
    }
    if (row.values[arg] < report.delta_value) {
      report.delta_value = row.values[arg];
      report.witness_i = row.i;
      report.witness_j = row.j;
      report.witness_policy = policies[arg].id;
    }
  }
  report.full_matrix = std::move(matrix.rows);
  report.informative = report.delta_value > kInformativeThreshold;
  return report;
}

}  // namespace

DiscriminationReport discriminatory_power(std::span<const SystemParams> models,
                                          std::span<const PerturbationPolicy> policies,
                                          const ExperimentalDomain& domain, std::uint64_t seed,
                                          const DiscriminationOptions& options) {
  check_models(models);
  if (policies.empty()) fail(ErrorCode::kInvalidArgument, "no policies");
  return summarize(pair_matrix(models, policies, domain, seed, options.reps), policies);
}

FamilySelection select_optimal_family(
    std::span<const SystemParams> models,
    std::span<const std::vector<PerturbationPolicy>> candidate_families,
    const ExperimentalDomain& domain, std::uint64_t seed, const DiscriminationOptions& options) {
  if (candidate_families.empty()) fail(ErrorCode::kInvalidArgument, "no candidate families");
  FamilySelection best;
  for (std::size_t f = 0; f < candidate_families.size(); ++f) {
    auto report = discriminatory_power(models, candidate_families[f], domain, seed, options);
    best.family_deltas.push_back(report.delta_value);
    if (f == 0 || report.delta_value > best.report.delta_value) {
      best.index = f;
      best.report = std::move(report);
    }
  }
  return best;
}

AdaptiveDesign greedy_adaptive_design(std::span<const SystemParams> models,
                                      std::span<const PerturbationPolicy> pool, int k,
                                      const ExperimentalDomain& domain, std::uint64_t seed,
                                      double tau, const DiscriminationOptions& options) {
  if (k < 0) fail(ErrorCode::kInvalidArgument, "budget must be nonnegative");
  if (static_cast<std::size_t>(k) > pool.size()) {
    fail(ErrorCode::kBudgetExceedsPool, "budget " + std::to_string(k) + " exceeds pool of " +
                                            std::to_string(pool.size()));
  }
  if (!(tau >= 0.0)) fail(ErrorCode::kInvalidArgument, "tau must be nonnegative");
  check_models(models);
  const auto matrix = pair_matrix(models, pool, domain, seed, options.reps);

  AdaptiveDesign design;
  std::vector<bool> used(pool.size(), false);
  std::vector<bool> separated(matrix.rows.size(), false);
  const auto all_done = [&] {
    return std::all_of(separated.begin(), separated.end(), [](bool s) { return s; });
  };
  while (design.policy_ids.size() < static_cast<std::size_t>(k) && !all_done()) {
    std::optional<std::size_t> pick;
    double pick_score = -1.0;
    for (std::size_t p = 0; p < pool.size(); ++p) {
      if (used[p]) continue;
      double score = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
        if (!separated[r]) score = std::min(score, matrix.rows[r].values[p]);
      }
      if (score > pick_score) {
        pick_score = score;
        pick = p;
      }
    }
    bool progress = false;
    for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
      if (!separated[r] && matrix.rows[r].values[*pick] > tau) {
        separated[r] = true;
        progress = true;
      }
    }
    if (!progress) {
      // Max-min is 0 whenever one pair cannot be split; fall back to the
      // policy separating the most remaining pairs.
      std::size_t best_count = 0;
      for (std::size_t p = 0; p < pool.size(); ++p) {
        if (used[p]) continue;
        std::size_t count = 0;
        for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
          if (!separated[r] && matrix.rows[r].values[p] > tau) ++count;
        }
        if (count > best_count) {
          best_count = count;
          pick = p;
        }
      }
      for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
        if (!separated[r] && matrix.rows[r].values[*pick] > tau) separated[r] = true;
      }
      if (best_count == 0) break;
    }
    used[*pick] = true;
    design.policy_ids.push_back(pool[*pick].id);
  }
  design.all_separated = all_done();
  design.inseparable = !design.all_separated;
  for (std::size_t p = 0; p < pool.size() && design.policy_ids.size() < static_cast<std::size_t>(k);
       ++p) {
    if (!used[p] && !design.all_separated) {
      used[p] = true;
      design.policy_ids.push_back(pool[p].id);
    }
  }
  return design;
}

}  // namespace persid
