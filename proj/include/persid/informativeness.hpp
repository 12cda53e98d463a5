#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "persid/model_class.hpp"
#include "persid/policies.hpp"

namespace persid {

/// Per-policy discrepancies for one unordered model pair (i < j).
struct PairRow {
  std::size_t i = 0;
  std::size_t j = 0;
  std::vector<double> values;  // one per policy, in policy order
};

/// Delta(Pi) = min over pairs of max over policies of the discrepancy.
struct DiscriminationReport {
  double delta_value = 0.0;
  std::size_t witness_i = 0;
  std::size_t witness_j = 1;
  std::string witness_policy;
  std::vector<std::string> policy_ids;
  std::vector<PairRow> full_matrix;  // pairs in lexicographic order
  bool exact = true;
  bool informative = false;
};

/// Delta above this counts as informative; exact-law noise sits far below.
inline constexpr double kInformativeThreshold = 1e-10;

struct DiscriminationOptions {
  /// Replicates per model and policy when an exact law is unavailable.
  int reps = 100;
};

/// Models must share a class. Uses exact laws when every model admits one,
/// else energy distance / MMD over samples seeded from `seed`. Ties in the
/// inf and sup go to the first index.
DiscriminationReport discriminatory_power(std::span<const SystemParams> models,
                                          std::span<const PerturbationPolicy> policies,
                                          const ExperimentalDomain& domain, std::uint64_t seed,
                                          const DiscriminationOptions& options = {});

struct FamilySelection {
  std::size_t index = 0;
  DiscriminationReport report;
  std::vector<double> family_deltas;
};

/// argmax over families of Delta, first index on ties.
FamilySelection select_optimal_family(
    std::span<const SystemParams> models,
    std::span<const std::vector<PerturbationPolicy>> candidate_families,
    const ExperimentalDomain& domain, std::uint64_t seed,
    const DiscriminationOptions& options = {});

struct AdaptiveDesign {
  std::vector<std::string> policy_ids;  // chosen order
  bool all_separated = false;
  /// True when some pair stays unseparated by the whole chosen set.
  bool inseparable = false;
};

/// Greedy design: repeatedly choose the unused pool policy maximizing the
/// minimum discrepancy over pairs not yet separated; a pair is separated once
/// a chosen policy's discrepancy for it exceeds tau. Stops early when every
/// pair is separated. When no remaining policy separates anything, the
/// remaining budget is filled in pool order.
AdaptiveDesign greedy_adaptive_design(std::span<const SystemParams> models,
                                      std::span<const PerturbationPolicy> pool, int k,
                                      const ExperimentalDomain& domain, std::uint64_t seed,
                                      double tau, const DiscriminationOptions& options = {});

}  // namespace persid
