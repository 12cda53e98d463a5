#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "persid/equivalence.hpp"
#include "persid/reconstruction.hpp"
#include "persid/runner.hpp"
#include "persid/serialization.hpp"

namespace persid {

struct ModelClassSpec {
  ModelClass cls = ModelClass::kLgss;
  int latent_dim = 1;
  int fit_budget = 1;
  FitOptions fit;
  /// Replaces the random initialisation of start 0.
  std::optional<SystemParams> init;
};

struct SplitSpec {
  std::vector<std::string> train;
  std::vector<std::string> test;
  /// Used instead of explicit lists when set.
  std::optional<double> test_fraction;
  int reps_per_policy = 20;
};

struct ValidationSpec {
  ValidationMode mode = ValidationMode::kSampled;
  int reps = 100;
  int n_calibration = 200;
  double quantile = 0.95;
  /// Skips calibration when set.
  std::optional<double> delta;
};

struct InformativenessSpec {
  std::vector<SystemParams> candidates;
  /// Candidate families as lists of policy ids; defaults to one family
  /// holding every policy.
  std::vector<std::vector<std::string>> families;
  /// Greedy design budget; 0 skips the design.
  int budget = 0;
  /// Separation threshold; defaults to the calibrated delta.
  std::optional<double> tau;
  int reps = 100;
};

struct ConsistencySpec {
  std::vector<std::size_t> sizes;
};

/// A parsed scenario document. `raw` keeps the source for the digest.
struct Scenario {
  std::uint64_t seed = 0;
  ExperimentalDomain domain;
  std::vector<PerturbationPolicy> policies;
  SystemParams truth;
  EnvironmentSpec environment;
  ModelClassSpec model;
  SplitSpec split;
  LossConfig loss;
  ValidationSpec validation;
  std::optional<InformativenessSpec> informativeness;
  std::optional<ConsistencySpec> consistency;
  Json raw;

  const PerturbationPolicy& policy(const std::string& id) const;
  std::vector<PerturbationPolicy> policies_for(const std::vector<std::string>& ids) const;
};

/// Throws ConfigError for missing or malformed sections.
Scenario parse_scenario(const Json& j);
/// ConfigError naming the path when the file is missing or not JSON.
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace persid
