#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "persid/domain.hpp"
#include "persid/model_class.hpp"
#include "persid/policies.hpp"

namespace persid {

enum class EnvironmentKind { kPassthrough, kLinear };

/// The environment between policy and participant. Passthrough forwards the
/// policy output unchanged; linear keeps a state s with
///   s_{t+1} = F s_t + G u_t,   stimulus_t = clamp(H s_t),  s_0 = 0.
struct EnvironmentSpec {
  EnvironmentKind kind = EnvironmentKind::kPassthrough;
  Eigen::MatrixXd F;  // k x k
  Eigen::MatrixXd G;  // k x m
  Eigen::MatrixXd H;  // m x k
};

/// Open-loop sequence for a domain. Discrete-output domains drive IO-HMMs,
/// whose inputs are symbols, so their values are rounded to integers.
PerturbationSequence generate_for_domain(const PerturbationPolicy& policy,
                                         const ExperimentalDomain& domain, int horizon,
                                         std::uint64_t seed);

struct ClosedLoopSeeds {
  std::uint64_t policy = 0;
  std::uint64_t system = 0;
};

/// Sub-seeds used by run_closed_loop(..., seed): derive_seed(seed, "policy")
/// and derive_seed(seed, "system").
ClosedLoopSeeds closed_loop_seeds(std::uint64_t seed);

/// Emulates policy -> environment -> participant for T steps. The recorded
/// inputs are the stimuli actually applied.
TrajectoryRecord run_closed_loop(const SystemParams& truth, const EnvironmentSpec& environment,
                                 const PerturbationPolicy& policy,
                                 const ExperimentalDomain& domain, int horizon,
                                 const ClosedLoopSeeds& seeds);

TrajectoryRecord run_closed_loop(const SystemParams& truth, const EnvironmentSpec& environment,
                                 const PerturbationPolicy& policy,
                                 const ExperimentalDomain& domain, int horizon,
                                 std::uint64_t seed);

/// Sequence seed shared by every replicate of a policy.
std::uint64_t sequence_seed(std::uint64_t seed, std::string_view policy_id);

/// |policies| * reps records in (policy, rep) order. Record r = i * reps + k
/// uses the policy seed sequence_seed(seed, id) and the system seed
/// derive_seed(seed, "record", r), so open-loop replicates share inputs.
Dataset collect_dataset(const SystemParams& truth, const EnvironmentSpec& environment,
                        std::span<const PerturbationPolicy> policies, int reps, int horizon,
                        const ExperimentalDomain& domain, std::uint64_t seed);

}  // namespace persid
