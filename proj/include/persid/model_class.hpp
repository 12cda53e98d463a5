#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <variant>

#include "persid/discrepancy.hpp"
#include "persid/domain.hpp"
#include "persid/iohmm.hpp"
#include "persid/lgss.hpp"

namespace persid {

/// A member of one of the supported model classes.
using SystemParams = std::variant<LgssParams, IoHmmParams>;

enum class ModelClass { kLgss, kIoHmm };

std::string_view model_class_name(ModelClass cls);
ModelClass parse_model_class(std::string_view name);
ModelClass model_class_of(const SystemParams& system);

void validate(const SystemParams& system);

TrajectoryRecord simulate(const SystemParams& system, const PerturbationSequence& u,
                          std::uint64_t seed);

double dataset_loglik(const SystemParams& system, const Dataset& data);

/// Draws one trajectory for an input sequence. Lets the ground truth be a
/// black box that can only be sampled.
using TrajectorySampler =
    std::function<TrajectoryRecord(const PerturbationSequence&, std::uint64_t seed)>;

TrajectorySampler make_sampler(SystemParams system);

/// Whether the law of `system` under a horizon-T input is computable exactly.
bool has_exact_law(const SystemParams& system, int horizon);

/// Exact law-vs-law discrepancy: per-timestep Gaussian W2 for LGSS pairs,
/// total variation for IO-HMM pairs.
DiscrepancyResult exact_discrepancy(const SystemParams& a, const SystemParams& b,
                                    const PerturbationSequence& u);

/// `reps` trajectories stacked as rows. Continuous outputs are flattened
/// time-major; discrete outputs are one-hot encoded over `alphabet` symbols.
/// Replicate r uses derive_seed(seed, "replicate", r).
Eigen::MatrixXd sample_set(const TrajectorySampler& sampler, const PerturbationSequence& u,
                           int reps, std::uint64_t seed, const OutputSpace& output_space);

/// Stacks records into a sample matrix with the same encoding as sample_set.
Eigen::MatrixXd stack_outputs(std::span<const TrajectoryRecord> records,
                              const OutputSpace& output_space);

/// Energy distance for continuous samples, MMD for one-hot discrete samples.
DiscrepancyResult sampled_discrepancy(const Eigen::MatrixXd& xs, const Eigen::MatrixXd& ys,
                                      const OutputSpace& output_space);

/// Sum of squared entries of the non-covariance parameter tables.
double ridge_penalty(const SystemParams& system);

}  // namespace persid
