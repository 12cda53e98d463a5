#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "persid/domain.hpp"

namespace persid {

enum class PolicyKind {
  kConstant,
  kStep,
  kSinusoid,
  kChirp,
  kPrbs,
  kUniformRandom,
  kAdaptiveFeedback,
};

std::string_view policy_kind_name(PolicyKind kind);
/// Throws ConfigError for unknown names.
PolicyKind parse_policy_kind(std::string_view name);

/// A perturbation policy. Only the fields used by `kind` are meaningful;
/// all channels share the scalar amplitude.
struct PerturbationPolicy {
  std::string id;
  PolicyKind kind = PolicyKind::kConstant;
  double amplitude = 0.0;
  int step_time = 0;           // step
  double frequency = 0.0;      // sinusoid
  double f0 = 0.0, f1 = 0.0;   // chirp
  double switch_prob = 0.5;    // prbs
  Eigen::MatrixXd gain;        // adaptive_feedback: m x p
  Eigen::VectorXd setpoint;    // adaptive_feedback: length p

  bool is_adaptive() const { return kind == PolicyKind::kAdaptiveFeedback; }
};

/// Throws InvalidArgument when a kind-specific parameter is out of range.
void validate_policy(const PerturbationPolicy& policy);

/// Open-loop input sequence of length `horizon` with one column per bound.
/// A pure function of its arguments; every value is clamped into `bounds`.
PerturbationSequence generate_open_loop(const PerturbationPolicy& policy, int horizon,
                                        std::span<const Interval> bounds,
                                        std::uint64_t seed);

/// u_t = clamp(K (y* - y_t)) where y_t is the last row of `history`.
Eigen::VectorXd adaptive_step(const PerturbationPolicy& policy, int t,
                              const Eigen::MatrixXd& history,
                              std::span<const Interval> bounds);

}  // namespace persid
