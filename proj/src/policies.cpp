#include "persid/policies.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "persid/error.hpp"
#include "persid/seeding.hpp"

namespace persid {

std::string_view policy_kind_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kConstant: return "constant";
    case PolicyKind::kStep: return "step";
    case PolicyKind::kSinusoid: return "sinusoid";
    case PolicyKind::kChirp: return "chirp";
    case PolicyKind::kPrbs: return "prbs";
    case PolicyKind::kUniformRandom: return "uniform_random";
    case PolicyKind::kAdaptiveFeedback: return "adaptive_feedback";
  }
  return "unknown";
}

PolicyKind parse_policy_kind(std::string_view name) {
  for (auto kind : {PolicyKind::kConstant, PolicyKind::kStep, PolicyKind::kSinusoid,
                    PolicyKind::kChirp, PolicyKind::kPrbs, PolicyKind::kUniformRandom,
                    PolicyKind::kAdaptiveFeedback}) {
    if (policy_kind_name(kind) == name) return kind;
  }
  fail(ErrorCode::kConfigError, "unknown policy kind '" + std::string(name) + "'");
}

void validate_policy(const PerturbationPolicy& policy) {
  const auto bad = [&](const std::string& what) {
    fail(ErrorCode::kInvalidArgument, "policy '" + policy.id + "': " + what);
  };
  switch (policy.kind) {
    case PolicyKind::kPrbs:
      if (!(policy.switch_prob > 0.0 && policy.switch_prob < 1.0)) bad("switch_prob must lie in (0,1)");
      break;
    case PolicyKind::kSinusoid:
      if (!(policy.frequency > 0.0)) bad("frequency must be positive");
      break;
    case PolicyKind::kChirp:
      if (!(policy.f0 > 0.0 && policy.f1 > 0.0)) bad("f0 and f1 must be positive");
      break;
    case PolicyKind::kAdaptiveFeedback:
      if (policy.gain.rows() == 0 || policy.gain.cols() != policy.setpoint.size()) {
        bad("gain must be m x p with p = setpoint length");
      }
      break;
    default:
      break;
  }
}

PerturbationSequence generate_open_loop(const PerturbationPolicy& policy, int horizon,
                                        std::span<const Interval> bounds,
                                        std::uint64_t seed) {
  if (policy.is_adaptive()) {
    fail(ErrorCode::kRequiresFeedback, "policy '" + policy.id + "' needs output feedback");
  }
  if (horizon <= 0) {
    fail(ErrorCode::kInvalidHorizon, "horizon must be positive, got " + std::to_string(horizon));
  }
  validate_policy(policy);
  const int m = static_cast<int>(bounds.size());
  const double a = policy.amplitude;
  constexpr double two_pi = 2.0 * std::numbers::pi;

  PerturbationSequence seq;
  seq.policy_id = policy.id;
  seq.seed = seed;
  seq.values.resize(horizon, m);
  Rng rng = make_rng(seed);

  switch (policy.kind) {
    case PolicyKind::kConstant:
      seq.values.setConstant(a);
      break;
    case PolicyKind::kStep:
      for (int t = 0; t < horizon; ++t) seq.values.row(t).setConstant(t < policy.step_time ? 0.0 : a);
      break;
    case PolicyKind::kSinusoid:
      for (int t = 0; t < horizon; ++t) {
        seq.values.row(t).setConstant(a * std::sin(two_pi * policy.frequency * t));
      }
      break;
    case PolicyKind::kChirp:
      for (int t = 0; t < horizon; ++t) {
        const double freq = policy.f0 + (policy.f1 - policy.f0) * t / (2.0 * horizon);
        seq.values.row(t).setConstant(a * std::sin(two_pi * freq * t));
      }
      break;
    case PolicyKind::kPrbs: {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (int j = 0; j < m; ++j) {
        double level = unit(rng) < 0.5 ? -a : a;
        seq.values(0, j) = level;
        for (int t = 1; t < horizon; ++t) {
          if (unit(rng) < policy.switch_prob) level = -level;
          seq.values(t, j) = level;
        }
      }
      break;
    }
    case PolicyKind::kUniformRandom:
      for (int t = 0; t < horizon; ++t) {
        for (int j = 0; j < m; ++j) {
          std::uniform_real_distribution<double> dist(bounds[j].lo, bounds[j].hi);
          seq.values(t, j) = dist(rng);
        }
      }
      break;
    case PolicyKind::kAdaptiveFeedback:
      break;
  }
  for (int t = 0; t < horizon; ++t) {
    for (int j = 0; j < m; ++j) seq.values(t, j) = bounds[j].clamp(seq.values(t, j));
  }
  return seq;
}

Eigen::VectorXd adaptive_step(const PerturbationPolicy& policy, int /*t*/,
                              const Eigen::MatrixXd& history,
                              std::span<const Interval> bounds) {
  if (!policy.is_adaptive()) {
    fail(ErrorCode::kInvalidArgument, "policy '" + policy.id + "' is open-loop");
  }
  if (history.rows() < 1) fail(ErrorCode::kInvalidArgument, "empty output history");
  const Eigen::VectorXd y = history.bottomRows<1>().transpose();
  if (policy.gain.cols() != y.size() || policy.setpoint.size() != y.size()) {
    fail(ErrorCode::kDimensionMismatch, "gain is " + std::to_string(policy.gain.rows()) + "x" +
                                            std::to_string(policy.gain.cols()) +
                                            " but output has length " + std::to_string(y.size()));
  }
  if (policy.gain.rows() != static_cast<Eigen::Index>(bounds.size())) {
    fail(ErrorCode::kDimensionMismatch, "gain rows must equal the input dimension");
  }
  Eigen::VectorXd u = policy.gain * (policy.setpoint - y);
  for (Eigen::Index j = 0; j < u.size(); ++j) u(j) = bounds[j].clamp(u(j));
  return u;
}

}  // namespace persid
