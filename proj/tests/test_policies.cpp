#include <gtest/gtest.h>

#include <cmath>

#include "persid/error.hpp"
#include "persid/policies.hpp"

namespace persid {
namespace {

const std::vector<Interval> kUnit{{-1.0, 1.0}};

PerturbationPolicy make(PolicyKind kind, double a) {
  PerturbationPolicy p;
  p.id = std::string(policy_kind_name(kind));
  p.kind = kind;
  p.amplitude = a;
  return p;
}

}  // namespace

TEST(OpenLoop, Constant) {
  const auto u = generate_open_loop(make(PolicyKind::kConstant, 0.5), 3, kUnit, 1);
  ASSERT_EQ(u.values.rows(), 3);
  ASSERT_EQ(u.values.cols(), 1);
  for (int t = 0; t < 3; ++t) EXPECT_EQ(u.values(t, 0), 0.5);
}

TEST(OpenLoop, SinusoidQuarterPeriod) {
  auto p = make(PolicyKind::kSinusoid, 1.0);
  p.frequency = 0.25;
  const auto u = generate_open_loop(p, 4, kUnit, 0);
  EXPECT_NEAR(u.values(1, 0), 1.0, 1e-15);
  EXPECT_NEAR(u.values(0, 0), 0.0, 1e-15);
}

TEST(OpenLoop, StepSwitchesAtStepTime) {
  auto p = make(PolicyKind::kStep, 0.7);
  p.step_time = 2;
  const auto u = generate_open_loop(p, 4, kUnit, 0);
  EXPECT_EQ(u.values(1, 0), 0.0);
  EXPECT_EQ(u.values(2, 0), 0.7);
  EXPECT_EQ(u.values(3, 0), 0.7);
}

TEST(OpenLoop, ChirpFormula) {
  auto p = make(PolicyKind::kChirp, 0.8);
  p.f0 = 0.05;
  p.f1 = 0.3;
  const int T = 20;
  const auto u = generate_open_loop(p, T, kUnit, 0);
  for (int t = 0; t < T; ++t) {
    const double f = p.f0 + (p.f1 - p.f0) * t / (2.0 * T);
    EXPECT_NEAR(u.values(t, 0), 0.8 * std::sin(2.0 * M_PI * f * t), 1e-12);
  }
}

TEST(OpenLoop, PrbsIsReproducible) {
  auto p = make(PolicyKind::kPrbs, 1.0);
  p.switch_prob = 0.3;
  const auto a = generate_open_loop(p, 50, kUnit, 42);
  const auto b = generate_open_loop(p, 50, kUnit, 42);
  EXPECT_EQ(a.values, b.values);
  for (int t = 0; t < 50; ++t) EXPECT_EQ(std::abs(a.values(t, 0)), 1.0);
}

TEST(OpenLoop, PrbsFlipCountMatchesBinomial) {
  auto p = make(PolicyKind::kPrbs, 1.0);
  p.switch_prob = 0.3;
  const int T = 40, runs = 2000;
  double total = 0.0;
  for (int s = 0; s < runs; ++s) {
    const auto u = generate_open_loop(p, T, kUnit, static_cast<std::uint64_t>(s));
    for (int t = 1; t < T; ++t) total += u.values(t, 0) != u.values(t - 1, 0);
  }
  const double mean = total / runs;
  const double expected = p.switch_prob * (T - 1);
  const double sd = std::sqrt((T - 1) * p.switch_prob * (1 - p.switch_prob) / runs);
  EXPECT_LT(std::abs(mean - expected), 5 * sd);
}

TEST(OpenLoop, EveryKindStaysInBounds) {
  const std::vector<Interval> box{{-0.3, 0.2}, {0.0, 0.5}};
  for (auto kind : {PolicyKind::kConstant, PolicyKind::kStep, PolicyKind::kSinusoid,
                    PolicyKind::kChirp, PolicyKind::kPrbs, PolicyKind::kUniformRandom}) {
    auto p = make(kind, 3.0);
    p.frequency = 0.11;
    p.f0 = 0.01;
    p.f1 = 0.4;
    p.step_time = 3;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto u = generate_open_loop(p, 30, box, seed);
      ASSERT_EQ(u.values.cols(), 2);
      EXPECT_TRUE(within_bounds(u, box)) << policy_kind_name(kind);
    }
  }
}

TEST(OpenLoop, UniformRandomCoversInterval) {
  const std::vector<Interval> box{{2.0, 3.0}};
  const auto u = generate_open_loop(make(PolicyKind::kUniformRandom, 0.0), 500, box, 9);
  EXPECT_LT(u.values.minCoeff(), 2.1);
  EXPECT_GT(u.values.maxCoeff(), 2.9);
}

TEST(OpenLoop, Errors) {
  PerturbationPolicy adaptive;
  adaptive.kind = PolicyKind::kAdaptiveFeedback;
  adaptive.gain = Eigen::MatrixXd::Ones(1, 1);
  adaptive.setpoint = Eigen::VectorXd::Zero(1);
  try {
    generate_open_loop(adaptive, 5, kUnit, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRequiresFeedback);
  }
  try {
    generate_open_loop(make(PolicyKind::kConstant, 1.0), 0, kUnit, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidHorizon);
  }
}

TEST(PolicyKind, ParseRoundTripAndUnknown) {
  for (auto kind : {PolicyKind::kConstant, PolicyKind::kStep, PolicyKind::kSinusoid,
                    PolicyKind::kChirp, PolicyKind::kPrbs, PolicyKind::kUniformRandom,
                    PolicyKind::kAdaptiveFeedback}) {
    EXPECT_EQ(parse_policy_kind(policy_kind_name(kind)), kind);
  }
  EXPECT_THROW(parse_policy_kind("lfsr"), Error);
}

TEST(ValidatePolicy, RangeChecks) {
  auto prbs = make(PolicyKind::kPrbs, 1.0);
  prbs.switch_prob = 1.0;
  EXPECT_THROW(validate_policy(prbs), Error);
  auto sine = make(PolicyKind::kSinusoid, 1.0);
  sine.frequency = 0.0;
  EXPECT_THROW(validate_policy(sine), Error);
}

namespace {
PerturbationPolicy feedback(double k, double target) {
  PerturbationPolicy p;
  p.kind = PolicyKind::kAdaptiveFeedback;
  p.gain = Eigen::MatrixXd::Constant(1, 1, k);
  p.setpoint = Eigen::VectorXd::Constant(1, target);
  return p;
}
}  // namespace

TEST(AdaptiveStep, ZeroError) {
  const Eigen::MatrixXd history = Eigen::MatrixXd::Zero(1, 1);
  EXPECT_EQ(adaptive_step(feedback(1.0, 0.0), 0, history, kUnit)(0), 0.0);
}

TEST(AdaptiveStep, ClampsToBounds) {
  const Eigen::MatrixXd history = Eigen::MatrixXd::Zero(1, 1);
  EXPECT_EQ(adaptive_step(feedback(2.0, 1.0), 0, history, kUnit)(0), 1.0);
}

TEST(AdaptiveStep, UsesLatestRow) {
  Eigen::MatrixXd history(2, 1);
  history << 5.0, 0.25;
  EXPECT_DOUBLE_EQ(adaptive_step(feedback(1.0, 0.5), 1, history, kUnit)(0), 0.25);
}

TEST(AdaptiveStep, GainShapeMismatch) {
  auto p = feedback(1.0, 0.0);
  p.gain = Eigen::MatrixXd::Ones(1, 2);
  p.setpoint = Eigen::VectorXd::Zero(2);
  try {
    adaptive_step(p, 0, Eigen::MatrixXd::Zero(1, 1), kUnit);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

}  // namespace persid
