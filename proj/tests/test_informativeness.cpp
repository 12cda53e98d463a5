#include <gtest/gtest.h>

#include <algorithm>

#include "persid/error.hpp"
#include "persid/informativeness.hpp"
#include "test_support.hpp"

namespace persid {
namespace {

PerturbationPolicy zero_input() {
  PerturbationPolicy p;
  p.id = "zero";
  p.kind = PolicyKind::kConstant;
  p.amplitude = 0.0;
  return p;
}

PerturbationPolicy prbs(const std::string& id = "prbs", double q = 0.3) {
  PerturbationPolicy p;
  p.id = id;
  p.kind = PolicyKind::kPrbs;
  p.amplitude = 1.0;
  p.switch_prob = q;
  return p;
}

std::vector<SystemParams> b_pair(std::uint64_t seed) {
  const auto a = testing::random_instance(2, 1, 1, seed);
  auto b = a;
  b.B *= 2.0;
  return {a, b};
}

ExperimentalDomain domain(int T = 12) {
  return testing::scalar_domain(T, {"zero", "prbs", "prbs2", "sin"});
}

}  // namespace

TEST(DiscriminatoryPower, ZeroInputCannotSeparateBPair) {
  const std::vector<PerturbationPolicy> fam{zero_input()};
  const auto r = discriminatory_power(b_pair(1), fam, domain(), 1);
  EXPECT_LT(r.delta_value, 1e-10);
  EXPECT_FALSE(r.informative);
  EXPECT_TRUE(r.exact);
}

TEST(DiscriminatoryPower, PrbsSeparatesBPair) {
  const std::vector<PerturbationPolicy> fam{zero_input(), prbs()};
  const auto r = discriminatory_power(b_pair(1), fam, domain(), 1);
  EXPECT_GT(r.delta_value, 1e-3);
  EXPECT_EQ(r.witness_policy, "prbs");
  EXPECT_TRUE(r.informative);
  ASSERT_EQ(r.full_matrix.size(), 1u);
  EXPECT_LT(r.full_matrix[0].values[0], 1e-10);
}

TEST(DiscriminatoryPower, SingleModelIsVacuous) {
  const std::vector<SystemParams> one{testing::random_instance(1, 1, 1, 1)};
  const std::vector<PerturbationPolicy> fam{prbs()};
  try {
    discriminatory_power(one, fam, domain(), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kVacuousInf);
  }
}

TEST(DiscriminatoryPower, ReportInvariant) {
  std::vector<SystemParams> models;
  for (std::uint64_t s = 0; s < 4; ++s) models.push_back(testing::random_instance(2, 1, 1, s));
  const std::vector<PerturbationPolicy> fam{zero_input(), prbs(), prbs("prbs2", 0.6)};
  const auto r = discriminatory_power(models, fam, domain(), 3);
  ASSERT_EQ(r.full_matrix.size(), 6u);
  double inf = 1e300;
  for (const auto& row : r.full_matrix) {
    inf = std::min(inf, *std::max_element(row.values.begin(), row.values.end()));
  }
  EXPECT_EQ(r.delta_value, inf);
  const auto again = discriminatory_power(models, fam, domain(), 3);
  EXPECT_EQ(again.delta_value, r.delta_value);
}

TEST(DiscriminatoryPower, MonotoneInPoliciesAndModels) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    std::vector<SystemParams> models;
    for (std::uint64_t k = 0; k < 3; ++k) models.push_back(testing::random_instance(2, 1, 1, 10 * s + k));
    std::vector<PerturbationPolicy> fam{zero_input()};
    double previous = discriminatory_power(models, fam, domain(), s).delta_value;
    for (auto p : {prbs(), prbs("prbs2", 0.7)}) {
      fam.push_back(p);
      const double now = discriminatory_power(models, fam, domain(), s).delta_value;
      EXPECT_GE(now, previous - 1e-12);
      previous = now;
    }
    models.push_back(testing::random_instance(2, 1, 1, 999 + s));
    EXPECT_LE(discriminatory_power(models, fam, domain(), s).delta_value, previous + 1e-12);
  }
}

TEST(DiscriminatoryPower, SampledFallbackForLargeDiscreteLaws) {
  const std::vector<SystemParams> models{testing::random_hmm(2, 2, 3, 1), testing::random_hmm(2, 2, 3, 2)};
  PerturbationPolicy bits = prbs("bits", 0.5);
  ExperimentalDomain d = testing::scalar_domain(20, {"bits"}, 0.0, 1.0);
  d.output_space = {OutputKind::kDiscrete, 3};
  const std::vector<PerturbationPolicy> fam{bits};
  const auto r = discriminatory_power(models, fam, d, 4, {40});
  EXPECT_FALSE(r.exact);
  EXPECT_GT(r.delta_value, 0.0);
}

TEST(SelectOptimalFamily, PicksPrbsFamily) {
  const std::vector<std::vector<PerturbationPolicy>> families{{zero_input()}, {prbs()}};
  const auto sel = select_optimal_family(b_pair(2), families, domain(), 1);
  EXPECT_EQ(sel.index, 1u);
  EXPECT_EQ(sel.family_deltas.size(), 2u);
}

TEST(SelectOptimalFamily, TiesGoToFirstAndSingleton) {
  const std::vector<std::vector<PerturbationPolicy>> dup{{prbs()}, {prbs()}};
  EXPECT_EQ(select_optimal_family(b_pair(3), dup, domain(), 1).index, 0u);
  const std::vector<std::vector<PerturbationPolicy>> single{{zero_input()}};
  const auto sel = select_optimal_family(b_pair(3), single, domain(), 1);
  EXPECT_EQ(sel.index, 0u);
  EXPECT_LT(sel.report.delta_value, 1e-10);
}

TEST(GreedyDesign, PicksPrbsFirst) {
  const std::vector<PerturbationPolicy> pool{zero_input(), prbs()};
  const auto design = greedy_adaptive_design(b_pair(4), pool, 1, domain(), 1, 1e-6);
  ASSERT_EQ(design.policy_ids.size(), 1u);
  EXPECT_EQ(design.policy_ids[0], "prbs");
  EXPECT_TRUE(design.all_separated);
}

TEST(GreedyDesign, IdenticalModelsAreInseparable) {
  const auto a = testing::random_instance(2, 1, 1, 5);
  const std::vector<SystemParams> same{a, a, a};
  const std::vector<PerturbationPolicy> pool{zero_input(), prbs(), prbs("prbs2", 0.6)};
  const auto design = greedy_adaptive_design(same, pool, 2, domain(), 1, 1e-6);
  EXPECT_TRUE(design.inseparable);
  EXPECT_EQ(design.policy_ids, (std::vector<std::string>{"zero", "prbs"}));
}

TEST(GreedyDesign, FullBudgetIsPermutation) {
  std::vector<SystemParams> models;
  for (std::uint64_t s = 0; s < 3; ++s) models.push_back(testing::random_instance(2, 1, 1, 20 + s));
  const std::vector<PerturbationPolicy> pool{zero_input(), prbs(), prbs("prbs2", 0.6)};
  const auto design = greedy_adaptive_design(models, pool, 3, domain(), 1, 1e9);
  auto ids = design.policy_ids;
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(ids, (std::vector<std::string>{"prbs", "prbs2", "zero"}));
}

TEST(GreedyDesign, BudgetExceedsPool) {
  const std::vector<PerturbationPolicy> pool{prbs()};
  try {
    greedy_adaptive_design(b_pair(1), pool, 2, domain(), 1, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExceedsPool);
  }
}

}  // namespace persid
