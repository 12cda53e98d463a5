#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "persid/error.hpp"
#include "persid/iohmm.hpp"
#include "test_support.hpp"

namespace persid {
namespace {

Symbols random_symbols(int length, int alphabet, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(0, alphabet - 1);
  Symbols s(length);
  for (auto& x : s) x = d(rng);
  return s;
}

Dataset hmm_dataset(const IoHmmParams& h, int n_records, int T, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TrajectoryRecord> recs;
  for (int i = 0; i < n_records; ++i) {
    const auto u = testing::symbol_inputs(random_symbols(T, h.n_inputs, rng));
    recs.push_back(simulate(h, u, seed * 1000 + i));
  }
  return group_dataset(std::move(recs));
}

}  // namespace

TEST(IoHmmValidate, RowsMustSumToOne) {
  auto h = testing::random_hmm(2, 2, 3, 1);
  EXPECT_NO_THROW(validate(h));
  h.emit(0, 0) += 1e-6;
  EXPECT_THROW(validate(h), Error);
}

TEST(IoHmmSimulate, SingleStateDrawsFromEmissionRow) {
  auto h = testing::random_hmm(1, 2, 3, 2);
  h.emit << 0.2, 0.5, 0.3;
  std::vector<int> counts(3, 0);
  const auto u = testing::symbol_inputs(Symbols(999, 1));
  const auto rec = simulate(h, u, 5);
  for (int y : rec.symbols()) counts[y]++;
  EXPECT_NEAR(counts[1] / 1000.0, 0.5, 0.06);
  EXPECT_NEAR(counts[0] / 1000.0, 0.2, 0.05);
}

TEST(IoHmmSimulate, IdentityEmissionRevealsDeterministicChain) {
  IoHmmParams h;
  h.n_states = h.n_obs = 3;
  h.n_inputs = 2;
  Eigen::MatrixXd cycle(3, 3), stay = Eigen::MatrixXd::Identity(3, 3);
  cycle << 0, 1, 0, 0, 0, 1, 1, 0, 0;
  h.trans = {stay, cycle};
  h.emit = Eigen::MatrixXd::Identity(3, 3);
  h.init = Eigen::Vector3d(1, 0, 0);
  const auto rec = simulate(h, testing::symbol_inputs({1, 1, 0, 1}), 7);
  EXPECT_EQ(rec.symbols(), (Symbols{0, 1, 2, 2, 0}));
}

TEST(IoHmmSimulate, DeterministicAndSymbolChecked) {
  const auto h = testing::random_hmm(2, 2, 2, 3);
  const auto u = testing::symbol_inputs({0, 1, 1, 0});
  EXPECT_EQ(simulate(h, u, 11).symbols(), simulate(h, u, 11).symbols());
  try {
    simulate(h, testing::symbol_inputs({0, 2}), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidSymbol);
  }
  PerturbationSequence frac;
  frac.values = Eigen::MatrixXd::Constant(2, 1, 0.5);
  EXPECT_THROW(simulate(h, frac, 1), Error);
}

TEST(ForwardLoglik, SingleStepMarginal) {
  const auto h = testing::random_hmm(3, 2, 4, 4);
  for (int y = 0; y < 4; ++y) {
    double expected = 0.0;
    for (int s = 0; s < 3; ++s) expected += h.init(s) * h.emit(s, y);
    EXPECT_NEAR(forward_loglik(h, {}, {y}), std::log(expected), 1e-14);
  }
}

TEST(ForwardLoglik, MatchesPathEnumeration) {
  std::mt19937_64 rng(8);
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto h = testing::random_hmm(2, 2, 3, s);
    const auto u = random_symbols(3, 2, rng);
    const auto y = random_symbols(4, 3, rng);
    EXPECT_NEAR(forward_loglik(h, u, y), std::log(testing::brute_force_likelihood(h, u, y)), 1e-10);
  }
}

TEST(ForwardLoglik, IdenticalEmissionRowsIgnoreTransitions) {
  auto h = testing::random_hmm(3, 2, 3, 9);
  h.init.setConstant(1.0 / 3);
  for (int s = 1; s < 3; ++s) h.emit.row(s) = h.emit.row(0);
  auto g = h;
  g.trans = testing::random_hmm(3, 2, 3, 10).trans;
  const Symbols u{0, 1, 1, 0, 1}, y{2, 0, 1, 1, 0, 2};
  EXPECT_NEAR(forward_loglik(h, u, y), forward_loglik(g, u, y), 1e-12);
}

TEST(ForwardLoglik, LongSequencesDoNotUnderflow) {
  const auto h = testing::random_hmm(3, 2, 4, 10);
  std::mt19937_64 rng(1);
  const auto u = random_symbols(10000, 2, rng);
  const auto y = simulate(h, testing::symbol_inputs(u), 3).symbols();
  const double ll = forward_loglik(h, u, y);
  EXPECT_TRUE(std::isfinite(ll));
  EXPECT_LT(ll, -1000.0);
}

TEST(ForwardLoglik, StatePermutationInvariance) {
  const auto h = testing::random_hmm(3, 2, 3, 12);
  const std::vector<int> perm{2, 0, 1};
  Eigen::MatrixXd Pm = Eigen::MatrixXd::Zero(3, 3);
  for (int i = 0; i < 3; ++i) Pm(i, perm[i]) = 1.0;
  auto g = h;
  for (auto& t : g.trans) t = Pm * t * Pm.transpose();
  g.emit = Pm * h.emit;
  g.init = Pm * h.init;
  std::mt19937_64 rng(2);
  for (int k = 0; k < 10; ++k) {
    const auto u = random_symbols(6, 2, rng);
    const auto y = random_symbols(7, 3, rng);
    EXPECT_NEAR(forward_loglik(h, u, y), forward_loglik(g, u, y), 1e-12);
  }
}

TEST(ExhaustiveLaw, NormalizedAndConsistentWithForward) {
  const auto h = testing::random_hmm(3, 2, 3, 13);
  const Symbols u{1, 0, 1};
  const auto law = exhaustive_law(h, u);
  ASSERT_EQ(law.size(), 81u);
  EXPECT_NEAR(std::accumulate(law.begin(), law.end(), 0.0), 1.0, 1e-9);
  for (std::size_t k = 0; k < law.size(); ++k) {
    EXPECT_NEAR(law[k], std::exp(forward_loglik(h, u, decode_sequence(k, 3, 4))), 1e-10);
  }
}

TEST(ExhaustiveLaw, SingleStateFactorizes) {
  const auto h = testing::random_hmm(1, 2, 2, 14);
  const auto law = exhaustive_law(h, {0, 1});
  for (std::size_t k = 0; k < law.size(); ++k) {
    const auto y = decode_sequence(k, 2, 3);
    EXPECT_NEAR(law[k], h.emit(0, y[0]) * h.emit(0, y[1]) * h.emit(0, y[2]), 1e-15);
  }
}

TEST(ExhaustiveLaw, DecodeOrderIsMostSignificantFirst) {
  EXPECT_EQ(decode_sequence(5, 3, 3), (Symbols{0, 1, 2}));
}

TEST(ExhaustiveLaw, TooLargeIsInfeasible) {
  const auto h = testing::random_hmm(2, 1, 4, 15);
  try {
    exhaustive_law(h, Symbols(10, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kExhaustiveInfeasible);
  }
}

TEST(BaumWelch, EmptyDataset) {
  try {
    baum_welch_fit(testing::random_hmm(2, 2, 2, 1), Dataset{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyDataset);
  }
}

TEST(BaumWelch, MonotoneOverRandomStarts) {
  const auto truth = testing::random_hmm(2, 2, 3, 16);
  const auto data = hmm_dataset(truth, 30, 20, 17);
  for (std::uint64_t s = 0; s < 50; ++s) {
    BaumWelchOptions opts;
    opts.max_iter = 15;
    opts.tol = 0.0;
    const auto fit = baum_welch_fit(random_iohmm(2, 2, 3, s), data, opts);
    for (std::size_t k = 1; k < fit.loglik_trace.size(); ++k) {
      EXPECT_GE(fit.loglik_trace[k] - fit.loglik_trace[k - 1], -1e-9);
    }
    EXPECT_NO_THROW(validate(fit.params));
  }
}

TEST(BaumWelch, TruthIsNearlyStationaryOnLargeData) {
  const auto truth = testing::random_hmm(2, 2, 3, 18);
  const auto data = hmm_dataset(truth, 500, 20, 19);
  BaumWelchOptions opts;
  opts.max_iter = 1;
  opts.tol = 0.0;
  const auto fit = baum_welch_fit(truth, data, opts);
  ASSERT_EQ(fit.loglik_trace.size(), 2u);
  const double per_record = (fit.loglik_trace[1] - fit.loglik_trace[0]) / 500.0;
  EXPECT_GE(per_record, 0.0);
  EXPECT_LT(per_record, 1e-2);
}

TEST(BaumWelch, SingleStateGivesEmpiricalFrequencies) {
  const auto truth = testing::random_hmm(1, 2, 3, 20);
  const auto data = hmm_dataset(truth, 20, 15, 21);
  std::vector<double> counts(3, 0.0);
  double total = 0.0;
  for (const auto& r : data.records) {
    for (int y : r.symbols()) {
      counts[y] += 1;
      total += 1;
    }
  }
  const auto fit = baum_welch_fit(testing::random_hmm(1, 2, 3, 22), data);
  for (int o = 0; o < 3; ++o) EXPECT_NEAR(fit.params.emit(0, o), counts[o] / total, 1e-7);
}

}  // namespace persid
