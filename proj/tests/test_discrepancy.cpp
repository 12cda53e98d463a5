#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "persid/discrepancy.hpp"
#include "persid/error.hpp"
#include "persid/model_class.hpp"
#include "test_support.hpp"

namespace persid {
namespace {

GaussianTrajectoryLaw law1d(double mean, double var) {
  GaussianTrajectoryLaw l;
  l.mean = Eigen::VectorXd::Constant(1, mean);
  l.cov = Eigen::MatrixXd::Constant(1, 1, var);
  l.output_dim = 1;
  return l;
}

Eigen::MatrixXd gaussian_samples(int n, int d, double shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return testing::random_matrix(n, d, rng).array() + shift;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST(GaussianW2, IdenticalLawsGiveZero) {
  const auto P = testing::random_instance(3, 1, 2, 1);
  const auto law = trajectory_law(P, testing::random_inputs(6, 1, 2));
  EXPECT_LT(gaussian_w2(law, law).value, 1e-10);
}

TEST(GaussianW2, MeanShift) { EXPECT_NEAR(gaussian_w2(law1d(0, 1), law1d(3, 1)).value, 3.0, 1e-14); }

TEST(GaussianW2, VarianceChange) {
  EXPECT_NEAR(gaussian_w2(law1d(0, 1), law1d(0, 4)).value, 1.0, 1e-14);
}

TEST(GaussianW2, MatchesTextbookFormula) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const int d = 1 + k % 6;
    GaussianTrajectoryLaw a, b;
    a.output_dim = b.output_dim = 1;
    a.mean = testing::random_matrix(d, 1, rng);
    b.mean = testing::random_matrix(d, 1, rng);
    a.cov = testing::random_spd(d, rng);
    b.cov = testing::random_spd(d, rng);
    EXPECT_NEAR(gaussian_w2(a, b).value, testing::w2_textbook(a.mean, a.cov, b.mean, b.cov), 1e-8);
  }
}

TEST(GaussianW2, PerTimestepNormalization) {
  const auto P = testing::random_instance(2, 1, 1, 4);
  const auto u = testing::random_inputs(8, 1, 5);
  auto Q = P;
  Q.B *= 2.0;
  const auto a = trajectory_law(P, u), b = trajectory_law(Q, u);
  const auto raw = gaussian_w2(a, b);
  const auto norm = gaussian_w2(a, b, Normalization::kPerTimestep);
  EXPECT_NEAR(norm.value, raw.value / 3.0, 1e-14);
  EXPECT_EQ(norm.normalization, Normalization::kPerTimestep);
}

TEST(GaussianW2, SymmetricAndTriangle1D) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> m(-3, 3), v(0.01, 5);
  for (int k = 0; k < 100; ++k) {
    const auto a = law1d(m(rng), v(rng)), b = law1d(m(rng), v(rng)), c = law1d(m(rng), v(rng));
    const double ab = gaussian_w2(a, b).value;
    EXPECT_NEAR(ab, gaussian_w2(b, a).value, 1e-12);
    EXPECT_LE(gaussian_w2(a, c).value, ab + gaussian_w2(b, c).value + 1e-9);
  }
}

TEST(GaussianW2, Errors) {
  auto bad = law1d(0, -1.0);
  try {
    gaussian_w2(bad, law1d(0, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotPSD);
  }
  GaussianTrajectoryLaw two;
  two.mean = Eigen::VectorXd::Zero(2);
  two.cov = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_THROW(gaussian_w2(two, law1d(0, 1)), Error);
  EXPECT_NO_THROW(gaussian_w2(law1d(0, -1e-11), law1d(0, 1)));
}

TEST(GaussianW2, SimilarityTransformLeavesLawUnchanged) {
  std::mt19937_64 rng(7);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto P = testing::random_instance(3, 1, 2, s);
    const Eigen::MatrixXd S = testing::random_matrix(3, 3, rng) + 2.5 * Eigen::MatrixXd::Identity(3, 3);
    const auto u = testing::random_inputs(7, 1, s);
    EXPECT_LT(gaussian_w2(trajectory_law(P, u), trajectory_law(similarity_transform(P, S), u)).value,
              1e-6);
  }
}

TEST(GaussianW2, ZeroInputHidesB) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto P = testing::random_instance(2, 1, 1, s);
    auto Q = P;
    Q.B = testing::random_instance(2, 1, 1, s + 50).B;
    PerturbationSequence u;
    u.values = Eigen::MatrixXd::Zero(9, 1);
    EXPECT_LT(gaussian_w2(trajectory_law(P, u), trajectory_law(Q, u)).value, 1e-10);
  }
}

TEST(Mmd, IdenticalSetsGiveZero) {
  const auto xs = gaussian_samples(40, 3, 0.0, 1);
  EXPECT_LT(mmd2_biased(xs, xs).value, 1e-12);
}

TEST(Mmd, SingletonFormula) {
  Eigen::MatrixXd x(1, 2), y(1, 2);
  x << 0.0, 1.0;
  y << 2.0, -1.0;
  const double sigma = 1.7;
  const double expected = 2.0 - 2.0 * std::exp(-(x - y).squaredNorm() / (2 * sigma * sigma));
  EXPECT_NEAR(mmd2_biased(x, y, sigma).value, expected, 1e-14);
}

TEST(Mmd, MatchesNaiveWithMedianBandwidth) {
  const auto xs = gaussian_samples(15, 4, 0.0, 2);
  const auto ys = gaussian_samples(12, 4, 0.5, 3);
  std::vector<double> dists;
  Eigen::MatrixXd pooled(27, 4);
  pooled << xs, ys;
  for (int i = 0; i < 27; ++i) {
    for (int j = i + 1; j < 27; ++j) dists.push_back((pooled.row(i) - pooled.row(j)).norm());
  }
  std::sort(dists.begin(), dists.end());
  const double med = dists.size() % 2 ? dists[dists.size() / 2]
                                      : 0.5 * (dists[dists.size() / 2 - 1] + dists[dists.size() / 2]);
  EXPECT_NEAR(mmd2_biased(xs, ys).value, testing::naive_mmd2(xs, ys, med), 1e-12);
  EXPECT_NEAR(mmd2_biased(xs, ys).value, mmd2_biased(ys, xs).value, 1e-12);
}

TEST(Mmd, SameLawBelowPermutationQuantile) {
  const auto P = testing::random_instance(2, 1, 1, 8);
  const auto u = testing::random_inputs(5, 1, 9);
  const auto sampler = make_sampler(P);
  OutputSpace cont;
  const auto xs = sample_set(sampler, u, 500, 10, cont);
  const auto ys = sample_set(sampler, u, 500, 11, cont);
  const double observed = mmd2_biased(xs, ys).value;
  Eigen::MatrixXd pooled(1000, xs.cols());
  pooled << xs, ys;
  std::mt19937_64 rng(12);
  std::vector<double> null;
  std::vector<int> idx(1000);
  std::iota(idx.begin(), idx.end(), 0);
  for (int k = 0; k < 200; ++k) {
    std::shuffle(idx.begin(), idx.end(), rng);
    Eigen::MatrixXd a(500, xs.cols()), b(500, xs.cols());
    for (int i = 0; i < 500; ++i) {
      a.row(i) = pooled.row(idx[i]);
      b.row(i) = pooled.row(idx[500 + i]);
    }
    null.push_back(mmd2_biased(a, b).value);
  }
  std::sort(null.begin(), null.end());
  EXPECT_LT(observed, null[189]);
}

TEST(Mmd, ShrinksWithSampleSize) {
  std::vector<double> med;
  for (int n : {50, 200, 800}) {
    std::vector<double> vals;
    for (std::uint64_t s = 0; s < 20; ++s) {
      vals.push_back(mmd2_biased(gaussian_samples(n, 3, 0, 2 * s), gaussian_samples(n, 3, 0, 2 * s + 1)).value);
    }
    med.push_back(median(vals));
  }
  EXPECT_GT(med[0], med[1]);
  EXPECT_GT(med[1], med[2]);
}

TEST(Energy, IdentityAndPointMasses) {
  const auto xs = gaussian_samples(30, 2, 0, 13);
  EXPECT_LT(energy_distance(xs, xs).value, 1e-12);
  Eigen::MatrixXd x(1, 3), y(1, 3);
  x << 1, 2, 3;
  y << 0, 0, 1;
  EXPECT_NEAR(energy_distance(x, y).value, 2.0 * (x - y).norm(), 1e-14);
}

TEST(Energy, MatchesNaiveAndSymmetric) {
  const auto xs = gaussian_samples(17, 5, 0.0, 14);
  const auto ys = gaussian_samples(23, 5, 0.3, 15);
  EXPECT_NEAR(energy_distance(xs, ys).value, testing::naive_energy(xs, ys), 1e-11);
  EXPECT_NEAR(energy_distance(xs, ys).value, energy_distance(ys, xs).value, 1e-12);
}

TEST(Energy, OrderingAgreesWithW2) {
  const auto P = testing::random_instance(2, 1, 1, 16);
  const auto u = testing::random_inputs(4, 1, 17);
  auto near = P, far = P;
  near.mu0.array() += 0.3;
  far.mu0.array() += 1.5;
  const auto base = trajectory_law(P, u);
  const double w_near = gaussian_w2(base, trajectory_law(near, u)).value;
  const double w_far = gaussian_w2(base, trajectory_law(far, u)).value;
  ASSERT_LT(w_near, w_far);
  OutputSpace cont;
  const auto xs = sample_set(make_sampler(P), u, 400, 1, cont);
  const double e_near = energy_distance(xs, sample_set(make_sampler(near), u, 400, 2, cont)).value;
  const double e_far = energy_distance(xs, sample_set(make_sampler(far), u, 400, 3, cont)).value;
  EXPECT_LT(e_near, e_far);
}

TEST(Energy, EmptySample) {
  try {
    energy_distance(Eigen::MatrixXd(0, 2), Eigen::MatrixXd::Zero(1, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptySample);
  }
  EXPECT_THROW(mmd2_biased(Eigen::MatrixXd::Zero(1, 2), Eigen::MatrixXd(0, 2)), Error);
}

TEST(TotalVariation, Cases) {
  const std::vector<double> a{0.5, 0.5}, b{0.75, 0.25}, p{1, 0}, q{0, 1};
  EXPECT_EQ(tv_exhaustive(a, a).value, 0.0);
  EXPECT_DOUBLE_EQ(tv_exhaustive(p, q).value, 1.0);
  EXPECT_DOUBLE_EQ(tv_exhaustive(a, b).value, 0.25);
  EXPECT_DOUBLE_EQ(tv_exhaustive(b, a).value, 0.25);
}

TEST(TotalVariation, Errors) {
  const std::vector<double> a{0.5, 0.5}, c{0.2, 0.3, 0.5}, bad{0.5, 0.6};
  try {
    tv_exhaustive(a, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSupportMismatch);
  }
  EXPECT_THROW(tv_exhaustive(a, bad), Error);
}

TEST(DiscrepancyKind, NamesRoundTrip) {
  for (auto k : {DiscrepancyKind::kGaussianW2, DiscrepancyKind::kMmd, DiscrepancyKind::kEnergy,
                 DiscrepancyKind::kTvExhaustive}) {
    EXPECT_EQ(parse_discrepancy_kind(discrepancy_kind_name(k)), k);
  }
}

TEST(ModelClassRouting, ExactKinds) {
  const auto P = testing::random_instance(2, 1, 1, 18);
  const auto u = testing::random_inputs(4, 1, 19);
  EXPECT_EQ(exact_discrepancy(P, P, u).kind, DiscrepancyKind::kGaussianW2);
  const auto h = testing::random_hmm(2, 2, 2, 20);
  const auto hu = testing::symbol_inputs({0, 1, 1});
  const auto d = exact_discrepancy(h, h, hu);
  EXPECT_EQ(d.kind, DiscrepancyKind::kTvExhaustive);
  EXPECT_LT(d.value, 1e-12);
  EXPECT_TRUE(has_exact_law(h, 3));
  EXPECT_FALSE(has_exact_law(testing::random_hmm(2, 2, 4, 1), 20));
}

TEST(ModelClassRouting, SampledKinds) {
  OutputSpace cont;
  OutputSpace disc{OutputKind::kDiscrete, 3};
  const auto h = testing::random_hmm(2, 2, 3, 21);
  const auto hu = testing::symbol_inputs({0, 1, 1});
  const auto xs = sample_set(make_sampler(h), hu, 30, 1, disc);
  EXPECT_EQ(xs.cols(), 12);
  EXPECT_EQ(xs.sum(), 30 * 4);
  EXPECT_EQ(sampled_discrepancy(xs, xs, disc).kind, DiscrepancyKind::kMmd);
  const auto P = testing::random_instance(1, 1, 2, 22);
  const auto cs = sample_set(make_sampler(P), testing::random_inputs(3, 1, 1), 10, 2, cont);
  EXPECT_EQ(cs.cols(), 8);
  EXPECT_EQ(sampled_discrepancy(cs, cs, cont).kind, DiscrepancyKind::kEnergy);
}

}  // namespace persid
