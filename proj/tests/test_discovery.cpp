#include "discovery_oracle.hpp"

#include "locmin/discovery.hpp"
#include "locmin/experiment.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace locmin;

namespace {

const RelaxationDirection& default_direction() {
  static const RelaxationDirection dir = discover_relaxation_direction(
      sinusoid_discovery_config(100, 64, false, 1e-3), make_sinusoid_model(1.0));
  return dir;
}

}  // namespace

TEST(InverseSqrt, MatchesDenseEigendecomposition) {
  RandomStream rng(1);
  Matrix b(6, 6);
  for (Index i = 0; i < b.size(); ++i) b.data()[i] = rng.normal();
  const Matrix a = b * b.transpose() + 0.1 * Matrix::Identity(6, 6);
  const Matrix w = inverse_sqrt_psd(a);
  // W A W = I and W symmetric
  EXPECT_LT((w * a * w - Matrix::Identity(6, 6)).norm(), 1e-10);
  EXPECT_LT((w - w.transpose()).norm(), 1e-12);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  const Matrix oracle = eig.eigenvectors() *
                        eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                        eig.eigenvectors().transpose();
  EXPECT_LT((w - oracle).norm(), 1e-10);
}

TEST(InverseSqrt, FloorsTinyEigenvalues) {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 0) = 4.0;
  a(1, 1) = 1.0;
  const Matrix w = inverse_sqrt_psd(a);
  EXPECT_NEAR(w(0, 0), 0.5, 1e-14);
  EXPECT_NEAR(w(1, 1), 1.0, 1e-14);
  EXPECT_EQ(w(2, 2), 0.0);
}

TEST(WhitenedScore, AdditiveRelaxationScalesResidualBySigma) {
  const double sigma = 0.5;
  const GaussianLocationModel<AdditiveEmbedding<SinusoidMean>> relaxed(
      AdditiveEmbedding<SinusoidMean>(SinusoidMean{}), sigma);
  const Vector truth = lift(Vector::Constant(1, 3.0), 100);
  const Dataset d = Dataset::single(sinusoid_mean(3.0));
  const Vector at = lift(Vector::Constant(1, 2.0), 100);
  const Vector col = whitened_score(relaxed, truth, d, at, 1);
  const Vector expected = (sinusoid_mean(3.0) - sinusoid_mean(2.0)) / sigma;
  EXPECT_LT((col - expected).norm(), 1e-10 * expected.norm());
  EXPECT_EQ(whitened_score(relaxed, truth, d, truth, 1).norm(), 0.0);
}

TEST(Discovery, StartsAtTruthGiveNoColumns) {
  const auto cfg = sinusoid_discovery_config(20, 20, true, 1e-3);
  EXPECT_THROW(discover_relaxation_direction(cfg, make_sinusoid_model(1.0)), EmptyCollection);
}

TEST(Discovery, EmptySetsRejected) {
  auto cfg = sinusoid_discovery_config(5, 5, false, 1e-3);
  cfg.start_set.clear();
  EXPECT_THROW(discover_relaxation_direction(cfg, make_sinusoid_model(1.0)), InvalidInput);
}

TEST(Discovery, SingleColumnGivesNormalizedColumn) {
  // One truth, one start in the spurious basin.
  DiscoveryConfig<AdditiveEmbedding<SinusoidMean>> cfg{
      {ParamPoint::scalar(3.0 * std::numbers::pi)},
      {ParamPoint::scalar(1.0)},
      AdditiveEmbedding<SinusoidMean>(SinusoidMean{}),
      1e-3};
  const auto model = make_sinusoid_model(1.0);
  const auto dir = discover_relaxation_direction(cfg, model);
  ASSERT_EQ(dir.columns_used, 1);
  const Dataset d = Dataset::single(sinusoid_mean(3.0 * std::numbers::pi));
  const double th = minimize_negloglik(model, d, Vector::Constant(1, 1.0)).minimizer[0];
  const Vector c = (d.samples().col(0) - sinusoid_mean(th)).normalized();
  EXPECT_NEAR(std::abs(dir.r.dot(c)), 1.0, 1e-10);
  EXPECT_NEAR(dir.r.norm(), 1.0, 1e-14);
}

TEST(Discovery, UnitNormWithSignConvention) {
  const auto& dir = default_direction();
  EXPECT_NEAR(dir.r.norm(), 1.0, 1e-12);
  Index arg = 0;
  dir.r.cwiseAbs().maxCoeff(&arg);
  EXPECT_GT(dir.r[arg], 0.0);
  EXPECT_GT(dir.columns_used, 0);
  for (Index i = 1; i < dir.singular_values.size(); ++i) {
    EXPECT_LE(dir.singular_values[i], dir.singular_values[i - 1]);
  }
}

TEST(Discovery, MatchesIndependentPipeline) {
  const auto& dir = default_direction();
  const auto ref = oracle::discover(theta_grid(100), theta_grid(64, true), 1.0, 1e-3);
  EXPECT_GE(std::abs(dir.r.dot(ref.r)), 0.99);
  // both pipelines should see about the same spurious pairs
  EXPECT_NEAR(static_cast<double>(dir.columns_used), ref.columns, 0.02 * ref.columns);
}

TEST(Discovery, SameResultForAnyThreadCount) {
  const auto cfg = sinusoid_discovery_config(40, 24, false, 1e-3);
  const auto model = make_sinusoid_model(1.0);
  const auto one = discover_relaxation_direction(cfg, model, {}, 1);
  const auto three = discover_relaxation_direction(cfg, model, {}, 3);
  EXPECT_EQ(one.r, three.r);
  EXPECT_EQ(one.singular_values, three.singular_values);
}

TEST(Discovery, IterateOneRoundEqualsSingle) {
  const auto cfg = sinusoid_discovery_config(30, 16, false, 1e-3);
  const auto model = make_sinusoid_model(1.0);
  const auto single = discover_relaxation_direction(cfg, model);
  const auto rounds = iterate_discovery(cfg, model, {}, 1);
  ASSERT_EQ(rounds.size(), 1u);
  EXPECT_EQ(rounds[0].r, single.r);
}

TEST(Discovery, IteratedDirectionsOrthonormal) {
  const auto cfg = sinusoid_discovery_config(30, 16, false, 1e-3);
  const auto rounds = iterate_discovery(cfg, make_sinusoid_model(1.0), {}, 3);
  ASSERT_GE(rounds.size(), 2u);
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    EXPECT_NEAR(rounds[i].r.norm(), 1.0, 1e-12);
    for (std::size_t j = 0; j < i; ++j) EXPECT_LT(std::abs(rounds[i].r.dot(rounds[j].r)), 1e-8);
  }
}

TEST(Discovery, RankOneDeltaIsCollinearWithWhitenedScore) {
  // Single recorded column: the best relaxed direction I~^-1 s~, once
  // whitened, is the recorded column itself.
  const double sigma = 0.7;
  DiscoveryConfig<AdditiveEmbedding<SinusoidMean>> cfg{
      {ParamPoint::scalar(8.0)}, {ParamPoint::scalar(2.0)},
      AdditiveEmbedding<SinusoidMean>(SinusoidMean{}), 1e-3};
  const auto model = make_sinusoid_model(sigma);
  const auto dir = discover_relaxation_direction(cfg, model);
  const GaussianLocationModel<AdditiveEmbedding<SinusoidMean>> relaxed(
      AdditiveEmbedding<SinusoidMean>(SinusoidMean{}), sigma);
  const Dataset d = Dataset::single(sinusoid_mean(8.0));
  const double th = minimize_negloglik(model, d, Vector::Constant(1, 2.0)).minimizer[0];
  const Matrix info = relaxed.fisher(lift(Vector::Constant(1, 8.0), 100)).bottomRightCorner(100, 100);
  const Vector s = relaxed.score(d, lift(Vector::Constant(1, th), 100)).tail(100);
  const Vector best = info.ldlt().solve(s);
  const Vector whitened = (inverse_sqrt_psd(info).inverse() * best).normalized();
  EXPECT_NEAR(std::abs(dir.r.dot(whitened)), 1.0, 1e-10);
}

TEST(Discovery, LearnedGapSeparatesSpuriousFromTruth) {
  const auto& dir = default_direction();
  const auto model = make_sinusoid_model(1.0);
  const double th0 = kSinusoidTheta0;
  const Dataset d = Dataset::single(sinusoid_mean(th0));
  const GaussianLocationModel<LearnedDirectionEmbedding> relaxed(LearnedDirectionEmbedding(dir.r),
                                                                 1.0);
  const auto minima = enumerate_local_minima(model, d);
  for (const auto& m : minima) {
    if (std::abs(m.theta - th0) < 1e-3) continue;
    const Vector th = minimize_negloglik(model, d, Vector::Constant(1, m.theta)).minimizer.values();
    const double gap_s = restricted_relaxed_minimize(relaxed, d, th).gap;
    const double gap_t = restricted_relaxed_minimize(
        relaxed, d, minimize_negloglik(model, d, Vector::Constant(1, th0)).minimizer.values()).gap;
    EXPECT_GT(gap_s, 0.0);
    EXPECT_GE(gap_s, 10.0 * gap_t);
  }
}
