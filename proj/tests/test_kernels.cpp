#include <gtest/gtest.h>

#include <cstdlib>

#include "test_support.hpp"
#include "topicnet/kernels.hpp"

using namespace topicnet;
using namespace topicnet::testing;

namespace {

constexpr double kReassociationTol = 1e-12;

double max_rel(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

}  // namespace

class KernelEquivalence : public ::testing::TestWithParam<int> {};

TEST_P(KernelEquivalence, FactorResiduals) {
  const int threads = GetParam();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const auto f = random_factors(9, 3, rng);
    const Dataset ds = random_dataset(9, 3, 17, rng, seed % 2 == 0);
    const Matrix topics = ds.topic_matrix();
    const auto s = factor_residuals_serial(f, ds, topics);
    const auto p = factor_residuals_parallel(f, ds, topics, threads);
    EXPECT_NEAR(p.loss, s.loss, kReassociationTol * std::max(1.0, s.loss));
    EXPECT_LE(max_rel(p.grad_influence, s.grad_influence), kReassociationTol);
    EXPECT_LE(max_rel(p.grad_receptivity, s.grad_receptivity), kReassociationTol);
  }
}

TEST_P(KernelEquivalence, ThetaResiduals) {
  const int threads = GetParam();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    ThetaStack thetas;
    for (int k = 0; k < 3; ++k) thetas.push_back(random_matrix(7, 7, rng));
    const Dataset ds = random_dataset(7, 3, 13, rng, seed % 2 == 1);
    const Matrix topics = ds.topic_matrix();
    const auto s = theta_residuals_serial(thetas, ds, topics);
    const auto p = theta_residuals_parallel(thetas, ds, topics, threads);
    EXPECT_NEAR(p.loss, s.loss, kReassociationTol * std::max(1.0, s.loss));
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_LE(max_rel(p.gradient[k], s.gradient[k]), kReassociationTol);
    }
  }
}

TEST_P(KernelEquivalence, TopicMoments) {
  const int threads = GetParam();
  Rng rng(31);
  const Dataset ds = random_dataset(8, 4, 23, rng);
  const Matrix topics = ds.topic_matrix();
  const auto s = topic_moments_serial(ds, topics);
  const auto p = topic_moments_parallel(ds, topics, threads);
  EXPECT_NEAR(p.half_mean_square, s.half_mean_square, kReassociationTol * s.half_mean_square);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_LE(max_rel(p.weighted_means[k], s.weighted_means[k]), kReassociationTol);
  }
}

INSTANTIATE_TEST_SUITE_P(Threads, KernelEquivalence, ::testing::Values(1, 2, 3, 4, 0));

TEST(Kernels, SerialMatchesLoopOracle) {
  Rng rng(32);
  const auto f = random_factors(5, 2, rng);
  const Dataset ds = random_dataset(5, 2, 6, rng, true);
  const Matrix topics = ds.topic_matrix();
  EXPECT_NEAR(factor_residuals_serial(f, ds, topics).loss, loss_oracle(f, ds, topics), 1e-12);
}

TEST(Kernels, TopicMomentsMatchLoopOracle) {
  Rng rng(33);
  const Dataset ds = random_dataset(4, 3, 5, rng);
  const Matrix topics = ds.topic_matrix();
  const auto mom = topic_moments_serial(ds, topics);
  double sq = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    Matrix acc = Matrix::Zero(4, 4);
    for (std::size_t i = 0; i < 5; ++i) {
      acc += topics(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) *
             ds.observations[i].values;
    }
    EXPECT_LE((mom.weighted_means[k] - acc / 5.0).cwiseAbs().maxCoeff(), 1e-14);
  }
  for (const auto& o : ds.observations) sq += o.values.squaredNorm();
  EXPECT_NEAR(mom.half_mean_square, sq / 10.0, 1e-12);
}

TEST(Kernels, DispatchFollowsExecution) {
  Rng rng(34);
  const auto f = random_factors(6, 2, rng);
  const Dataset ds = random_dataset(6, 2, 9, rng);
  const Matrix topics = ds.topic_matrix();
  const auto seq = factor_residuals(f, ds, topics, Execution::sequential());
  const auto ref = factor_residuals_serial(f, ds, topics);
  EXPECT_EQ(seq.loss, ref.loss);
  EXPECT_EQ(seq.grad_influence, ref.grad_influence);
  Execution par;
  par.parallel = true;
  par.threads = 2;
  const auto p = factor_residuals(f, ds, topics, par);
  EXPECT_NEAR(p.loss, ref.loss, 1e-12 * ref.loss);
}

TEST(Kernels, ParallelIsRepeatable) {
  Rng rng(35);
  const auto f = random_factors(6, 2, rng);
  const Dataset ds = random_dataset(6, 2, 31, rng);
  const Matrix topics = ds.topic_matrix();
  const auto a = factor_residuals_parallel(f, ds, topics, 3);
  const auto b = factor_residuals_parallel(f, ds, topics, 3);
  EXPECT_EQ(a.loss, b.loss);
  EXPECT_EQ(a.grad_influence, b.grad_influence);
}

TEST(Kernels, ExecutionFromEnvironment) {
  ::setenv("TOPICNET_THREADS", "3", 1);
  const auto e = Execution::from_environment();
  EXPECT_TRUE(e.parallel);
  EXPECT_EQ(e.threads, 3);
  ::unsetenv("TOPICNET_THREADS");
  EXPECT_EQ(Execution::from_environment().threads, 0);
}
