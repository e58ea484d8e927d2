#include <gtest/gtest.h>

#include <Eigen/SVD>

#include <algorithm>
#include <numeric>

#include "test_support.hpp"
#include "topicnet/errors.hpp"
#include "topicnet/estimator_joint.hpp"
#include "topicnet/model.hpp"
#include "topicnet/synthgen.hpp"

using namespace topicnet;
using namespace topicnet::testing;

namespace {

// One topic per factor row gives disjoint column supports, hence orthogonal columns.
SynthSpec orthogonal_spec(Eigen::Index p, Eigen::Index k, Eigen::Index n, std::uint64_t seed) {
  SynthSpec s;
  s.p = p;
  s.K = k;
  s.n = n;
  s.topics_per_row = {1, 1};
  s.miss_frac = 0.0;
  s.noise_mult_range = {1.0, 1.0};
  s.false_pos_frac = 0.0;
  s.seed = seed;
  return s;
}

// Cyclic shifts of one weight vector: every column has mean exactly 1/K.
Matrix cyclic_topics(const Vector& weights, Eigen::Index repeats) {
  const Eigen::Index k = weights.size();
  Matrix m(k * repeats, k);
  for (Eigen::Index r = 0; r < repeats; ++r) {
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index c = 0; c < k; ++c) m(r * k + i, c) = weights((c + i) % k);
    }
  }
  return m;
}

Dataset dataset_from(const FactorPair& f, const Matrix& topics) {
  Dataset ds;
  ds.nodes = f.nodes();
  ds.topics = f.topics();
  ds.topics_known = true;
  for (Eigen::Index i = 0; i < topics.rows(); ++i) {
    Observation obs;
    obs.topics = topics.row(i).transpose();
    obs.values = forward(f, *obs.topics);
    ds.observations.push_back(std::move(obs));
  }
  return ds;
}

double quadratic_objective(const FactorPair& f, const Observation& obs, const Vector& m) {
  Matrix r = obs.values - forward(f, m);
  if (obs.mask) r.array() *= obs.mask->array();
  return r.squaredNorm();
}

}  // namespace

TEST(InitMeanSvd, EasiestCaseRecoversThetas) {
  Rng rng(60);
  FactorPair f = FactorPair::zeros(9, 3);
  for (Eigen::Index j = 0; j < 9; ++j) {
    f.influence(j, j % 3) = rng.uniform(1.0, 2.0);
    f.receptivity(j, (j + 1) % 3) = rng.uniform(1.0, 2.0);
  }
  Vector w(3);
  w << 0.6, 0.3, 0.1;
  const Dataset ds = dataset_from(f, cyclic_topics(w, 2));
  const auto init = init_mean_svd(ds, 3);
  const ThetaStack truth = thetas_from_factors(f);
  EXPECT_TRUE(init.degenerate.empty());
  std::vector<Eigen::Index> perm(3);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      worst = std::max(
          worst, (init.thetas[k] - truth[static_cast<std::size_t>(perm[k])]).cwiseAbs().maxCoeff());
    }
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_LE(best, 1e-8);
}

TEST(InitMeanSvd, SingleObservationScaledSvd) {
  Rng rng(61);
  Dataset ds;
  ds.nodes = 6;
  ds.topics = 2;
  Observation obs;
  obs.values = random_matrix(6, 6, rng, 0.0, 1.0);
  ds.observations.push_back(obs);
  const auto init = init_mean_svd(ds, 2);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(obs.values),
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  for (Eigen::Index k = 0; k < 2; ++k) {
    const Matrix oracle = 2.0 * svd.singularValues()(k) * svd.matrixU().col(k) *
                          svd.matrixV().col(k).transpose();
    EXPECT_LE((init.thetas[static_cast<std::size_t>(k)] - oracle).cwiseAbs().maxCoeff(), 1e-8);
  }
  EXPECT_GE(init.factors.influence.minCoeff(), 0.0);
}

TEST(InitMeanSvd, DegenerateComponentsAreFlagged) {
  Rng rng(62);
  const auto f = random_factors(6, 1, rng);
  Dataset ds = dataset_from(f, Matrix::Ones(3, 1));
  ds.topics = 3;
  const auto init = init_mean_svd(ds, 3, 5);
  EXPECT_EQ(init.degenerate.size(), 2u);
  EXPECT_GT(init.factors.influence.col(1).norm(), 0.0);
  Dataset zero = ds;
  for (auto& o : zero.observations) o.values.setZero();
  EXPECT_THROW(init_mean_svd(zero, 2), NumericError);
}

TEST(InitMeanSvd, InitializationErrorShrinksWithRho0) {
  // Blend orthogonal factors toward a shared direction and watch the error.
  Rng rng(63);
  FactorPair base = FactorPair::zeros(12, 3);
  for (Eigen::Index j = 0; j < 12; ++j) {
    base.influence(j, j % 3) = rng.uniform(1.0, 2.0);
    base.receptivity(j, (j + 2) % 3) = rng.uniform(1.0, 2.0);
  }
  Vector w(3);
  w << 0.5, 0.3, 0.2;
  const Matrix topics = cyclic_topics(w, 3);
  std::vector<double> rho, err;
  for (double blend : {0.3, 0.1, 0.0}) {
    FactorPair f = base;
    f.influence.array() += blend;
    f.receptivity.array() += blend;
    const Dataset ds = dataset_from(f, topics);
    const auto rep = check_conditions(f, topics);
    const auto init = init_mean_svd(ds, 3);
    const ThetaStack truth = thetas_from_factors(f);
    std::vector<Eigen::Index> perm(3);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double worst = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        worst = std::max(worst, (init.thetas[k] - truth[static_cast<std::size_t>(perm[k])]).norm());
      }
      best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    rho.push_back(rep.rho0);
    err.push_back(best);
    EXPECT_TRUE(std::isfinite(best));
  }
  EXPECT_GT(rho[0], rho[1]);
  EXPECT_GT(rho[1], rho[2]);
  EXPECT_GT(err[0], err[1]);
  EXPECT_GT(err[1], err[2]);
}

TEST(EstimateTopics, NoiselessRecovery) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto f = random_factors(8, 3, rng);
    const Vector truth = random_simplex(3, rng);
    Observation obs;
    obs.values = forward(f, truth);
    const Vector m = estimate_topics(f, obs, Vector::Constant(3, 1.0 / 3.0), std::nullopt, 5000,
                                     1e-14);
    EXPECT_LE((m - truth).cwiseAbs().maxCoeff(), 1e-6) << "seed " << seed;
  }
}

TEST(EstimateTopics, SingleTopicIsPoint) {
  Rng rng(64);
  const auto f = random_factors(5, 1, rng);
  Observation obs;
  obs.values = random_matrix(5, 5, rng);
  EXPECT_EQ(estimate_topics(f, obs, Vector::Ones(1)), Vector::Ones(1));
}

TEST(EstimateTopics, NoisyDescentAndFeasibility) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const auto f = random_factors(7, 4, rng);
    Observation obs;
    obs.values = forward(f, random_simplex(4, rng)) + random_matrix(7, 7, rng, -0.5, 0.5);
    if (seed % 3 == 0) obs.mask = random_mask(7, rng);
    const Vector m0 = random_simplex(4, rng);
    const Vector m = estimate_topics(f, obs, m0);
    EXPECT_GE(m.minCoeff(), 0.0);
    EXPECT_NEAR(m.sum(), 1.0, 1e-12);
    EXPECT_LE(quadratic_objective(f, obs, m), quadratic_objective(f, obs, m0) + 1e-12);
  }
}

TEST(TopicQuadratic, ExpandsObjective) {
  Rng rng(65);
  const auto f = random_factors(6, 3, rng);
  Observation obs;
  obs.values = random_matrix(6, 6, rng);
  obs.mask = random_mask(6, rng);
  const auto q = topic_quadratic(f, obs);
  const auto qt = topic_quadratic(thetas_from_factors(f), obs);
  EXPECT_LE((q.gram - qt.gram).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((q.linear - qt.linear).cwiseAbs().maxCoeff(), 1e-12);
  const Vector m = random_simplex(3, rng);
  Matrix xm = obs.values;
  xm.array() *= obs.mask->array();
  const double expanded = m.dot(q.gram * m) - 2.0 * q.linear.dot(m) + xm.squaredNorm();
  EXPECT_NEAR(expanded, quadratic_objective(f, obs, m), 1e-10);
}

TEST(AlignPermutation, TrivialCases) {
  Rng rng(66);
  const Matrix m = random_topic_matrix(10, 3, rng);
  const std::vector<Eigen::Index> identity{0, 1, 2};
  EXPECT_EQ(align_permutation(m, m), identity);
  Matrix swapped = m;
  swapped.col(0) = m.col(1);
  swapped.col(1) = m.col(0);
  const std::vector<Eigen::Index> transposition{1, 0, 2};
  EXPECT_EQ(align_permutation(swapped, m), transposition);
}

TEST(AlignPermutation, MatchesExhaustiveSearch) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const Eigen::Index k = seed % 2 == 0 ? 4 : 5;
    const Matrix a = random_topic_matrix(12, k, rng);
    const Matrix b = random_topic_matrix(12, k, rng);
    const double best = alignment_cost_oracle(a, b);
    const auto got = align_permutation(a, b);
    EXPECT_NEAR((a - permute_columns(b, got)).squaredNorm(), best, 1e-12);
    EXPECT_LE(distance_topics(a, permute_columns(b, got)), distance_topics(a, b) + 1e-15);
  }
}

TEST(DistanceTopics, Values) {
  Rng rng(67);
  const Matrix m = random_topic_matrix(5, 3, rng);
  EXPECT_EQ(distance_topics(m, m), 0.0);
  Matrix a(1, 2), b(1, 2);
  a << 1, 0;
  b << 0, 1;
  EXPECT_DOUBLE_EQ(distance_topics(a, b), 2.0);
  const Matrix c = random_topic_matrix(5, 3, rng);
  double total = 0.0;
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index k = 0; k < 3; ++k) total += (m(i, k) - c(i, k)) * (m(i, k) - c(i, k));
  }
  EXPECT_NEAR(distance_topics(m, c), total / 5.0, 1e-15);
  EXPECT_THROW(distance_topics(m, Matrix::Zero(4, 3)), DimensionError);
}

TEST(FitJoint, FixedPointAtTruth) {
  const auto inst = gen_instance(orthogonal_spec(12, 3, 20, 68));
  const JointState start{balance_columns(inst.truth), inst.topics};
  JointConfig cfg;
  cfg.max_outer = 5;
  cfg.inner.sparsity = sparsity_from_truth(inst.truth);
  const auto fit = fit_joint(inst.dataset, 3, cfg, &start, &start);
  for (double l : fit.report.loss_trace) EXPECT_LE(l, 1e-14);
  EXPECT_LE(subspace_distance(fit.factors, start.factors), 1e-12);
  EXPECT_LE(distance_topics(fit.topics, start.topics), 1e-12);
}

TEST(FitJoint, TracesAndSimplexRows) {
  SynthSpec spec = orthogonal_spec(12, 3, 25, 69);
  spec.noise = NoiseModel::gaussian;
  spec.gaussian_sigma = 0.05;
  const auto inst = gen_instance(spec);
  const JointTruth truth{balance_columns(inst.truth), inst.topics};
  JointConfig cfg;
  cfg.max_outer = 15;
  cfg.inner.sparsity = sparsity_from_truth(inst.truth);
  const auto fit = fit_joint(inst.dataset, 3, cfg, &truth);
  const auto outer = static_cast<std::size_t>(fit.report.outer_iters);
  EXPECT_EQ(fit.report.loss_trace.size(), outer);
  EXPECT_EQ(fit.report.dist_B_trace.size(), outer);
  EXPECT_EQ(fit.report.dist_M_trace.size(), outer);
  EXPECT_EQ(fit.report.permutation.size(), 3u);
  for (Eigen::Index i = 0; i < fit.topics.rows(); ++i) {
    EXPECT_GE(fit.topics.row(i).minCoeff(), 0.0);
    EXPECT_NEAR(fit.topics.row(i).sum(), 1.0, 1e-12);
  }
  EXPECT_LT(fit.report.loss_trace.back(), fit.report.loss_trace.front());
}

TEST(FitJoint, ParallelTopicStepMatchesSequential) {
  SynthSpec spec = orthogonal_spec(10, 2, 16, 70);
  spec.noise = NoiseModel::gaussian;
  spec.gaussian_sigma = 0.1;
  const auto inst = gen_instance(spec);
  JointConfig cfg;
  cfg.max_outer = 4;
  const auto seq = fit_joint(inst.dataset, 2, cfg);
  cfg.inner.exec.parallel = true;
  cfg.inner.exec.threads = 3;
  cfg.inner.route = GradientRoute::moments;
  const auto par = fit_joint(inst.dataset, 2, cfg);
  EXPECT_LE((seq.topics - par.topics).cwiseAbs().maxCoeff(), 1e-8);
}
