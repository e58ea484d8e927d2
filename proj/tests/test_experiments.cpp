#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "topicnet/errors.hpp"
#include "topicnet/experiments.hpp"
#include "topicnet/model.hpp"

using namespace topicnet;

namespace {

SynthSpec tiny_spec() {
  SynthSpec s;
  s.p = 10;
  s.K = 2;
  return s;
}

SynthSpec noiseless(SynthSpec s) {
  s.miss_frac = 0.0;
  s.false_pos_frac = 0.0;
  s.noise_mult_range = {1.0, 1.0};
  return s;
}

}  // namespace

TEST(Methods, NamesRoundTrip) {
  for (Method m : {Method::factors, Method::one_matrix, Method::k_matrices}) {
    EXPECT_EQ(parse_method(method_name(m)), m);
  }
  EXPECT_EQ(parse_method("ours"), Method::factors);
  EXPECT_THROW(parse_method("lasso"), ValidationError);
}

TEST(LogLinear, ExactGeometricSequence) {
  std::vector<double> v;
  for (int t = 0; t < 12; ++t) v.push_back(3.0 * std::pow(0.5, t));
  ConvergenceTrace c;
  fit_log_linear(v, 0, 12, c);
  EXPECT_NEAR(c.slope, std::log(0.5), 1e-12);
  EXPECT_NEAR(c.intercept, std::log(3.0), 1e-12);
  EXPECT_NEAR(c.fit_deviation, 0.0, 1e-12);
  EXPECT_NEAR(c.max_ratio, 0.5, 1e-12);
}

TEST(LogLinear, ShortWindowLeavesZeros) {
  ConvergenceTrace c;
  fit_log_linear({1.0, 0.5}, 0, 1, c);
  EXPECT_EQ(c.slope, 0.0);
  EXPECT_EQ(c.max_ratio, 0.0);
}

TEST(Streams, TrainAndTestShareOnlyTruth) {
  SynthSpec s = tiny_spec();
  s.seed = 4;
  const FactorPair truth = gen_ground_truth(s);
  const SynthInstance train = gen_split(s, truth, 20, kTrainStream);
  const SynthInstance test = gen_split(s, truth, 20, kTestStream);
  EXPECT_EQ(train.truth.influence, test.truth.influence);
  EXPECT_NE(train.observation_stream, test.observation_stream);
  EXPECT_NE(train.topics, test.topics);
  EXPECT_NE(train.dataset.observations[0].values, test.dataset.observations[0].values);
  // The same stream reproduces itself.
  const SynthInstance again = gen_split(s, truth, 20, kTestStream);
  EXPECT_EQ(again.topics, test.topics);
}

TEST(Sweep, NoiselessLimitReachesZeroError) {
  NsweepConfig cfg;
  cfg.spec = noiseless(tiny_spec());
  cfg.n_values = {30};
  cfg.seeds = {0, 1, 2};
  cfg.baseline_threshold = cfg.spec.p * cfg.spec.p;
  const SweepResult r = run_nsweep(cfg);
  ASSERT_EQ(r.cells.size(), 9u);
  for (const auto& c : r.cells) EXPECT_FALSE(c.failed) << c.failure;
  EXPECT_LT(r.median_error("factors", 30), 1e-6);
  EXPECT_LT(r.median_error("k-matrices", 30), 1e-6);
  EXPECT_GT(r.median_error("one-matrix", 30), 1e-3);
}

TEST(Sweep, FailedCellsAreMarkedAndSkipped) {
  NsweepConfig cfg;
  cfg.spec = tiny_spec();
  cfg.n_values = {10};
  cfg.seeds = {0, 1, 2};
  cfg.fit.max_iters = -1;
  const SweepResult r = run_nsweep(cfg);
  int failed = 0;
  for (const auto& c : r.cells) {
    if (c.method == "factors") {
      EXPECT_TRUE(c.failed);
      EXPECT_FALSE(c.failure.empty());
      EXPECT_TRUE(std::isnan(c.test_error));
      ++failed;
    } else {
      EXPECT_FALSE(c.failed);
    }
  }
  EXPECT_EQ(failed, 3);
  EXPECT_TRUE(std::isnan(r.median_error("factors", 10)));
  EXPECT_FALSE(std::isnan(r.median_error("one-matrix", 10)));
}

TEST(Sweep, JsonRoundTripIsLossless) {
  NsweepConfig cfg;
  cfg.spec = tiny_spec();
  cfg.n_values = {10, 20};
  cfg.seeds = {0, 1, 2};
  cfg.methods = {Method::factors, Method::one_matrix};
  cfg.fit.max_iters = 50;
  SweepResult r = run_nsweep(cfg);
  r.cells[0].failed = true;
  r.cells[0].failure = "forced";
  r.cells[0].test_error = std::nan("");
  const std::string text = sweep_to_json(r);
  const SweepResult back = sweep_from_json(text);
  EXPECT_EQ(sweep_to_json(back), text);
  ASSERT_EQ(back.cells.size(), r.cells.size());
  for (std::size_t i = 1; i < r.cells.size(); ++i) {
    EXPECT_EQ(back.cells[i].test_error, r.cells[i].test_error);
    EXPECT_EQ(back.cells[i].seconds, r.cells[i].seconds);
  }
  EXPECT_TRUE(back.cells[0].failed);
  EXPECT_TRUE(std::isnan(back.cells[0].test_error));
  EXPECT_EQ(back.seeds, r.seeds);
  EXPECT_EQ(back.config, r.config);
  EXPECT_THROW(sweep_from_json("{}"), ValidationError);
}

TEST(Sweep, CsvAndSvgOutputs) {
  SweepResult r;
  r.kind = "nsweep";
  r.axis_name = "n";
  r.axis = {10, 20};
  r.seeds = {0};
  for (double n : r.axis) {
    SweepCell c;
    c.method = "factors";
    c.p = 5;
    c.K = 2;
    c.n = static_cast<Eigen::Index>(n);
    c.test_error = 1.0 / n;
    r.cells.push_back(c);
  }
  const std::string csv = sweep_to_csv(r);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "method,p,K,n,seed,test_error,train_error,seconds,status");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 2);
  const std::string svg = sweep_to_svg(r);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("polyline"), std::string::npos);
}

TEST(RuntimeGrid, OneCellPerPair) {
  const SweepResult r = run_runtime_grid({8, 12}, {2, 3}, 10, 3, 1);
  ASSERT_EQ(r.cells.size(), 4u);
  for (const auto& c : r.cells) {
    EXPECT_FALSE(c.failed) << c.failure;
    EXPECT_GT(c.seconds, 0.0);
  }
  EXPECT_GT(r.median_seconds(12, 3), 0.0);
  EXPECT_THROW(run_runtime_grid({}, {2}, 10, 3), ValidationError);
}

TEST(ConvergenceTrace, NoiselessRecoveryIsLinear) {
  SynthSpec s;
  s.p = 12;
  s.K = 2;
  s.n = 30;
  s.seed = 3;
  TraceConfig cfg;
  cfg.start_perturbation = 0.3;
  const ConvergenceTrace t = run_convergence_trace(s, true, cfg);
  EXPECT_LE(t.plateau, 1e-8);
  EXPECT_LT(t.slope, 0.0);
  EXPECT_LT(t.max_ratio, 1.0);
  EXPECT_GT(t.window_end - t.window_begin, 2);
  EXPECT_LT(t.grad_norm_at_truth, 1e-10);
}

TEST(ConvergenceTrace, StartAtTruthStaysFlat) {
  SynthSpec s;
  s.p = 10;
  s.K = 2;
  s.n = 20;
  TraceConfig cfg;
  cfg.start_at_truth = true;
  cfg.fit.max_iters = 50;
  const ConvergenceTrace t = run_convergence_trace(s, true, cfg);
  for (double d : t.report.dist_trace) EXPECT_LT(d, 1e-20);
}

TEST(ConvergenceTrace, NoisyPlateauShrinksWithN) {
  std::vector<double> small, large;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    SynthSpec s;
    s.p = 15;
    s.K = 2;
    s.seed = seed;
    s.n = 20;
    small.push_back(run_convergence_trace(s, false).plateau);
    s.n = 160;
    large.push_back(run_convergence_trace(s, false).plateau);
  }
  std::sort(small.begin(), small.end());
  std::sort(large.begin(), large.end());
  EXPECT_LT(large[1], small[1]);
}
