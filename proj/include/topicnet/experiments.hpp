#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "topicnet/baselines.hpp"
#include "topicnet/estimator_joint.hpp"
#include "topicnet/estimator_known.hpp"
#include "topicnet/synthgen.hpp"

namespace topicnet {

enum class Method { factors, one_matrix, k_matrices };

std::string method_name(Method method);
/// Accepts "factors" (alias "ours"), "one-matrix" and "k-matrices".
Method parse_method(const std::string& name);

/// One (method, grid point, seed) measurement. Failed cells keep NaN errors and a message.
struct SweepCell {
  std::string method;
  Eigen::Index p = 0;
  Eigen::Index K = 0;
  Eigen::Index n = 0;
  std::uint64_t seed = 0;
  double test_error = 0.0;
  double train_error = 0.0;
  double seconds = 0.0;
  bool failed = false;
  std::string failure;
};

struct SweepResult {
  std::string kind;                  ///< "nsweep" or "runtime"
  std::string axis_name;             ///< "n" for n-sweeps, "p,K" for runtime grids
  std::vector<double> axis;
  std::vector<std::uint64_t> seeds;
  std::vector<SweepCell> cells;
  std::map<std::string, std::string> config;

  /// Median test error (nsweep) or seconds (runtime) over the non-failed cells matching the
  /// method and filter; NaN when none match.
  double median_error(const std::string& method, Eigen::Index n) const;
  double median_seconds(Eigen::Index p, Eigen::Index K) const;
};

struct NsweepConfig {
  SynthSpec spec;                    ///< p, K, noise and kind; n and seed are overridden per cell
  std::vector<Eigen::Index> n_values{20, 30, 50, 80, 120, 200};
  std::vector<Method> methods{Method::factors, Method::one_matrix, Method::k_matrices};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  bool known_topics = true;
  Eigen::Index min_test = 50;        ///< test size is max(min_test, n)
  FitConfig fit;                     ///< sparsity 0 = twice the true nonzero count
  JointConfig joint;
  KMatricesJointConfig k_joint;
  Eigen::Index baseline_threshold = 0;  ///< 0 = 4p
};

/// For every (n, seed): ground truth from the truth stream, training data from the training
/// stream and the first max(min_test, n) observations of one test pool per seed, drawn from the
/// test stream and sized for the largest n. Every method is fitted
/// on the training split and scored on the test split. Unknown-topic runs infer the test topics
/// from the fitted model. Failures are recorded per cell and the sweep continues.
SweepResult run_nsweep(const NsweepConfig& cfg);

/// Per-iteration wall time of the known-topic fit along the per-observation gradient route,
/// median over `repeats`, for every (p, K) pair.
SweepResult run_runtime_grid(const std::vector<Eigen::Index>& p_values,
                             const std::vector<Eigen::Index>& K_values, Eigen::Index n, int T,
                             int repeats = 3, std::uint64_t seed = 0);

struct TraceConfig {
  FitConfig fit;                 ///< sparsity 0 = twice the true nonzero count
  double start_perturbation = 0; ///< entries of the start multiplied by Uniform(1 ± this)
  bool start_at_truth = false;
};

struct ConvergenceTrace {
  FitReport report;                 ///< dist_trace measured against the balanced truth
  double slope = 0.0;               ///< least-squares slope of ln d² over the window
  double intercept = 0.0;
  double fit_deviation = 0.0;       ///< max relative deviation of ln d² from the fitted line
  int window_begin = 0;             ///< window in trace indices, [begin, end)
  int window_end = 0;
  double max_ratio = 0.0;           ///< largest d²(t+1)/d²(t) inside the window
  double plateau = 0.0;             ///< final d²
  double grad_norm_at_truth = 0.0;
};

/// Known-topic fit on a generated instance, recording d² to the balanced ground truth at every
/// iteration. `noiseless` switches off every corruption of the spec.
ConvergenceTrace run_convergence_trace(const SynthSpec& spec, bool noiseless,
                                       const TraceConfig& cfg = {});

/// Least-squares line through (t, ln values[t]) for t in [begin, end) and the contraction
/// statistics used by run_convergence_trace.
void fit_log_linear(const std::vector<double>& values, int begin, int end, ConvergenceTrace& out);

std::string sweep_to_json(const SweepResult& result);
SweepResult sweep_from_json(const std::string& text);
std::string sweep_to_csv(const SweepResult& result);
/// Median test error against n, one polyline per method.
std::string sweep_to_svg(const SweepResult& result);

}  // namespace topicnet
