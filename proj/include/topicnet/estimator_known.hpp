#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "topicnet/kernels.hpp"
#include "topicnet/objective.hpp"
#include "topicnet/types.hpp"

namespace topicnet {

/// How the data-fit gradient is accumulated.
///  - per_observation: the kernels in kernels.hpp, O(n p² K) per evaluation; required with masks.
///  - moments: precomputes S_k = (1/n) Σ m_ik X_i once, then O(p² K + p K²) per evaluation.
///  - automatic: moments for unmasked data, per_observation otherwise.
enum class GradientRoute { automatic, per_observation, moments };

struct FitConfig {
  Eigen::Index sparsity = 0;  ///< hard-threshold level per factor matrix; 0 picks a default
  std::optional<double> step; ///< unset = auto_step_size()
  double lambda = 1.0;
  int max_iters = 20000;
  double tol = 1e-10;         ///< relative change of the objective
  std::uint64_t seed = 0;
  GradientRoute route = GradientRoute::automatic;
  Execution exec;
  int relax_iters = 5000;
  double relax_tol = 1e-10;
};

struct FitReport {
  std::vector<double> loss_trace;  ///< loss + balance regularizer after each iteration
  std::vector<double> dist_trace;  ///< d²(B⁽ᵗ⁾, reference) when a reference was supplied
  int iters_run = 0;
  double wall_time = 0.0;          ///< seconds spent in the iteration loop
  bool converged = false;
  double step = 0.0;
  Eigen::Index sparsity = 0;
  double initial_loss = 0.0;
  std::optional<double> initial_distance;
};

/// Sparsity used when no ground truth is known: 2 · p · (average topics per node).
Eigen::Index default_sparsity(Eigen::Index nodes, double topics_per_node = 2.0);
/// Twice the larger nonzero count of the two true factor matrices.
Eigen::Index sparsity_from_truth(const FactorPair& truth);

void validate_config(const FitConfig& cfg, Eigen::Index topics);

/// Loss value and gradient of the data-fit term, evaluated along one of the gradient routes.
class FactorObjective {
 public:
  FactorObjective(const Dataset& dataset, const Matrix& topics,
                  GradientRoute route = GradientRoute::automatic, Execution exec = {});

  struct Value {
    double loss = 0.0;
    FactorGradient gradient;
  };
  Value evaluate(const FactorPair& factors) const;
  GradientRoute route() const { return route_; }

 private:
  const Dataset* dataset_;
  Matrix topics_;
  GradientRoute route_;
  Execution exec_;
  TopicMoments moments_;
  Matrix topic_gram_;
};

struct RelaxationResult {
  ThetaStack thetas;
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

/// Gradient descent with unit step on the unconstrained theta loss, starting from Θ = 0, until
/// the gradient norm falls below `tol` times its initial value.
RelaxationResult solve_relaxation(const Dataset& dataset, const Matrix& topics, int max_iters,
                                  double tol, const Execution& exec = {});

/// Factors from the convex relaxation: rank-1 SVD of each Θ̂_k, split as u√s and v√s, then
/// clamped to the nonnegative orthant.
FactorPair init_convex(const Dataset& dataset, const Matrix& topics, Eigen::Index topics_count,
                       int relax_iters = 5000, double relax_tol = 1e-10,
                       const Execution& exec = {});

/// Rank-one factors from each theta matrix (shared by both initializers).
FactorPair factors_from_thetas(const ThetaStack& thetas);

/// η = 1 / (16 ||[B1, B2]||₂²) · min(1 / (2(μ_Θ + L_Θ)), 1).
double auto_step_size(const FactorPair& start, double mu_theta, double L_theta);

/// Extreme eigenvalues (μ_Θ, L_Θ) of H_Θ for a topic matrix.
std::pair<double, double> topic_curvature(const Matrix& topics);

/// min over per-column signs of Σ_k ||b1_k − o_k b1*_k||² + ||b2_k − o_k b2*_k||².
double subspace_distance(const FactorPair& estimate, const FactorPair& truth);

struct KnownFit {
  FactorPair factors;
  FitReport report;
};

/// Alternating proximal gradient descent with nonnegativity clamping and hard thresholding.
/// Both half-steps use the gradients at the current iterate. Stops after cfg.max_iters
/// iterations or when the relative change of the objective drops below cfg.tol.
/// `reference`, when given, is used only to fill the distance trace.
KnownFit fit_known(const Dataset& dataset, const Matrix& topics, const FitConfig& cfg,
                   std::optional<FactorPair> start = std::nullopt,
                   const FactorPair* reference = nullptr);

}  // namespace topicnet
