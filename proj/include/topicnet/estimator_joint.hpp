#pragma once

#include <optional>
#include <vector>

#include "topicnet/estimator_known.hpp"
#include "topicnet/types.hpp"

namespace topicnet {

struct MeanSvdInit {
  ThetaStack thetas;                      ///< Θ_k⁽⁰⁾ = K σ̃_k ũ_k ṽ_kᵀ
  FactorPair factors;                     ///< ũ_k (Kσ̃_k)^½ and ṽ_k (Kσ̃_k)^½, clamped
  std::vector<Eigen::Index> degenerate;   ///< components replaced by seeded random factors
};

/// Rank-K SVD of the mean observation, scaled by K.
MeanSvdInit init_mean_svd(const Dataset& dataset, Eigen::Index topics, std::uint64_t seed = 0);

/// Projected gradient descent on the simplex for mᵀ G m − 2 cᵀ m. Stops when an iterate moves
/// less than `tol` or after `iters` steps; returns the best iterate seen.
Vector minimize_topic_quadratic(const Matrix& gram, const Vector& linear, const Vector& start,
                                double step, int iters, double tol);

/// The quadratic (G, c) whose minimization over the simplex is the per-observation topic
/// problem min ||X − B1 diag(m) B2ᵀ||² (masked when the observation has a mask).
struct TopicQuadratic {
  Matrix gram;
  Vector linear;
};
TopicQuadratic topic_quadratic(const FactorPair& factors, const Observation& obs);
TopicQuadratic topic_quadratic(const ThetaStack& thetas, const Observation& obs);

/// Topic distribution for one observation with the factors held fixed. `step` defaults to
/// 1 / (2 λ_max(G)).
Vector estimate_topics(const FactorPair& factors, const Observation& obs, const Vector& start,
                       std::optional<double> step = std::nullopt, int iters = 200,
                       double tol = 1e-10);

/// estimate_topics for every observation, each started from the uniform distribution.
Matrix infer_topics(const FactorPair& factors, const Dataset& dataset, int iters = 200,
                    double tol = 1e-10);

/// Permutation π minimizing Σ_i Σ_k (m̂_ik − m*_{iπ(k)})², solved as a linear assignment.
std::vector<Eigen::Index> align_permutation(const Matrix& estimate, const Matrix& truth);

/// Column k of the result is column perm[k] of `m`.
Matrix permute_columns(const Matrix& m, const std::vector<Eigen::Index>& perm);
FactorPair permute_columns(const FactorPair& f, const std::vector<Eigen::Index>& perm);

/// (1/n) Σ_i Σ_k (m_ik − m*_ik)².
double distance_topics(const Matrix& estimate, const Matrix& truth);

struct JointConfig {
  FitConfig inner;           ///< B-step settings; inner.max_iters is the per-round budget
  double outer_tol = 1e-10;
  int max_outer = 500;
  int mstep_iters = 200;
  double mstep_tol = 1e-10;

  JointConfig() { inner.max_iters = 100; }
};

struct JointFitReport {
  int outer_iters = 0;
  std::vector<double> loss_trace;
  std::vector<double> dist_B_trace;
  std::vector<double> dist_M_trace;
  std::vector<Eigen::Index> permutation;
  std::vector<Eigen::Index> degenerate_components;
  bool converged = false;
  double wall_time = 0.0;
};

/// Factors with the n×K topic matrix they were fitted or generated with.
struct JointState {
  FactorPair factors;
  Matrix topics;
};

/// Ground truth for the distance traces; factors are compared as given, so pass balanced
/// factors for scale-free distances.
using JointTruth = JointState;

struct JointFit {
  FactorPair factors;
  Matrix topics;
  JointFitReport report;
};

/// Alternates a per-observation topic step with rounds of the known-topic factor updates,
/// starting from the mean-matrix initialization and uniform topics unless `start` is given.
JointFit fit_joint(const Dataset& dataset, Eigen::Index topics, const JointConfig& cfg,
                   const JointTruth* truth = nullptr, const JointState* start = nullptr);

}  // namespace topicnet
