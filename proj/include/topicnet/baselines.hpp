#pragma once

#include <optional>
#include <vector>

#include "topicnet/kernels.hpp"
#include "topicnet/types.hpp"

namespace topicnet {

enum class BaselineVariant { one_matrix, k_matrices };

/// Comparison estimators. one_matrix predicts the thresholded mean observation for every input;
/// k_matrices predicts Σ_k m_k Θ_k with one unconstrained p×p matrix per topic.
struct BaselineModel {
  BaselineVariant variant = BaselineVariant::one_matrix;
  std::optional<Matrix> mean;        ///< one_matrix only
  std::optional<ThetaStack> thetas;  ///< k_matrices only
  std::optional<Matrix> topics;      ///< learned n×K topics when they were unknown
  double training_loss = 0.0;        ///< before thresholding
  double topic_curvature = 0.0;      ///< μ_Θ of the training topics; 0 leaves some Θ_k undetermined
  int iterations = 0;

  Eigen::Index nodes() const;
  Eigen::Index parameter_count() const;
};

/// Default number of entries kept by the baselines: 4p.
Eigen::Index default_baseline_threshold(Eigen::Index nodes);

/// p² for one_matrix, p²K for k_matrices, 2pK for the factor model.
Eigen::Index parameter_count(BaselineVariant variant, Eigen::Index nodes, Eigen::Index topics);
Eigen::Index factor_parameter_count(Eigen::Index nodes, Eigen::Index topics);

/// Mean of the observations, hard-thresholded to `threshold` entries.
BaselineModel fit_one_matrix(const Dataset& dataset, Eigen::Index threshold);

/// Convex relaxation over unconstrained theta matrices (the solver behind init_convex), each
/// Θ_k then hard-thresholded to `threshold` entries.
BaselineModel fit_k_matrices(const Dataset& dataset, const Matrix& topics, Eigen::Index threshold,
                             int relax_iters = 5000, double relax_tol = 1e-10,
                             const Execution& exec = {});

struct KMatricesJointConfig {
  Eigen::Index threshold = 0;  ///< 0 keeps every entry
  int iters = 500;
  double tol = 1e-10;          ///< relative change of the training loss
  int mstep_iters = 50;
  double mstep_tol = 1e-10;
  std::uint64_t seed = 0;
  Execution exec;
};

/// Theta matrices with the topics they are paired with.
struct ThetaState {
  ThetaStack thetas;
  Matrix topics;
};

/// Alternates a projected gradient step on every topic row with a gradient step of size
/// 1 / λ_max(H_Θ) on the theta matrices. Starts from the mean-matrix SVD and uniform topics
/// unless `start` is given.
BaselineModel fit_k_matrices_joint(const Dataset& dataset, Eigen::Index topics,
                                   const KMatricesJointConfig& cfg,
                                   const ThetaState* start = nullptr);

/// Per-observation topics for a k_matrices model, fitted on the simplex from uniform starts.
Matrix infer_topics(const BaselineModel& model, const Dataset& dataset, int iters = 200,
                    double tol = 1e-10);

/// Predictions for every observation. `topics` supplies row i for observation i and is
/// required for k_matrices; masks are applied when present.
std::vector<Matrix> predict(const BaselineModel& model, const Dataset& dataset,
                            const Matrix* topics = nullptr);

/// (1/n) Σ ||X_i − X̂_i||_F², residuals masked where the observation has a mask.
double prediction_error(const std::vector<Matrix>& predictions, const Dataset& dataset);

}  // namespace topicnet
