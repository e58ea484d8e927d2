#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace topicnet {

/// Dense row-major storage used for every p×p and p×K quantity.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Tolerance on the row sums of topic distributions.
inline constexpr double kSimplexTolerance = 1e-9;

/// Influence (B1) and receptivity (B2) node-topic matrices, both p×K and nonnegative.
struct FactorPair {
  Matrix influence;
  Matrix receptivity;

  FactorPair() = default;
  FactorPair(Matrix b1, Matrix b2) : influence(std::move(b1)), receptivity(std::move(b2)) {}

  static FactorPair zeros(Eigen::Index nodes, Eigen::Index topics) {
    return {Matrix::Zero(nodes, topics), Matrix::Zero(nodes, topics)};
  }

  Eigen::Index nodes() const { return influence.rows(); }
  Eigen::Index topics() const { return influence.cols(); }
};

enum class ObservationKind { real, binary };

/// One observed adjacency matrix X_i with its optional topic distribution and author mask.
struct Observation {
  Matrix values;
  ObservationKind kind = ObservationKind::real;
  std::optional<Vector> topics;
  std::optional<Matrix> mask;
};

struct Dataset {
  Eigen::Index nodes = 0;
  Eigen::Index topics = 0;
  std::vector<Observation> observations;
  bool topics_known = false;

  std::size_t size() const { return observations.size(); }
  bool masked() const;

  /// n×K matrix stacking the per-observation topic vectors. Requires topics_known.
  Matrix topic_matrix() const;
  /// Replaces the per-observation topics with the rows of `topics` and marks them known.
  void set_topics(const Matrix& topics);
};

/// K matrices Θ_1..Θ_K, each p×p.
using ThetaStack = std::vector<Matrix>;

/// Throws ValidationError unless `m` is nonnegative and sums to one within kSimplexTolerance.
void validate_topic_distribution(const Vector& m);
/// Row-wise validate_topic_distribution on an n×K matrix.
void validate_topic_matrix(const Matrix& topics);
/// Throws ValidationError unless every entry is 0 or 1.
void validate_binary(const Matrix& values, const char* what);
/// Checks shapes, kinds, masks and topic rows of a whole dataset.
void validate_dataset(const Dataset& dataset);

/// Θ_k = b1_k b2_kᵀ for every k.
ThetaStack thetas_from_factors(const FactorPair& factors);

/// Number of entries with nonzero value.
Eigen::Index count_nonzeros(const Matrix& m);

}  // namespace topicnet
