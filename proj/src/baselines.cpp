#include "topicnet/baselines.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "topicnet/errors.hpp"
#include "topicnet/estimator_joint.hpp"
#include "topicnet/estimator_known.hpp"
#include "topicnet/model.hpp"
#include "topicnet/numerics.hpp"
#include "topicnet/objective.hpp"

namespace topicnet {
namespace {

Matrix threshold_or_keep(const Matrix& m, Eigen::Index threshold) {
  return threshold > 0 ? hard_threshold(m, threshold) : m;
}

Vector fit_row(const ThetaStack& thetas, const Observation& obs, const Vector& from, int iters,
               double tol) {
  const TopicQuadratic q = topic_quadratic(thetas, obs);
  const double top = psd_eigenvalues(q.gram)(0);
  if (!(top > 0.0)) return from;
  return minimize_topic_quadratic(q.gram, q.linear, from, 1.0 / (2.0 * top), iters, tol);
}

}  // namespace

Eigen::Index BaselineModel::nodes() const {
  if (mean) return mean->rows();
  if (thetas && !thetas->empty()) return thetas->front().rows();
  return 0;
}

Eigen::Index BaselineModel::parameter_count() const {
  const Eigen::Index k = thetas ? static_cast<Eigen::Index>(thetas->size()) : 1;
  return topicnet::parameter_count(variant, nodes(), k);
}

Eigen::Index default_baseline_threshold(Eigen::Index nodes) { return 4 * nodes; }

Eigen::Index parameter_count(BaselineVariant variant, Eigen::Index p, Eigen::Index k) {
  return variant == BaselineVariant::one_matrix ? p * p : p * p * k;
}

Eigen::Index factor_parameter_count(Eigen::Index p, Eigen::Index k) { return 2 * p * k; }

BaselineModel fit_one_matrix(const Dataset& ds, Eigen::Index threshold) {
  if (ds.size() == 0) throw ValidationError("fit_one_matrix: dataset has no observations");
  Matrix mean = Matrix::Zero(ds.nodes, ds.nodes);
  for (const auto& obs : ds.observations) {
    if (obs.values.rows() != ds.nodes || obs.values.cols() != ds.nodes) {
      throw DimensionError("fit_one_matrix: observation shape differs from p");
    }
    mean += obs.values;
  }
  mean /= static_cast<double>(ds.size());
  BaselineModel model;
  model.variant = BaselineVariant::one_matrix;
  double loss = 0.0;
  for (const auto& obs : ds.observations) {
    Matrix r = obs.values - mean;
    if (obs.mask) r.array() *= obs.mask->array();
    loss += r.squaredNorm();
  }
  model.training_loss = loss / (2.0 * static_cast<double>(ds.size()));
  model.mean = threshold_or_keep(mean, threshold);
  return model;
}

BaselineModel fit_k_matrices(const Dataset& ds, const Matrix& topics, Eigen::Index threshold,
                             int relax_iters, double relax_tol, const Execution& exec) {
  const RelaxationResult relax = solve_relaxation(ds, topics, relax_iters, relax_tol, exec);
  BaselineModel model;
  model.variant = BaselineVariant::k_matrices;
  model.training_loss = loss_theta(relax.thetas, ds, topics, exec);
  model.topic_curvature = topic_curvature(topics).first;
  model.iterations = relax.iterations;
  ThetaStack kept;
  kept.reserve(relax.thetas.size());
  for (const auto& t : relax.thetas) kept.push_back(threshold_or_keep(t, threshold));
  model.thetas = std::move(kept);
  return model;
}

BaselineModel fit_k_matrices_joint(const Dataset& ds, Eigen::Index k,
                                   const KMatricesJointConfig& cfg, const ThetaState* start) {
  if (ds.size() == 0) throw ValidationError("fit_k_matrices_joint: dataset has no observations");
  if (cfg.iters < 1) throw ValidationError("fit_k_matrices_joint: iters must be at least 1");
  const auto n = static_cast<Eigen::Index>(ds.size());
  ThetaStack thetas;
  Matrix topics;
  if (start) {
    if (static_cast<Eigen::Index>(start->thetas.size()) != k || start->topics.rows() != n ||
        start->topics.cols() != k) {
      throw DimensionError("fit_k_matrices_joint: starting point does not match the dataset");
    }
    validate_topic_matrix(start->topics);
    thetas = start->thetas;
    topics = start->topics;
  } else {
    thetas = init_mean_svd(ds, k, cfg.seed).thetas;
    topics = Matrix::Constant(n, k, 1.0 / static_cast<double>(k));
  }

  BaselineModel model;
  model.variant = BaselineVariant::k_matrices;
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= cfg.iters; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) {
      topics.row(i) = fit_row(thetas, ds.observations[static_cast<std::size_t>(i)],
                              topics.row(i).transpose(), cfg.mstep_iters, cfg.mstep_tol)
                          .transpose();
    }
    const double top = psd_eigenvalues(hessian_topics(topics))(0);
    const ThetaResiduals r = theta_residuals(thetas, ds, topics, cfg.exec);
    if (!std::isfinite(r.loss)) {
      throw NumericError("k-matrices fit became non-finite at iteration " + std::to_string(it));
    }
    model.iterations = it;
    if (it > 1 && std::abs(previous - r.loss) <=
                      cfg.tol * std::max(std::abs(previous), std::numeric_limits<double>::min())) {
      break;
    }
    previous = r.loss;
    for (std::size_t c = 0; c < thetas.size(); ++c) thetas[c] -= r.gradient[c] / top;
  }
  model.training_loss = loss_theta(thetas, ds, topics, cfg.exec);
  model.topic_curvature = topic_curvature(topics).first;
  for (auto& t : thetas) t = threshold_or_keep(t, cfg.threshold);
  model.thetas = std::move(thetas);
  model.topics = std::move(topics);
  return model;
}

Matrix infer_topics(const BaselineModel& model, const Dataset& ds, int iters, double tol) {
  if (!model.thetas) throw ValidationError("infer_topics: model has no theta matrices");
  const auto k = static_cast<Eigen::Index>(model.thetas->size());
  const Vector uniform = Vector::Constant(k, 1.0 / static_cast<double>(k));
  Matrix out(static_cast<Eigen::Index>(ds.size()), k);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) =
        fit_row(*model.thetas, ds.observations[i], uniform, iters, tol).transpose();
  }
  return out;
}

std::vector<Matrix> predict(const BaselineModel& model, const Dataset& ds, const Matrix* topics) {
  std::vector<Matrix> out;
  out.reserve(ds.size());
  if (model.variant == BaselineVariant::one_matrix) {
    if (!model.mean) throw ValidationError("one-matrix model has no mean matrix");
    if (model.mean->rows() != ds.nodes) throw DimensionError("model and dataset disagree on p");
    for (const auto& obs : ds.observations) {
      out.push_back(obs.mask ? Matrix(model.mean->cwiseProduct(*obs.mask)) : *model.mean);
    }
    return out;
  }
  if (!model.thetas) throw ValidationError("k-matrices model has no theta matrices");
  if (!topics) throw ValidationError("k-matrices predictions need a topic matrix");
  if (topics->rows() != static_cast<Eigen::Index>(ds.size())) {
    throw ValidationError("topic matrix has " + std::to_string(topics->rows()) + " rows for " +
                          std::to_string(ds.size()) + " observations");
  }
  if (topics->cols() != static_cast<Eigen::Index>(model.thetas->size())) {
    throw DimensionError("topic matrix and model disagree on K");
  }
  if (model.nodes() != ds.nodes) throw DimensionError("model and dataset disagree on p");
  for (std::size_t i = 0; i < ds.size(); ++i) {
    Matrix x = forward_thetas(*model.thetas, topics->row(static_cast<Eigen::Index>(i)).transpose());
    if (ds.observations[i].mask) x.array() *= ds.observations[i].mask->array();
    out.push_back(std::move(x));
  }
  return out;
}

double prediction_error(const std::vector<Matrix>& preds, const Dataset& ds) {
  if (preds.size() != ds.size()) {
    throw DimensionError("prediction_error: " + std::to_string(preds.size()) +
                         " predictions for " + std::to_string(ds.size()) + " observations");
  }
  if (ds.size() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& obs = ds.observations[i];
    if (preds[i].rows() != obs.values.rows() || preds[i].cols() != obs.values.cols()) {
      throw DimensionError("prediction_error: prediction shape differs from observation");
    }
    Matrix r = obs.values - preds[i];
    if (obs.mask) r.array() *= obs.mask->array();
    total += r.squaredNorm();
  }
  return total / static_cast<double>(ds.size());
}

}  // namespace topicnet
