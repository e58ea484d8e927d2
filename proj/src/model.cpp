#include "topicnet/model.hpp"

#include <cmath>
#include <string>

#include "topicnet/errors.hpp"

namespace topicnet {
namespace {

void check_shapes(const FactorPair& f, const Vector& m) {
  if (f.influence.rows() != f.receptivity.rows() || f.influence.cols() != f.receptivity.cols()) {
    throw DimensionError("influence and receptivity matrices differ in shape");
  }
  if (m.size() != f.topics()) {
    throw DimensionError("topic vector has length " + std::to_string(m.size()) + ", expected " +
                         std::to_string(f.topics()));
  }
}

}  // namespace

Matrix forward(const FactorPair& f, const Vector& m) {
  check_shapes(f, m);
  validate_topic_distribution(m);
  return (f.influence * m.asDiagonal()) * f.receptivity.transpose();
}

Matrix forward_nodiag(const FactorPair& f, const Vector& m) {
  Matrix out = forward(f, m);
  out.diagonal().setZero();
  return out;
}

Matrix forward_masked(const FactorPair& f, const Vector& m, const Matrix& mask) {
  if (mask.rows() != f.nodes() || mask.cols() != f.nodes()) {
    throw DimensionError("mask shape does not match node count");
  }
  validate_binary(mask, "mask");
  return forward(f, m).cwiseProduct(mask);
}

Matrix forward_thetas(const ThetaStack& thetas, const Vector& m) {
  if (static_cast<Eigen::Index>(thetas.size()) != m.size() || thetas.empty()) {
    throw DimensionError("theta stack and topic vector disagree on K");
  }
  Matrix out = Matrix::Zero(thetas.front().rows(), thetas.front().cols());
  for (std::size_t k = 0; k < thetas.size(); ++k) out += m(static_cast<Eigen::Index>(k)) * thetas[k];
  return out;
}

std::vector<Matrix> predict_dataset(const FactorPair& f, const Dataset& ds, const Matrix& topics) {
  if (topics.rows() != static_cast<Eigen::Index>(ds.size())) {
    throw ValidationError("topic matrix has " + std::to_string(topics.rows()) + " rows for " +
                          std::to_string(ds.size()) + " observations");
  }
  std::vector<Matrix> out;
  out.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Vector m = topics.row(static_cast<Eigen::Index>(i)).transpose();
    const auto& mask = ds.observations[i].mask;
    out.push_back(mask ? forward_masked(f, m, *mask) : forward(f, m));
  }
  return out;
}

FactorPair balance_columns(const FactorPair& f) {
  FactorPair out = f;
  for (Eigen::Index k = 0; k < f.topics(); ++k) {
    const double n1 = f.influence.col(k).norm();
    const double n2 = f.receptivity.col(k).norm();
    if (n1 == 0.0 || n2 == 0.0) continue;
    const double gamma = std::sqrt(n2 / n1);
    out.influence.col(k) *= gamma;
    out.receptivity.col(k) /= gamma;
  }
  return out;
}

}  // namespace topicnet
