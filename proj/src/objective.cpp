#include "topicnet/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "topicnet/errors.hpp"
#include "topicnet/numerics.hpp"

namespace topicnet {

double loss_factors(const FactorPair& f, const Dataset& ds, const Matrix& topics,
                    const Execution& exec) {
  return factor_residuals(f, ds, topics, exec).loss;
}

double loss_theta(const ThetaStack& thetas, const Dataset& ds, const Matrix& topics,
                  const Execution& exec) {
  return theta_residuals(thetas, ds, topics, exec).loss;
}

double regularizer_balance(const FactorPair& f, double lambda) {
  const Eigen::ArrayXd gap =
      f.influence.colwise().squaredNorm().array() - f.receptivity.colwise().squaredNorm().array();
  return 0.5 * lambda * gap.square().sum();
}

double regularizer_l1(const FactorPair& f, double lambda) {
  return lambda * (f.influence.sum() + f.receptivity.sum());
}

FactorGradient grad_factors(const FactorPair& f, const Dataset& ds, const Matrix& topics,
                            const Execution& exec) {
  FactorResiduals r = factor_residuals(f, ds, topics, exec);
  return {std::move(r.grad_influence), std::move(r.grad_receptivity)};
}

FactorGradient grad_balance(const FactorPair& f, double lambda) {
  const Eigen::RowVectorXd gap =
      f.influence.colwise().squaredNorm() - f.receptivity.colwise().squaredNorm();
  const Eigen::RowVectorXd scale = 2.0 * lambda * gap;
  return {f.influence * scale.asDiagonal(), -(f.receptivity * scale.asDiagonal())};
}

Vector grad_topics(const ThetaStack& thetas, const Observation& obs, const Vector& m) {
  if (static_cast<Eigen::Index>(thetas.size()) != m.size()) {
    throw DimensionError("grad_topics: theta stack and topic vector disagree on K");
  }
  Matrix r = obs.values;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    if (thetas[k].rows() != r.rows() || thetas[k].cols() != r.cols()) {
      throw DimensionError("grad_topics: theta shape does not match the observation");
    }
    r -= m(static_cast<Eigen::Index>(k)) * thetas[k];
  }
  if (obs.mask) r.array() *= obs.mask->array();
  Vector g(m.size());
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    g(static_cast<Eigen::Index>(k)) = -r.cwiseProduct(thetas[k]).sum();
  }
  return g;
}

Matrix hessian_topics(const Matrix& topics) {
  if (topics.rows() == 0) throw ValidationError("hessian_topics: no observations");
  Matrix h = topics.transpose() * topics / static_cast<double>(topics.rows());
  return 0.5 * (h + h.transpose());
}

Matrix hessian_M(const ThetaStack& thetas) {
  const auto k = static_cast<Eigen::Index>(thetas.size());
  Matrix h(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a; b < k; ++b) {
      const double v = thetas[static_cast<std::size_t>(a)]
                           .cwiseProduct(thetas[static_cast<std::size_t>(b)])
                           .sum();
      h(a, b) = v;
      h(b, a) = v;
    }
  }
  return h;
}

Matrix hessian_M(const FactorPair& f) {
  Matrix h = (f.influence.transpose() * f.influence)
                 .cwiseProduct(f.receptivity.transpose() * f.receptivity);
  return 0.5 * (h + h.transpose());
}

ConditionReport check_conditions(const FactorPair& truth, const Matrix& topics) {
  if (topics.cols() != truth.topics()) {
    throw DimensionError("check_conditions: topic matrix and factors disagree on K");
  }
  ConditionReport rep;
  const Vector spectrum_theta = psd_eigenvalues(hessian_topics(topics));
  rep.L_theta = spectrum_theta.maxCoeff();
  rep.mu_theta = std::max(0.0, spectrum_theta.minCoeff());
  const Vector spectrum_m = psd_eigenvalues(hessian_M(truth));
  rep.mu_M = std::max(0.0, spectrum_m.minCoeff());

  const Vector topic_mass = topics.colwise().mean().transpose();
  const QrResult q1 = qr_decompose(truth.influence);
  const QrResult q2 = qr_decompose(truth.receptivity);
  rep.qr_rank_deficient = q1.rank_deficient || q2.rank_deficient;
  Matrix core = q1.R * topic_mass.asDiagonal() * q2.R.transpose();
  core.diagonal().setZero();
  rep.rho0 = core.norm();
  rep.eta_oc = static_cast<double>(truth.topics()) * topic_mass.maxCoeff();

  for (Eigen::Index k = 0; k < truth.topics(); ++k) {
    rep.sigma_max = std::max(rep.sigma_max,
                             truth.influence.col(k).norm() * truth.receptivity.col(k).norm());
  }
  rep.s_star = std::max(count_nonzeros(truth.influence), count_nonzeros(truth.receptivity));
  return rep;
}

double stat_error_M(const std::vector<Matrix>& errors, const ThetaStack& thetas) {
  if (errors.empty()) return 0.0;
  double total = 0.0;
  for (const auto& e : errors) {
    for (const auto& t : thetas) {
      if (t.rows() != e.rows() || t.cols() != e.cols()) {
        throw DimensionError("stat_error_M: error and theta shapes differ");
      }
      const double inner = e.cwiseProduct(t).sum();
      total += inner * inner;
    }
  }
  return total / static_cast<double>(errors.size());
}

double grad_norm_at_truth(const ThetaStack& thetas, const Dataset& ds, const Matrix& topics,
                          const Execution& exec) {
  const ThetaResiduals r = theta_residuals(thetas, ds, topics, exec);
  double sq = 0.0;
  for (const auto& g : r.gradient) sq += g.squaredNorm();
  return std::sqrt(sq);
}

}  // namespace topicnet
