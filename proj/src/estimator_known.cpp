#include "topicnet/estimator_known.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "topicnet/errors.hpp"
#include "topicnet/numerics.hpp"

namespace topicnet {
namespace {

GradientRoute resolve(GradientRoute route, const Dataset& ds) {
  if (route != GradientRoute::automatic) return route;
  return ds.masked() ? GradientRoute::per_observation : GradientRoute::moments;
}

bool relative_change_below(double previous, double current, double tol) {
  return std::abs(previous - current) <=
         tol * std::max(std::abs(previous), std::numeric_limits<double>::min());
}

void check_topics(const Dataset& ds, const Matrix& topics) {
  if (topics.rows() != static_cast<Eigen::Index>(ds.size())) {
    throw DimensionError("topic matrix has " + std::to_string(topics.rows()) + " rows for " +
                         std::to_string(ds.size()) + " observations");
  }
  if (ds.size() == 0) throw ValidationError("dataset has no observations");
  validate_topic_matrix(topics);
}

}  // namespace

Eigen::Index default_sparsity(Eigen::Index nodes, double topics_per_node) {
  return static_cast<Eigen::Index>(std::llround(2.0 * static_cast<double>(nodes) * topics_per_node));
}

Eigen::Index sparsity_from_truth(const FactorPair& truth) {
  return 2 * std::max(count_nonzeros(truth.influence), count_nonzeros(truth.receptivity));
}

void validate_config(const FitConfig& cfg, Eigen::Index k) {
  if (cfg.sparsity != 0 && cfg.sparsity < k) {
    throw ValidationError("sparsity " + std::to_string(cfg.sparsity) + " is below K = " +
                          std::to_string(k));
  }
  if (cfg.step && !(*cfg.step > 0.0 && std::isfinite(*cfg.step))) {
    throw ValidationError("step size must be positive");
  }
  if (!(cfg.lambda > 0.0)) throw ValidationError("lambda must be positive");
  if (cfg.max_iters < 0) throw ValidationError("max_iters must be nonnegative");
  if (cfg.tol < 0.0) throw ValidationError("tol must be nonnegative");
}

FactorObjective::FactorObjective(const Dataset& ds, const Matrix& topics, GradientRoute route,
                                 Execution exec)
    : dataset_(&ds), topics_(topics), route_(resolve(route, ds)), exec_(exec) {
  if (route_ == GradientRoute::moments) {
    if (ds.masked()) throw ValidationError("the moments route cannot honor observation masks");
    moments_ = topic_moments(ds, topics_, exec_);
    topic_gram_ = hessian_topics(topics_);
  }
}

FactorObjective::Value FactorObjective::evaluate(const FactorPair& f) const {
  if (route_ == GradientRoute::per_observation) {
    FactorResiduals r = factor_residuals(f, *dataset_, topics_, exec_);
    return {r.loss, {std::move(r.grad_influence), std::move(r.grad_receptivity)}};
  }
  const Eigen::Index k = f.topics();
  if (k != topic_gram_.rows()) throw DimensionError("factor K does not match the topic matrix");
  Matrix data_term1(f.nodes(), k);
  Matrix data_term2(f.nodes(), k);
  double cross = 0.0;
  for (Eigen::Index c = 0; c < k; ++c) {
    const Matrix& s = moments_.weighted_means[static_cast<std::size_t>(c)];
    data_term1.col(c).noalias() = s * f.receptivity.col(c);
    data_term2.col(c).noalias() = s.transpose() * f.influence.col(c);
    cross += f.influence.col(c).dot(data_term1.col(c));
  }
  const Matrix gram1 = f.influence.transpose() * f.influence;
  const Matrix gram2 = f.receptivity.transpose() * f.receptivity;
  const Matrix mix1 = topic_gram_.cwiseProduct(gram2);
  const Matrix mix2 = topic_gram_.cwiseProduct(gram1);
  Value out;
  out.loss = moments_.half_mean_square - cross + 0.5 * mix1.cwiseProduct(gram1).sum();
  out.gradient.influence = f.influence * mix1 - data_term1;
  out.gradient.receptivity = f.receptivity * mix2 - data_term2;
  return out;
}

RelaxationResult solve_relaxation(const Dataset& ds, const Matrix& topics, int max_iters,
                                  double tol, const Execution& exec) {
  check_topics(ds, topics);
  const auto k = static_cast<std::size_t>(topics.cols());
  const Eigen::Index p = ds.nodes;
  RelaxationResult res;
  res.thetas.assign(k, Matrix::Zero(p, p));

  const bool moments = !ds.masked();
  TopicMoments mom;
  Matrix gram;
  if (moments) {
    mom = topic_moments(ds, topics, exec);
    gram = hessian_topics(topics);
  }
  auto gradient = [&](const ThetaStack& thetas) {
    if (!moments) return theta_residuals(thetas, ds, topics, exec).gradient;
    ThetaStack g(k);
    for (std::size_t a = 0; a < k; ++a) {
      g[a] = -mom.weighted_means[a];
      for (std::size_t b = 0; b < k; ++b) {
        g[a] += gram(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * thetas[b];
      }
    }
    return g;
  };
  auto norm_of = [](const ThetaStack& g) {
    double sq = 0.0;
    for (const auto& m : g) sq += m.squaredNorm();
    return std::sqrt(sq);
  };

  ThetaStack g = gradient(res.thetas);
  const double g0 = norm_of(g);
  res.grad_norm = g0;
  if (g0 == 0.0) {
    res.converged = true;
    return res;
  }
  for (int it = 1; it <= max_iters; ++it) {
    for (std::size_t a = 0; a < k; ++a) res.thetas[a] -= g[a];  // unit step = 1 / L_Θ bound
    g = gradient(res.thetas);
    res.grad_norm = norm_of(g);
    res.iterations = it;
    if (!std::isfinite(res.grad_norm) || res.grad_norm > 1e8 * g0) {
      throw ConvergenceError("convex relaxation diverged at iteration " + std::to_string(it));
    }
    if (res.grad_norm <= tol * g0) {
      res.converged = true;
      break;
    }
  }
  return res;
}

FactorPair factors_from_thetas(const ThetaStack& thetas) {
  if (thetas.empty()) throw DimensionError("empty theta stack");
  const Eigen::Index p = thetas.front().rows();
  const auto k = static_cast<Eigen::Index>(thetas.size());
  FactorPair f = FactorPair::zeros(p, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const SvdTriple svd = truncated_svd(thetas[static_cast<std::size_t>(c)], 1);
    const double root = std::sqrt(svd.S(0));
    f.influence.col(c) = svd.U.col(0) * root;
    f.receptivity.col(c) = svd.V.col(0) * root;
  }
  f.influence = clamp_nonneg(f.influence);
  f.receptivity = clamp_nonneg(f.receptivity);
  return f;
}

FactorPair init_convex(const Dataset& ds, const Matrix& topics, Eigen::Index k, int relax_iters,
                       double relax_tol, const Execution& exec) {
  if (topics.cols() != k) throw DimensionError("topic matrix does not have K columns");
  const RelaxationResult relax = solve_relaxation(ds, topics, relax_iters, relax_tol, exec);
  return factors_from_thetas(relax.thetas);
}

double auto_step_size(const FactorPair& start, double mu_theta, double L_theta) {
  Matrix joined(start.nodes(), 2 * start.topics());
  joined << start.influence, start.receptivity;
  const double norm = joined.size() == 0 ? 0.0 : spectral_norm(joined);
  if (!(norm > 0.0)) throw NumericError("step size undefined for an all-zero initialization");
  return 1.0 / (16.0 * norm * norm) * std::min(1.0 / (2.0 * (mu_theta + L_theta)), 1.0);
}

std::pair<double, double> topic_curvature(const Matrix& topics) {
  const Vector ev = psd_eigenvalues(hessian_topics(topics));
  return {std::max(0.0, ev.minCoeff()), ev.maxCoeff()};
}

double subspace_distance(const FactorPair& est, const FactorPair& truth) {
  if (est.influence.rows() != truth.influence.rows() ||
      est.influence.cols() != truth.influence.cols() ||
      est.receptivity.rows() != truth.receptivity.rows() ||
      est.receptivity.cols() != truth.receptivity.cols()) {
    throw DimensionError("subspace_distance: factor shapes differ");
  }
  double total = 0.0;
  for (Eigen::Index k = 0; k < est.topics(); ++k) {
    const double same = (est.influence.col(k) - truth.influence.col(k)).squaredNorm() +
                        (est.receptivity.col(k) - truth.receptivity.col(k)).squaredNorm();
    const double flipped = (est.influence.col(k) + truth.influence.col(k)).squaredNorm() +
                           (est.receptivity.col(k) + truth.receptivity.col(k)).squaredNorm();
    total += std::min(same, flipped);
  }
  return total;
}

KnownFit fit_known(const Dataset& ds, const Matrix& topics, const FitConfig& cfg,
                   std::optional<FactorPair> start, const FactorPair* reference) {
  check_topics(ds, topics);
  const Eigen::Index k = topics.cols();
  validate_config(cfg, k);

  KnownFit out;
  out.factors = start ? std::move(*start)
                      : init_convex(ds, topics, k, cfg.relax_iters, cfg.relax_tol, cfg.exec);
  FactorPair& b = out.factors;
  if (b.nodes() != ds.nodes || b.topics() != k) {
    throw DimensionError("starting factors do not match the dataset and topic matrix");
  }
  FitReport& rep = out.report;
  rep.sparsity = cfg.sparsity != 0 ? cfg.sparsity : default_sparsity(ds.nodes);
  if (cfg.step) {
    rep.step = *cfg.step;
  } else {
    const auto [mu, L] = topic_curvature(topics);
    rep.step = auto_step_size(b, mu, L);
  }
  const double eta = rep.step;
  const Eigen::Index s = rep.sparsity;

  const FactorObjective objective(ds, topics, cfg.route, cfg.exec);
  FactorObjective::Value value = objective.evaluate(b);
  double previous = value.loss + regularizer_balance(b, cfg.lambda);
  rep.initial_loss = previous;
  if (reference) rep.initial_distance = subspace_distance(b, *reference);

  const auto t0 = std::chrono::steady_clock::now();
  for (int t = 1; t <= cfg.max_iters; ++t) {
    const FactorGradient reg = grad_balance(b, cfg.lambda);
    Matrix next1 = hard_threshold(
        clamp_nonneg(b.influence - eta * (value.gradient.influence + reg.influence)), s);
    Matrix next2 = hard_threshold(
        clamp_nonneg(b.receptivity - eta * (value.gradient.receptivity + reg.receptivity)), s);
    b.influence = std::move(next1);
    b.receptivity = std::move(next2);

    value = objective.evaluate(b);
    const double current = value.loss + regularizer_balance(b, cfg.lambda);
    if (!std::isfinite(current)) {
      throw NumericError("objective became non-finite at iteration " + std::to_string(t));
    }
    rep.loss_trace.push_back(current);
    if (reference) rep.dist_trace.push_back(subspace_distance(b, *reference));
    rep.iters_run = t;
    if (relative_change_below(previous, current, cfg.tol)) {
      rep.converged = true;
      break;
    }
    previous = current;
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace topicnet
