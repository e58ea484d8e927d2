#include "topicnet/estimator_joint.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "topicnet/errors.hpp"
#include "topicnet/model.hpp"
#include "topicnet/numerics.hpp"
#include "topicnet/objective.hpp"
#include "topicnet/rng.hpp"

#ifdef TOPICNET_HAVE_OPENMP
#include <omp.h>
#endif

namespace topicnet {
namespace {

constexpr double kDegenerateSigma = 1e-12;

double objective_value(const Matrix& gram, const Vector& linear, const Vector& m) {
  return m.dot(gram * m) - 2.0 * linear.dot(m);
}

Vector unit_nonneg(Eigen::Index p, Rng& rng) {
  Vector v(p);
  for (Eigen::Index i = 0; i < p; ++i) v(i) = std::abs(rng.normal());
  const double n = v.norm();
  return n > 0.0 ? Vector(v / n) : Vector(Vector::Constant(p, 1.0 / std::sqrt(double(p))));
}

// Minimum-cost perfect assignment on a square cost matrix (shortest augmenting paths with
// potentials). Returns assign[row] = column.
std::vector<Eigen::Index> hungarian(const Matrix& cost) {
  const Eigen::Index n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0), v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<Eigen::Index> match(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
  for (Eigen::Index row = 1; row <= n; ++row) {
    match[0] = row;
    Eigen::Index col0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<bool> used(static_cast<std::size_t>(n + 1), false);
    do {
      used[static_cast<std::size_t>(col0)] = true;
      const Eigen::Index row0 = match[static_cast<std::size_t>(col0)];
      double delta = inf;
      Eigen::Index col1 = 0;
      for (Eigen::Index c = 1; c <= n; ++c) {
        const auto cs = static_cast<std::size_t>(c);
        if (used[cs]) continue;
        const double cur = cost(row0 - 1, c - 1) - u[static_cast<std::size_t>(row0)] - v[cs];
        if (cur < minv[cs]) {
          minv[cs] = cur;
          way[cs] = col0;
        }
        if (minv[cs] < delta) {
          delta = minv[cs];
          col1 = c;
        }
      }
      for (Eigen::Index c = 0; c <= n; ++c) {
        const auto cs = static_cast<std::size_t>(c);
        if (used[cs]) {
          u[static_cast<std::size_t>(match[cs])] += delta;
          v[cs] -= delta;
        } else {
          minv[cs] -= delta;
        }
      }
      col0 = col1;
    } while (match[static_cast<std::size_t>(col0)] != 0);
    do {
      const Eigen::Index col1 = way[static_cast<std::size_t>(col0)];
      match[static_cast<std::size_t>(col0)] = match[static_cast<std::size_t>(col1)];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<Eigen::Index> assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index c = 1; c <= n; ++c) {
    assign[static_cast<std::size_t>(match[static_cast<std::size_t>(c)] - 1)] = c - 1;
  }
  return assign;
}

}  // namespace

MeanSvdInit init_mean_svd(const Dataset& ds, Eigen::Index k, std::uint64_t seed) {
  if (ds.size() == 0) throw ValidationError("init_mean_svd: dataset has no observations");
  if (k < 1 || k > ds.nodes) throw DimensionError("init_mean_svd: K outside [1, p]");
  Matrix mean = Matrix::Zero(ds.nodes, ds.nodes);
  for (const auto& obs : ds.observations) mean += obs.values;
  mean /= static_cast<double>(ds.size());

  const SvdTriple svd = truncated_svd(mean, k);
  const double kd = static_cast<double>(k);
  MeanSvdInit out;
  out.factors = FactorPair::zeros(ds.nodes, k);
  double smallest_kept = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < k; ++c) {
    if (svd.S(c) > kDegenerateSigma) smallest_kept = std::min(smallest_kept, svd.S(c));
  }
  if (!std::isfinite(smallest_kept)) {
    throw NumericError("init_mean_svd: mean observation is numerically zero");
  }
  Rng rng(derive_seed(seed, 0xDE6E));
  for (Eigen::Index c = 0; c < k; ++c) {
    Vector u = svd.U.col(c);
    Vector v = svd.V.col(c);
    double sigma = svd.S(c);
    if (sigma <= kDegenerateSigma) {
      u = unit_nonneg(ds.nodes, rng);
      v = unit_nonneg(ds.nodes, rng);
      sigma = smallest_kept;
      out.degenerate.push_back(c);
    }
    const double scale = kd * sigma;
    out.thetas.emplace_back(scale * u * v.transpose());
    out.factors.influence.col(c) = u * std::sqrt(scale);
    out.factors.receptivity.col(c) = v * std::sqrt(scale);
  }
  out.factors.influence = clamp_nonneg(out.factors.influence);
  out.factors.receptivity = clamp_nonneg(out.factors.receptivity);
  return out;
}

Vector minimize_topic_quadratic(const Matrix& gram, const Vector& linear, const Vector& start,
                                double step, int iters, double tol) {
  const Eigen::Index k = start.size();
  if (gram.rows() != k || gram.cols() != k || linear.size() != k) {
    throw DimensionError("topic quadratic: inconsistent sizes");
  }
  if (k == 1) return Vector::Ones(1);
  Vector m = start;
  Vector best = m;
  double best_value = objective_value(gram, linear, m);
  if (!std::isfinite(best_value)) throw NumericError("topic objective is non-finite");
  for (int it = 0; it < iters; ++it) {
    const Vector grad = 2.0 * (gram * m - linear);
    const Vector next = project_simplex(m - step * grad);
    const double value = objective_value(gram, linear, next);
    if (!std::isfinite(value)) throw NumericError("topic objective became non-finite");
    const double moved = (next - m).norm();
    m = next;
    if (value <= best_value) {
      best_value = value;
      best = m;
    }
    if (moved < tol) break;
  }
  return best;
}

TopicQuadratic topic_quadratic(const FactorPair& f, const Observation& obs) {
  if (obs.values.rows() != f.nodes()) throw DimensionError("observation and factors disagree on p");
  TopicQuadratic q;
  if (!obs.mask) {
    q.gram = hessian_M(f);
    const Matrix xb2 = obs.values * f.receptivity;
    q.linear = f.influence.cwiseProduct(xb2).colwise().sum().transpose();
    return q;
  }
  const ThetaStack thetas = thetas_from_factors(f);
  return topic_quadratic(thetas, obs);
}

TopicQuadratic topic_quadratic(const ThetaStack& thetas, const Observation& obs) {
  const auto k = static_cast<Eigen::Index>(thetas.size());
  TopicQuadratic q{Matrix(k, k), Vector(k)};
  ThetaStack seen;
  seen.reserve(thetas.size());
  for (const auto& t : thetas) {
    if (t.rows() != obs.values.rows() || t.cols() != obs.values.cols()) {
      throw DimensionError("theta shape does not match the observation");
    }
    seen.push_back(obs.mask ? Matrix(t.cwiseProduct(*obs.mask)) : t);
  }
  for (Eigen::Index a = 0; a < k; ++a) {
    const auto as = static_cast<std::size_t>(a);
    q.linear(a) = seen[as].cwiseProduct(obs.values).sum();
    for (Eigen::Index b = a; b < k; ++b) {
      const double v = seen[as].cwiseProduct(seen[static_cast<std::size_t>(b)]).sum();
      q.gram(a, b) = v;
      q.gram(b, a) = v;
    }
  }
  return q;
}

Vector estimate_topics(const FactorPair& f, const Observation& obs, const Vector& start,
                       std::optional<double> step, int iters, double tol) {
  if (start.size() != f.topics()) throw DimensionError("start vector length differs from K");
  validate_topic_distribution(start);
  const TopicQuadratic q = topic_quadratic(f, obs);
  double eta = 0.0;
  if (step) {
    eta = *step;
  } else {
    const double top = psd_eigenvalues(q.gram)(0);
    if (!(top > 0.0)) return start;
    eta = 1.0 / (2.0 * top);
  }
  return minimize_topic_quadratic(q.gram, q.linear, start, eta, iters, tol);
}

Matrix infer_topics(const FactorPair& f, const Dataset& ds, int iters, double tol) {
  const Eigen::Index k = f.topics();
  const Vector uniform = Vector::Constant(k, 1.0 / static_cast<double>(k));
  Matrix out(static_cast<Eigen::Index>(ds.size()), k);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) =
        estimate_topics(f, ds.observations[i], uniform, std::nullopt, iters, tol).transpose();
  }
  return out;
}

std::vector<Eigen::Index> align_permutation(const Matrix& est, const Matrix& truth) {
  if (est.rows() != truth.rows() || est.cols() != truth.cols()) {
    throw DimensionError("align_permutation: shapes differ");
  }
  const Eigen::Index k = est.cols();
  Matrix cost(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) cost(a, b) = (est.col(a) - truth.col(b)).squaredNorm();
  }
  return hungarian(cost);
}

Matrix permute_columns(const Matrix& m, const std::vector<Eigen::Index>& perm) {
  if (static_cast<Eigen::Index>(perm.size()) != m.cols()) {
    throw DimensionError("permutation length differs from column count");
  }
  Matrix out(m.rows(), m.cols());
  for (std::size_t k = 0; k < perm.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = m.col(perm[k]);
  return out;
}

FactorPair permute_columns(const FactorPair& f, const std::vector<Eigen::Index>& perm) {
  return {permute_columns(f.influence, perm), permute_columns(f.receptivity, perm)};
}

double distance_topics(const Matrix& est, const Matrix& truth) {
  if (est.rows() != truth.rows() || est.cols() != truth.cols()) {
    throw DimensionError("distance_topics: shapes differ");
  }
  if (est.rows() == 0) return 0.0;
  return (est - truth).squaredNorm() / static_cast<double>(est.rows());
}

JointFit fit_joint(const Dataset& ds, Eigen::Index k, const JointConfig& cfg,
                   const JointTruth* truth, const JointState* start) {
  if (ds.size() == 0) throw ValidationError("fit_joint: dataset has no observations");
  validate_config(cfg.inner, k);
  if (cfg.max_outer < 1) throw ValidationError("max_outer must be at least 1");

  const auto t0 = std::chrono::steady_clock::now();
  JointFit out;
  const auto n = static_cast<Eigen::Index>(ds.size());
  if (start) {
    if (start->factors.nodes() != ds.nodes || start->factors.topics() != k ||
        start->topics.rows() != n || start->topics.cols() != k) {
      throw DimensionError("fit_joint: starting point does not match the dataset");
    }
    validate_topic_matrix(start->topics);
    out.factors = start->factors;
    out.topics = start->topics;
  } else {
    MeanSvdInit init = init_mean_svd(ds, k, cfg.inner.seed);
    out.factors = std::move(init.factors);
    out.report.degenerate_components = std::move(init.degenerate);
    out.topics = Matrix::Constant(n, k, 1.0 / static_cast<double>(k));
  }

  FitConfig inner = cfg.inner;
  if (inner.sparsity == 0) inner.sparsity = default_sparsity(ds.nodes);
  double previous = std::numeric_limits<double>::quiet_NaN();

  for (int outer = 1; outer <= cfg.max_outer; ++outer) {
    // Topic step: independent per observation, rows written disjointly.
    const bool shared_gram = !ds.masked();
    double shared_step = 0.0;
    if (shared_gram) {
      const double top = psd_eigenvalues(hessian_M(out.factors))(0);
      shared_step = top > 0.0 ? 1.0 / (2.0 * top) : 0.0;
    }
    const auto count = static_cast<std::ptrdiff_t>(n);
    const Matrix current = out.topics;
    auto update_row = [&](std::ptrdiff_t i) {
      const auto& obs = ds.observations[static_cast<std::size_t>(i)];
      const Vector from = current.row(i).transpose();
      if (shared_gram && shared_step == 0.0) return;
      const Vector m = shared_gram
                           ? estimate_topics(out.factors, obs, from, shared_step,
                                             cfg.mstep_iters, cfg.mstep_tol)
                           : estimate_topics(out.factors, obs, from, std::nullopt,
                                             cfg.mstep_iters, cfg.mstep_tol);
      out.topics.row(i) = m.transpose();
    };
    if (cfg.inner.exec.parallel) {
#ifdef TOPICNET_HAVE_OPENMP
      const int threads = cfg.inner.exec.threads;
      std::exception_ptr failure;
#pragma omp parallel for schedule(static) num_threads(threads > 0 ? threads : omp_get_max_threads())
      for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
          update_row(i);
        } catch (...) {
#pragma omp critical(topicnet_mstep_failure)
          if (!failure) failure = std::current_exception();
        }
      }
      if (failure) std::rethrow_exception(failure);
#else
      for (std::ptrdiff_t i = 0; i < count; ++i) update_row(i);
#endif
    } else {
      for (std::ptrdiff_t i = 0; i < count; ++i) update_row(i);
    }

    // Factor step: a round of the known-topic updates from the current factors.
    KnownFit round = fit_known(ds, out.topics, inner, out.factors);
    out.factors = std::move(round.factors);

    const double loss = loss_factors(out.factors, ds, out.topics, cfg.inner.exec);
    if (!std::isfinite(loss)) {
      throw NumericError("joint objective became non-finite at outer iteration " +
                         std::to_string(outer));
    }
    out.report.loss_trace.push_back(loss);
    if (truth) {
      const auto perm = align_permutation(out.topics, truth->topics);
      out.report.dist_M_trace.push_back(
          distance_topics(out.topics, permute_columns(truth->topics, perm)));
      out.report.dist_B_trace.push_back(
          subspace_distance(out.factors, permute_columns(truth->factors, perm)));
      out.report.permutation = perm;
    }
    out.report.outer_iters = outer;
    if (outer > 1 && std::abs(previous - loss) <=
                         cfg.outer_tol * std::max(std::abs(previous),
                                                  std::numeric_limits<double>::min())) {
      out.report.converged = true;
      break;
    }
    previous = loss;
  }
  out.report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace topicnet
