#include "topicnet/kernels.hpp"

#include <cstdlib>
#include <string>

#include "topicnet/errors.hpp"

#ifdef TOPICNET_HAVE_OPENMP
#include <omp.h>
#endif

namespace topicnet {
namespace {

void check_inputs(const Dataset& ds, const Matrix& topics, Eigen::Index k) {
  if (topics.rows() != static_cast<Eigen::Index>(ds.size())) {
    throw DimensionError("topic matrix has " + std::to_string(topics.rows()) + " rows for " +
                         std::to_string(ds.size()) + " observations");
  }
  if (topics.cols() != k) {
    throw DimensionError("topic matrix has " + std::to_string(topics.cols()) +
                         " columns, expected " + std::to_string(k));
  }
  if (ds.size() == 0) throw ValidationError("dataset has no observations");
}

void check_factors(const FactorPair& f, const Dataset& ds) {
  if (f.influence.rows() != f.receptivity.rows() || f.influence.cols() != f.receptivity.cols()) {
    throw DimensionError("influence and receptivity matrices differ in shape");
  }
  if (f.nodes() != ds.nodes) throw DimensionError("factor rows do not match the node count");
}

void check_thetas(const ThetaStack& thetas, const Dataset& ds) {
  for (const auto& t : thetas) {
    if (t.rows() != ds.nodes || t.cols() != ds.nodes) {
      throw DimensionError("theta matrices must be p x p");
    }
  }
}

// Adds observation i's contribution to the running (unscaled) sums.
void add_factor_term(const FactorPair& f, const Observation& obs, const Vector& m,
                     FactorResiduals& acc) {
  const Matrix weighted1 = f.influence * m.asDiagonal();
  const Matrix weighted2 = f.receptivity * m.asDiagonal();
  Matrix r = obs.values;
  r.noalias() -= weighted1 * f.receptivity.transpose();
  if (obs.mask) r.array() *= obs.mask->array();
  acc.loss += r.squaredNorm();
  acc.grad_influence.noalias() -= r * weighted2;
  acc.grad_receptivity.noalias() -= r.transpose() * weighted1;
}

void add_theta_term(const ThetaStack& thetas, const Observation& obs, const Vector& m,
                    ThetaResiduals& acc) {
  Matrix r = obs.values;
  for (std::size_t k = 0; k < thetas.size(); ++k) r -= m(static_cast<Eigen::Index>(k)) * thetas[k];
  if (obs.mask) r.array() *= obs.mask->array();
  acc.loss += r.squaredNorm();
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    acc.gradient[k] -= m(static_cast<Eigen::Index>(k)) * r;
  }
}

void add_moment_term(const Observation& obs, const Vector& m, TopicMoments& acc) {
  acc.half_mean_square += obs.values.squaredNorm();
  for (std::size_t k = 0; k < acc.weighted_means.size(); ++k) {
    acc.weighted_means[k] += m(static_cast<Eigen::Index>(k)) * obs.values;
  }
}

FactorResiduals zero_factor_sums(const FactorPair& f) {
  return {0.0, Matrix::Zero(f.nodes(), f.topics()), Matrix::Zero(f.nodes(), f.topics())};
}

ThetaResiduals zero_theta_sums(const ThetaStack& thetas, Eigen::Index p) {
  return {0.0, ThetaStack(thetas.size(), Matrix::Zero(p, p))};
}

TopicMoments zero_moments(Eigen::Index k, Eigen::Index p) {
  return {ThetaStack(static_cast<std::size_t>(k), Matrix::Zero(p, p)), 0.0};
}

void finish(FactorResiduals& acc, double n) {
  acc.loss /= 2.0 * n;
  acc.grad_influence /= n;
  acc.grad_receptivity /= n;
}

void finish(ThetaResiduals& acc, double n) {
  acc.loss /= 2.0 * n;
  for (auto& g : acc.gradient) g /= n;
}

void finish(TopicMoments& acc, double n) {
  acc.half_mean_square /= 2.0 * n;
  for (auto& s : acc.weighted_means) s /= n;
}

void merge(FactorResiduals& into, const FactorResiduals& part) {
  into.loss += part.loss;
  into.grad_influence += part.grad_influence;
  into.grad_receptivity += part.grad_receptivity;
}

void merge(ThetaResiduals& into, const ThetaResiduals& part) {
  into.loss += part.loss;
  for (std::size_t k = 0; k < into.gradient.size(); ++k) into.gradient[k] += part.gradient[k];
}

void merge(TopicMoments& into, const TopicMoments& part) {
  into.half_mean_square += part.half_mean_square;
  for (std::size_t k = 0; k < into.weighted_means.size(); ++k) {
    into.weighted_means[k] += part.weighted_means[k];
  }
}

// Runs `add(i, partial)` over all observations with one partial sum per thread, then reduces
// the partials in thread order so a fixed thread count gives a fixed result.
template <class Acc, class MakeZero, class Add>
Acc parallel_accumulate(std::size_t n, int threads, MakeZero make_zero, Add add) {
#ifdef TOPICNET_HAVE_OPENMP
  const int team = threads > 0 ? threads : omp_get_max_threads();
  std::vector<Acc> partials;
  partials.reserve(static_cast<std::size_t>(team));
  for (int t = 0; t < team; ++t) partials.push_back(make_zero());
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel num_threads(team)
  {
    Acc& mine = partials[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) add(static_cast<std::size_t>(i), mine);
  }
  Acc total = std::move(partials.front());
  for (std::size_t t = 1; t < partials.size(); ++t) merge(total, partials[t]);
  return total;
#else
  (void)threads;
  Acc total = make_zero();
  for (std::size_t i = 0; i < n; ++i) add(i, total);
  return total;
#endif
}

}  // namespace

Execution Execution::from_environment() {
  Execution exec;
  exec.parallel = true;
  if (const char* env = std::getenv("TOPICNET_THREADS")) exec.threads = std::atoi(env);
  if (exec.threads < 0) exec.threads = 0;
  return exec;
}

bool openmp_enabled() {
#ifdef TOPICNET_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

FactorResiduals factor_residuals_serial(const FactorPair& f, const Dataset& ds,
                                        const Matrix& topics) {
  check_factors(f, ds);
  check_inputs(ds, topics, f.topics());
  FactorResiduals acc = zero_factor_sums(f);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    add_factor_term(f, ds.observations[i], topics.row(static_cast<Eigen::Index>(i)).transpose(),
                    acc);
  }
  finish(acc, static_cast<double>(ds.size()));
  return acc;
}

FactorResiduals factor_residuals_parallel(const FactorPair& f, const Dataset& ds,
                                          const Matrix& topics, int threads) {
  check_factors(f, ds);
  check_inputs(ds, topics, f.topics());
  auto acc = parallel_accumulate<FactorResiduals>(
      ds.size(), threads, [&] { return zero_factor_sums(f); },
      [&](std::size_t i, FactorResiduals& mine) {
        add_factor_term(f, ds.observations[i],
                        topics.row(static_cast<Eigen::Index>(i)).transpose(), mine);
      });
  finish(acc, static_cast<double>(ds.size()));
  return acc;
}

FactorResiduals factor_residuals(const FactorPair& f, const Dataset& ds, const Matrix& topics,
                                 const Execution& exec) {
  return exec.parallel ? factor_residuals_parallel(f, ds, topics, exec.threads)
                       : factor_residuals_serial(f, ds, topics);
}

ThetaResiduals theta_residuals_serial(const ThetaStack& thetas, const Dataset& ds,
                                      const Matrix& topics) {
  check_thetas(thetas, ds);
  check_inputs(ds, topics, static_cast<Eigen::Index>(thetas.size()));
  ThetaResiduals acc = zero_theta_sums(thetas, ds.nodes);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    add_theta_term(thetas, ds.observations[i],
                   topics.row(static_cast<Eigen::Index>(i)).transpose(), acc);
  }
  finish(acc, static_cast<double>(ds.size()));
  return acc;
}

ThetaResiduals theta_residuals_parallel(const ThetaStack& thetas, const Dataset& ds,
                                        const Matrix& topics, int threads) {
  check_thetas(thetas, ds);
  check_inputs(ds, topics, static_cast<Eigen::Index>(thetas.size()));
  auto acc = parallel_accumulate<ThetaResiduals>(
      ds.size(), threads, [&] { return zero_theta_sums(thetas, ds.nodes); },
      [&](std::size_t i, ThetaResiduals& mine) {
        add_theta_term(thetas, ds.observations[i],
                       topics.row(static_cast<Eigen::Index>(i)).transpose(), mine);
      });
  finish(acc, static_cast<double>(ds.size()));
  return acc;
}

ThetaResiduals theta_residuals(const ThetaStack& thetas, const Dataset& ds, const Matrix& topics,
                               const Execution& exec) {
  return exec.parallel ? theta_residuals_parallel(thetas, ds, topics, exec.threads)
                       : theta_residuals_serial(thetas, ds, topics);
}

TopicMoments topic_moments_serial(const Dataset& ds, const Matrix& topics) {
  check_inputs(ds, topics, topics.cols());
  TopicMoments acc = zero_moments(topics.cols(), ds.nodes);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    add_moment_term(ds.observations[i], topics.row(static_cast<Eigen::Index>(i)).transpose(), acc);
  }
  finish(acc, static_cast<double>(ds.size()));
  return acc;
}

TopicMoments topic_moments_parallel(const Dataset& ds, const Matrix& topics, int threads) {
  check_inputs(ds, topics, topics.cols());
  auto acc = parallel_accumulate<TopicMoments>(
      ds.size(), threads, [&] { return zero_moments(topics.cols(), ds.nodes); },
      [&](std::size_t i, TopicMoments& mine) {
        add_moment_term(ds.observations[i], topics.row(static_cast<Eigen::Index>(i)).transpose(),
                        mine);
      });
  finish(acc, static_cast<double>(ds.size()));
  return acc;
}

TopicMoments topic_moments(const Dataset& ds, const Matrix& topics, const Execution& exec) {
  return exec.parallel ? topic_moments_parallel(ds, topics, exec.threads)
                       : topic_moments_serial(ds, topics);
}

}  // namespace topicnet
