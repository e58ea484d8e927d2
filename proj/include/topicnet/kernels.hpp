#pragma once

// Per-observation accumulation kernels. Every kernel has a serial reference that sums in
// observation order (bit-reproducible, the default everywhere) and an OpenMP variant that splits
// the observations across threads and reduces thread-local partial sums. The parallel variants
// agree with the serial ones up to floating-point reassociation.

#include "topicnet/types.hpp"

namespace topicnet {

struct Execution {
  bool parallel = false;
  int threads = 0;  ///< 0 = OpenMP default

  static Execution sequential() { return {}; }
  /// Parallel mode with the thread count taken from TOPICNET_THREADS (0 if unset).
  static Execution from_environment();
};

/// True when the library was built with OpenMP.
bool openmp_enabled();

/// Loss and factor gradients accumulated over observations:
///   loss = (1/2n) Σ ||R_i||², G1 = -(1/n) Σ R_i B2 M_i, G2 = -(1/n) Σ R_iᵀ B1 M_i,
/// with R_i = X_i - B1 M_i B2ᵀ, masked entrywise when the observation carries a mask.
struct FactorResiduals {
  double loss = 0.0;
  Matrix grad_influence;
  Matrix grad_receptivity;
};

FactorResiduals factor_residuals_serial(const FactorPair& factors, const Dataset& dataset,
                                        const Matrix& topics);
FactorResiduals factor_residuals_parallel(const FactorPair& factors, const Dataset& dataset,
                                          const Matrix& topics, int threads);
FactorResiduals factor_residuals(const FactorPair& factors, const Dataset& dataset,
                                 const Matrix& topics, const Execution& exec);

/// Same sums for the unconstrained theta parameterization: block k of the gradient is
/// -(1/n) Σ m_ik R_i with R_i = X_i - Σ_k m_ik Θ_k (masked when present).
struct ThetaResiduals {
  double loss = 0.0;
  ThetaStack gradient;
};

ThetaResiduals theta_residuals_serial(const ThetaStack& thetas, const Dataset& dataset,
                                      const Matrix& topics);
ThetaResiduals theta_residuals_parallel(const ThetaStack& thetas, const Dataset& dataset,
                                        const Matrix& topics, int threads);
ThetaResiduals theta_residuals(const ThetaStack& thetas, const Dataset& dataset,
                               const Matrix& topics, const Execution& exec);

/// Topic-weighted data means S_k = (1/n) Σ m_ik X_i and the scalar (1/2n) Σ ||X_i||². Masks are
/// ignored; callers use these only for unmasked datasets.
struct TopicMoments {
  ThetaStack weighted_means;
  double half_mean_square = 0.0;
};

TopicMoments topic_moments_serial(const Dataset& dataset, const Matrix& topics);
TopicMoments topic_moments_parallel(const Dataset& dataset, const Matrix& topics, int threads);
TopicMoments topic_moments(const Dataset& dataset, const Matrix& topics, const Execution& exec);

}  // namespace topicnet
