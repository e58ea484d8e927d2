#pragma once

#include <vector>

#include "topicnet/kernels.hpp"
#include "topicnet/types.hpp"

namespace topicnet {

/// (1/2n) Σ ||X_i − B1 M_i B2ᵀ||_F², residuals masked where a mask is present.
double loss_factors(const FactorPair& factors, const Dataset& dataset, const Matrix& topics,
                    const Execution& exec = {});

/// (1/2n) Σ ||X_i − Σ_k m_ik Θ_k||_F², residuals masked where a mask is present.
double loss_theta(const ThetaStack& thetas, const Dataset& dataset, const Matrix& topics,
                  const Execution& exec = {});

/// (λ/2) Σ_k (||b1_k||² − ||b2_k||²)².
double regularizer_balance(const FactorPair& factors, double lambda);

/// λ Σ_{j,k} (b1_jk + b2_jk). Expects nonnegative factors.
double regularizer_l1(const FactorPair& factors, double lambda);

struct FactorGradient {
  Matrix influence;
  Matrix receptivity;
};

/// Gradient of loss_factors with respect to (B1, B2).
FactorGradient grad_factors(const FactorPair& factors, const Dataset& dataset,
                            const Matrix& topics, const Execution& exec = {});

/// Gradient of regularizer_balance: column k of the B1 part is 2λ(||b1_k||² − ||b2_k||²) b1_k,
/// the B2 part carries the opposite sign.
FactorGradient grad_balance(const FactorPair& factors, double lambda);

/// Gradient with respect to m of ½||X − Σ_k m_k Θ_k||_F² (masked if the observation has a mask):
/// component k is −⟨R, Θ_k⟩.
Vector grad_topics(const ThetaStack& thetas, const Observation& obs, const Vector& topics);

/// H_Θ = (1/n) MᵀM.
Matrix hessian_topics(const Matrix& topics);

/// H_M with entries ⟨Θ_k, Θ_k'⟩.
Matrix hessian_M(const ThetaStack& thetas);

/// Same Gram matrix for a rank-one stack, computed as (B1ᵀB1) ⊙ (B2ᵀB2) without forming Θ_k.
Matrix hessian_M(const FactorPair& factors);

struct ConditionReport {
  double mu_theta = 0.0;   ///< smallest eigenvalue of H_Θ
  double L_theta = 0.0;    ///< largest eigenvalue of H_Θ
  double mu_M = 0.0;       ///< smallest eigenvalue of H_M at the true thetas
  double rho0 = 0.0;       ///< ||A_off||_F from the QR-based near-orthogonality split
  double eta_oc = 0.0;     ///< K · max_k (1/n) Σ_i m_ik
  double sigma_max = 0.0;  ///< max_k ||Θ*_k||_2
  Eigen::Index s_star = 0; ///< max(nnz(B1*), nnz(B2*))
  bool qr_rank_deficient = false;
};

/// Diagnostics for the identifiability and initialization conditions given ground truth.
ConditionReport check_conditions(const FactorPair& truth, const Matrix& true_topics);

/// (1/n) Σ_i Σ_k ⟨E_i, Θ*_k⟩².
double stat_error_M(const std::vector<Matrix>& errors, const ThetaStack& true_thetas);

/// ||∇_Θ f(Θ*)||_F, with block k equal to −(1/n) Σ_i m_ik (X_i − Σ m_ik' Θ*_k').
double grad_norm_at_truth(const ThetaStack& true_thetas, const Dataset& dataset,
                          const Matrix& topics, const Execution& exec = {});

}  // namespace topicnet
