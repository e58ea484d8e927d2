#pragma once

#include <cstdint>

#include "topicnet/types.hpp"

namespace topicnet {

/// Rank-r factorization X ≈ U diag(S) Vᵀ.
struct SvdTriple {
  Matrix U;  ///< rows(X)×r, orthonormal columns
  Vector S;  ///< r singular values, descending, nonnegative
  Matrix V;  ///< cols(X)×r, orthonormal columns
  int iterations = 0;
};

struct SvdOptions {
  double tolerance = 1e-10;  ///< on the change of the leading r singular values, relative to σ₁
  int max_iterations = 10000;
  int oversampling = 5;
  std::uint64_t seed = 0x5EEDF00DULL;
};

/// Best rank-r approximation by seeded subspace iteration. Each iterate is orthonormalized with
/// Householder QR and the Ritz values come from a one-sided Jacobi SVD of X·Q, so no Gram
/// matrix is ever formed. Each (u_k, v_k) pair is signed so the largest-magnitude entry of u_k
/// is positive.
///
/// Throws NumericError on non-finite input and ConvergenceError when the budget runs out.
SvdTriple truncated_svd(const Matrix& x, Eigen::Index rank, const SvdOptions& options = {});

/// Largest singular value.
double spectral_norm(const Matrix& x);

/// Eigenvalues of a symmetric positive semidefinite matrix, descending. For such matrices the
/// eigenvalues coincide with the singular values.
Vector psd_eigenvalues(const Matrix& symmetric);

/// Euclidean projection onto {w ≥ 0, Σw = 1} via the sort-and-threshold rule.
Vector project_simplex(const Vector& v);

/// Keeps the `s` entries of largest magnitude and zeroes the rest. Ties go to the smaller
/// row-major index.
Matrix hard_threshold(const Matrix& b, Eigen::Index s);

/// Entrywise max(b, 0).
Matrix clamp_nonneg(const Matrix& b);

struct QrResult {
  Matrix Q;  ///< p×K, orthonormal columns
  Matrix R;  ///< K×K upper triangular with nonnegative diagonal
  bool rank_deficient = false;
};

/// Thin Householder QR of a p×K matrix (p ≥ K).
QrResult qr_decompose(const Matrix& b);

}  // namespace topicnet
