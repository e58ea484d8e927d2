#pragma once

#include <vector>

#include "topicnet/types.hpp"

namespace topicnet {

/// B1 diag(m) B2ᵀ. Diagonal (self-loop) entries are kept.
Matrix forward(const FactorPair& factors, const Vector& topics);

/// forward() with the diagonal zeroed.
Matrix forward_nodiag(const FactorPair& factors, const Vector& topics);

/// forward() multiplied entrywise by a binary author mask.
Matrix forward_masked(const FactorPair& factors, const Vector& topics, const Matrix& mask);

/// Σ_k m_k Θ_k for an unconstrained theta stack.
Matrix forward_thetas(const ThetaStack& thetas, const Vector& topics);

/// One prediction per observation, using row i of `topics` and the observation's mask if any.
std::vector<Matrix> predict_dataset(const FactorPair& factors, const Dataset& dataset,
                                    const Matrix& topics);

/// Rescales column k of B1 by γ_k and of B2 by 1/γ_k so both have the same 2-norm.
/// Leaves every forward() output unchanged; columns with a zero side are left untouched.
FactorPair balance_columns(const FactorPair& factors);

}  // namespace topicnet
