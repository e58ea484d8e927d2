#pragma once

// Shared generators and independent oracles for the unit and acceptance suites. Nothing here
// calls into the code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <tuple>
#include <vector>

#include "topicnet/rng.hpp"
#include "topicnet/types.hpp"

namespace topicnet::testing {

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double lo = -1.0,
                            double hi = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
  return m;
}

inline Vector random_simplex(Eigen::Index k, Rng& rng) {
  Vector v(k);
  for (Eigen::Index i = 0; i < k; ++i) v(i) = rng.uniform(0.05, 1.0);
  return v / v.sum();
}

inline Matrix random_topic_matrix(Eigen::Index n, Eigen::Index k, Rng& rng) {
  Matrix m(n, k);
  for (Eigen::Index i = 0; i < n; ++i) m.row(i) = random_simplex(k, rng).transpose();
  return m;
}

inline FactorPair random_factors(Eigen::Index p, Eigen::Index k, Rng& rng, double lo = 0.0,
                                 double hi = 1.0) {
  return {random_matrix(p, k, rng, lo, hi), random_matrix(p, k, rng, lo, hi)};
}

inline Matrix random_mask(Eigen::Index p, Rng& rng) {
  Matrix m(p, p);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.bernoulli(0.6) ? 1.0 : 0.0;
  return m;
}

/// Dataset of n random real observations with random topics attached.
inline Dataset random_dataset(Eigen::Index p, Eigen::Index k, Eigen::Index n, Rng& rng,
                              bool masked = false) {
  Dataset ds;
  ds.nodes = p;
  ds.topics = k;
  ds.topics_known = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    Observation obs;
    obs.values = random_matrix(p, p, rng, 0.0, 2.0);
    obs.topics = random_simplex(k, rng);
    if (masked) obs.mask = random_mask(p, rng);
    ds.observations.push_back(std::move(obs));
  }
  return ds;
}

/// Triple-loop Σ_k b1_jk m_k b2_lk.
inline Matrix forward_oracle(const FactorPair& f, const Vector& m) {
  const Eigen::Index p = f.influence.rows();
  Matrix out = Matrix::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index l = 0; l < p; ++l) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < m.size(); ++k) {
        acc += f.influence(j, k) * m(k) * f.receptivity(l, k);
      }
      out(j, l) = acc;
    }
  }
  return out;
}

/// Loop-and-accumulate loss (1/2n) Σ_i Σ_jl (mask·(X − X̂))².
inline double loss_oracle(const FactorPair& f, const Dataset& ds, const Matrix& topics) {
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& obs = ds.observations[i];
    const Matrix pred = forward_oracle(f, topics.row(static_cast<Eigen::Index>(i)).transpose());
    for (Eigen::Index j = 0; j < ds.nodes; ++j) {
      for (Eigen::Index l = 0; l < ds.nodes; ++l) {
        double r = obs.values(j, l) - pred(j, l);
        if (obs.mask) r *= (*obs.mask)(j, l);
        total += r * r;
      }
    }
  }
  return total / (2.0 * static_cast<double>(ds.size()));
}

/// Central finite differences of a scalar function over every entry of `x`.
inline Matrix finite_difference(const std::function<double(const Matrix&)>& fn, const Matrix& x,
                                double h = 1e-5) {
  Matrix g(x.rows(), x.cols());
  Matrix probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double orig = probe.data()[i];
    probe.data()[i] = orig + h;
    const double up = fn(probe);
    probe.data()[i] = orig - h;
    const double down = fn(probe);
    probe.data()[i] = orig;
    g.data()[i] = (up - down) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const Matrix& analytic, const Matrix& numeric) {
  const double scale = std::max({analytic.norm(), numeric.norm(), 1e-12});
  return (analytic - numeric).norm() / scale;
}

/// Euclidean simplex projection by enumerating every support set.
inline Vector simplex_projection_oracle(const Vector& v) {
  const Eigen::Index k = v.size();
  Vector best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    double sum = 0.0;
    int count = 0;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (mask & (1u << i)) {
        sum += v(i);
        ++count;
      }
    }
    const double shift = (sum - 1.0) / count;
    Vector w = Vector::Zero(k);
    bool feasible = true;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (mask & (1u << i)) {
        w(i) = v(i) - shift;
        if (w(i) < -1e-15) feasible = false;
      }
    }
    if (!feasible) continue;
    const double d = (w - v).squaredNorm();
    if (d < best_dist) {
      best_dist = d;
      best = w.cwiseMax(0.0);
    }
  }
  return best;
}

/// Keeps the s largest-magnitude entries, ties to the smaller row-major index, by full sort.
inline Matrix hard_threshold_oracle(const Matrix& b, Eigen::Index s) {
  std::vector<std::tuple<double, Eigen::Index>> entries;
  for (Eigen::Index i = 0; i < b.size(); ++i) entries.emplace_back(std::abs(b.data()[i]), i);
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& c) {
    if (std::get<0>(a) != std::get<0>(c)) return std::get<0>(a) > std::get<0>(c);
    return std::get<1>(a) < std::get<1>(c);
  });
  Matrix out = Matrix::Zero(b.rows(), b.cols());
  for (Eigen::Index r = 0; r < std::min<Eigen::Index>(s, b.size()); ++r) {
    const auto idx = std::get<1>(entries[static_cast<std::size_t>(r)]);
    out.data()[idx] = b.data()[idx];
  }
  return out;
}

/// Loop-and-accumulate (1/2n) Σ_i Σ_jl (mask·(X − Σ_k m_ik Θ_k))².
inline double theta_loss_oracle(const ThetaStack& thetas, const Dataset& ds, const Matrix& topics) {
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& obs = ds.observations[i];
    for (Eigen::Index j = 0; j < ds.nodes; ++j) {
      for (Eigen::Index l = 0; l < ds.nodes; ++l) {
        double pred = 0.0;
        for (std::size_t k = 0; k < thetas.size(); ++k) {
          pred += topics(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) *
                  thetas[k](j, l);
        }
        double r = obs.values(j, l) - pred;
        if (obs.mask) r *= (*obs.mask)(j, l);
        total += r * r;
      }
    }
  }
  return total / (2.0 * static_cast<double>(ds.size()));
}

/// Minimum over all 2^K column sign patterns.
inline double subspace_distance_oracle(const FactorPair& a, const FactorPair& b) {
  const Eigen::Index k = a.topics();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned signs = 0; signs < (1u << k); ++signs) {
    double total = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      const double o = (signs >> c) & 1u ? -1.0 : 1.0;
      total += (a.influence.col(c) - o * b.influence.col(c)).squaredNorm() +
               (a.receptivity.col(c) - o * b.receptivity.col(c)).squaredNorm();
    }
    best = std::min(best, total);
  }
  return best;
}

/// Smallest Σ_c ||a_c − b_perm(c)||² over all K! permutations.
inline double alignment_cost_oracle(const Matrix& a, const Matrix& b) {
  const Eigen::Index k = a.cols();
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      cost += (a.col(c) - b.col(perm[static_cast<std::size_t>(c)])).squaredNorm();
    }
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace topicnet::testing
