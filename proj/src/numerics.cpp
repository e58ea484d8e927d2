#include "topicnet/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "topicnet/errors.hpp"
#include "topicnet/rng.hpp"

namespace topicnet {
namespace {

using ColMatrix = Eigen::MatrixXd;

// One-sided Jacobi SVD of a tall matrix: y = U diag(sigma) wᵀ with w orthogonal.
struct JacobiSvd {
  ColMatrix u;
  Vector sigma;
  ColMatrix w;
};

// Completes the columns of `u` flagged in `missing` to an orthonormal set using unit vectors.
void complete_orthonormal(ColMatrix& u, const std::vector<bool>& missing) {
  const Eigen::Index m = u.rows();
  std::vector<Eigen::Index> done;
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    if (!missing[static_cast<std::size_t>(j)]) done.push_back(j);
  }
  Eigen::Index candidate = 0;
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    if (!missing[static_cast<std::size_t>(j)]) continue;
    for (; candidate < m; ++candidate) {
      Vector v = Vector::Unit(m, candidate);
      for (int pass = 0; pass < 2; ++pass) {
        for (auto d : done) v -= u.col(d).dot(v) * u.col(d);
      }
      const double nv = v.norm();
      if (nv > 0.5) {
        u.col(j) = v / nv;
        done.push_back(j);
        ++candidate;
        break;
      }
    }
  }
}

JacobiSvd jacobi_svd(ColMatrix y) {
  const Eigen::Index b = y.cols();
  ColMatrix w = ColMatrix::Identity(b, b);
  constexpr double kOffTol = 1e-15;
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (Eigen::Index i = 0; i + 1 < b; ++i) {
      for (Eigen::Index j = i + 1; j < b; ++j) {
        const double alpha = y.col(i).squaredNorm();
        const double beta = y.col(j).squaredNorm();
        const double gamma = y.col(i).dot(y.col(j));
        if (gamma == 0.0 || std::abs(gamma) <= kOffTol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Vector yi = y.col(i);
        y.col(i) = c * yi - s * y.col(j);
        y.col(j) = s * yi + c * y.col(j);
        const Vector wi = w.col(i);
        w.col(i) = c * wi - s * w.col(j);
        w.col(j) = s * wi + c * w.col(j);
      }
    }
    if (!rotated) break;
  }

  Vector norms(b);
  for (Eigen::Index j = 0; j < b; ++j) norms(j) = y.col(j).norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(b));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index c) { return norms(a) > norms(c); });

  JacobiSvd out{ColMatrix(y.rows(), b), Vector(b), ColMatrix(b, b)};
  const double top = b > 0 ? norms(order.front()) : 0.0;
  const double floor = top * static_cast<double>(std::max<Eigen::Index>(b, y.rows())) *
                       std::numeric_limits<double>::epsilon();
  std::vector<bool> missing(static_cast<std::size_t>(b), false);
  for (Eigen::Index j = 0; j < b; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    out.w.col(j) = w.col(src);
    if (norms(src) <= floor || norms(src) == 0.0) {
      out.sigma(j) = 0.0;
      out.u.col(j).setZero();
      missing[static_cast<std::size_t>(j)] = true;
    } else {
      out.sigma(j) = norms(src);
      out.u.col(j) = y.col(src) / norms(src);
    }
  }
  complete_orthonormal(out.u, missing);
  return out;
}

// Householder QR returning Q with orthonormal columns even for rank-deficient input.
QrResult householder_qr(const ColMatrix& a) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  ColMatrix r = a;
  std::vector<Vector> reflectors;
  reflectors.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    Vector v = r.col(j).tail(m - j);
    const double xnorm = v.norm();
    if (xnorm == 0.0) {
      reflectors.emplace_back(Vector::Zero(m - j));
      continue;
    }
    const double alpha = v(0) >= 0.0 ? -xnorm : xnorm;
    v(0) -= alpha;
    const double vnorm = v.norm();
    if (vnorm == 0.0) {
      reflectors.emplace_back(Vector::Zero(m - j));
      continue;
    }
    v /= vnorm;
    auto block = r.bottomRightCorner(m - j, n - j);
    const Eigen::RowVectorXd proj = v.transpose() * block;
    block.noalias() -= 2.0 * v * proj;
    reflectors.push_back(std::move(v));
  }
  ColMatrix q = ColMatrix::Identity(m, n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    const Vector& v = reflectors[static_cast<std::size_t>(j)];
    if (v.squaredNorm() == 0.0) continue;
    auto block = q.bottomRows(m - j);
    const Eigen::RowVectorXd proj = v.transpose() * block;
    block.noalias() -= 2.0 * v * proj;
  }
  ColMatrix rr = r.topRows(n).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (rr(j, j) < 0.0) {
      rr.row(j) *= -1.0;
      q.col(j) *= -1.0;
    }
  }
  QrResult out{q, rr, false};
  const double scale = a.norm();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (rr(j, j) <= 1e-12 * scale) out.rank_deficient = true;
  }
  if (scale == 0.0) out.rank_deficient = true;
  return out;
}

}  // namespace

SvdTriple truncated_svd(const Matrix& x, Eigen::Index rank, const SvdOptions& opt) {
  const Eigen::Index kmax = std::min(x.rows(), x.cols());
  if (rank < 1 || rank > kmax) {
    throw DimensionError("truncated_svd: rank " + std::to_string(rank) + " outside [1, " +
                         std::to_string(kmax) + "]");
  }
  if (!x.allFinite()) throw NumericError("truncated_svd: input has non-finite entries");

  const ColMatrix a = x;
  const Eigen::Index block = std::min<Eigen::Index>(kmax, rank + opt.oversampling);
  Rng rng(opt.seed);
  ColMatrix start(a.cols(), block);
  for (Eigen::Index j = 0; j < block; ++j) {
    for (Eigen::Index i = 0; i < a.cols(); ++i) start(i, j) = rng.normal();
  }
  ColMatrix q = householder_qr(start).Q;

  Vector previous;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const ColMatrix y = a * q;
    JacobiSvd js = jacobi_svd(y);
    const Vector top = js.sigma.head(rank);
    const bool full_basis = block == a.cols();
    bool converged = top(0) == 0.0;
    if (!converged && previous.size() == rank) {
      const double change = (top - previous).cwiseAbs().maxCoeff();
      converged = change <= opt.tolerance * top(0);
    }
    if (converged || full_basis) {
      SvdTriple out;
      out.U = js.u.leftCols(rank);
      out.S = top;
      out.V = (q * js.w).leftCols(rank);
      out.iterations = it;
      for (Eigen::Index k = 0; k < rank; ++k) {
        Eigen::Index idx = 0;
        out.U.col(k).cwiseAbs().maxCoeff(&idx);
        if (out.U(idx, k) < 0.0) {
          out.U.col(k) *= -1.0;
          out.V.col(k) *= -1.0;
        }
      }
      return out;
    }
    previous = top;
    const ColMatrix z = a.transpose() * y;
    q = householder_qr(z).Q;
  }
  throw ConvergenceError("truncated_svd: no convergence after " +
                         std::to_string(opt.max_iterations) + " iterations");
}

double spectral_norm(const Matrix& x) { return truncated_svd(x, 1).S(0); }

Vector psd_eigenvalues(const Matrix& symmetric) {
  if (symmetric.rows() != symmetric.cols()) throw DimensionError("psd_eigenvalues: not square");
  return truncated_svd(symmetric, symmetric.rows()).S;
}

Vector project_simplex(const Vector& v) {
  if (v.size() == 0) throw DimensionError("project_simplex: empty vector");
  if (!v.allFinite()) throw NumericError("project_simplex: non-finite input");
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  Vector w = (v.array() - theta).max(0.0);
  return w;
}

Matrix hard_threshold(const Matrix& b, Eigen::Index s) {
  if (s < 0) throw ValidationError("hard_threshold: negative sparsity");
  const Eigen::Index total = b.size();
  if (s >= total) return b;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(total));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  const double* data = b.data();  // row-major, so linear index == (row, col) order
  auto before = [data](Eigen::Index l, Eigen::Index r) {
    const double al = std::abs(data[l]);
    const double ar = std::abs(data[r]);
    return al > ar || (al == ar && l < r);
  };
  std::nth_element(idx.begin(), idx.begin() + s, idx.end(), before);
  Matrix out = Matrix::Zero(b.rows(), b.cols());
  double* dst = out.data();
  for (Eigen::Index i = 0; i < s; ++i) {
    const Eigen::Index k = idx[static_cast<std::size_t>(i)];
    dst[k] = data[k];
  }
  return out;
}

Matrix clamp_nonneg(const Matrix& b) { return b.cwiseMax(0.0); }

QrResult qr_decompose(const Matrix& b) {
  if (b.rows() < b.cols()) throw DimensionError("qr_decompose: more columns than rows");
  if (!b.allFinite()) throw NumericError("qr_decompose: non-finite input");
  QrResult res = householder_qr(ColMatrix(b));
  return res;
}

}  // namespace topicnet
