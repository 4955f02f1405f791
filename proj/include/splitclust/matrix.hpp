#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "splitclust/tolerances.hpp"

namespace splitclust {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double symmetry_gap(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.rows() == 0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

inline void require_symmetric(const Matrix& m, double tol = kTol.symmetry) {
  if (symmetry_gap(m) > tol) {
    throw std::invalid_argument("matrix is not symmetric within tolerance");
  }
}

// SVD of a symmetric matrix, m = u * diag(values) * v^T with values
// nonnegative and descending. v holds orthonormal eigenvectors; u carries
// the eigenvalue signs, so u.col(i) = sign(lambda_i) * v.col(i).
struct SymmetricSvd {
  Vector values;
  Matrix u;
  Matrix v;

  Matrix reassemble() const { return u * values.asDiagonal() * v.transpose(); }
};

inline SymmetricSvd svd_sym(const Matrix& m) {
  if (!m.allFinite()) throw std::invalid_argument("svd_sym: non-finite entries");
  require_symmetric(m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("svd_sym: eigendecomposition failed");

  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b));
  });

  SymmetricSvd out;
  out.values.resize(n);
  out.u.resize(n, n);
  out.v.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lambda = es.eigenvalues()(order[static_cast<std::size_t>(k)]);
    out.values(k) = std::abs(lambda);
    out.v.col(k) = es.eigenvectors().col(order[static_cast<std::size_t>(k)]);
    out.u.col(k) = (lambda < 0.0 ? -1.0 : 1.0) * out.v.col(k);
  }
  return out;
}

// Entrywise shrinkage toward zero by t, clamped at zero.
inline Matrix soft_threshold(const Matrix& m, double t) {
  if (t < 0.0) throw std::invalid_argument("soft_threshold: negative threshold");
  return m.unaryExpr([t](double x) {
    const double mag = std::abs(x) - t;
    return mag > 0.0 ? (x < 0.0 ? -mag : mag) : 0.0;
  });
}

// Shrinks the singular values of a symmetric matrix by t and reassembles.
// Computed through the eigendecomposition: singular values are |lambda|,
// so the shrink acts on |lambda| while the sign is kept.
inline Matrix sv_threshold(const Matrix& m, double t) {
  if (t < 0.0) throw std::invalid_argument("sv_threshold: negative threshold");
  require_symmetric(m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("sv_threshold: eigendecomposition failed");
  Vector shrunk = es.eigenvalues().unaryExpr([t](double lambda) {
    const double mag = std::abs(lambda) - t;
    return mag > 0.0 ? (lambda < 0.0 ? -mag : mag) : 0.0;
  });
  Matrix r = es.eigenvectors() * shrunk.asDiagonal() * es.eigenvectors().transpose();
  // exact symmetry, so downstream symmetric kernels never see product roundoff
  return 0.5 * (r + r.transpose());
}

enum class Norm { L1, LInf, Fro, Nuclear, Spectral };

inline double norm(const Matrix& m, Norm kind) {
  if (m.size() == 0) return 0.0;
  switch (kind) {
    case Norm::L1:
      return m.cwiseAbs().sum();
    case Norm::LInf:
      return m.cwiseAbs().maxCoeff();
    case Norm::Fro:
      return m.norm();
    case Norm::Nuclear:
      return svd_sym(m).values.sum();
    case Norm::Spectral: {
      const SymmetricSvd s = svd_sym(m);
      return s.values.size() > 0 ? s.values(0) : 0.0;
    }
  }
  throw std::invalid_argument("norm: unknown kind");
}

}  // namespace splitclust
