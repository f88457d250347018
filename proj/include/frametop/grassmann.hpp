#pragma once

// Frames (k x n, orthonormal rows) and projection points (n x n symmetric
// idempotents), with the maps between them.

#include "frametop/core.hpp"
#include "frametop/hypersimplex.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace frametop {

/// k x n matrix whose rows are orthonormal; columns are the frame vectors.
struct Frame {
  Matrix rows;

  Frame() = default;
  explicit Frame(Matrix m) : rows(std::move(m)) {}

  Eigen::Index k() const { return rows.rows(); }
  Eigen::Index n() const { return rows.cols(); }

  /// ||F F^t - I_k||_F
  double stiefel_residual() const {
    return (rows * rows.transpose() - Matrix::Identity(k(), k())).norm();
  }
};

/// n x n symmetric idempotent of trace k.
struct ProjectionPoint {
  Matrix entries;

  ProjectionPoint() = default;
  explicit ProjectionPoint(Matrix m) : entries(std::move(m)) {}

  Eigen::Index size() const { return entries.rows(); }
  int rank() const { return static_cast<int>(std::lround(entries.trace())); }
};

inline void check_frame(const Frame& f, double tolerance = tol::frame_accept) {
  if (f.k() < 1 || f.n() < f.k()) fail(ErrorCode::FrameInvariantViolation, "frame must be k x n with 1 <= k <= n");
  const double r = f.stiefel_residual();
  if (!(r <= tolerance)) fail(ErrorCode::FrameInvariantViolation, "||FF^t - I|| = " + std::to_string(r));
}

inline void check_projection(const ProjectionPoint& p, double tolerance = tol::frame_accept) {
  const Matrix& m = p.entries;
  if (m.rows() != m.cols() || m.rows() == 0) fail(ErrorCode::ProjectionInvariantViolation, "projection must be square");
  const double sym = (m - m.transpose()).norm();
  const double idem = (m * m - m).norm();
  const double tr = m.trace();
  if (!(sym <= tolerance) || !(idem <= tolerance) || std::abs(tr - std::round(tr)) > tolerance) {
    fail(ErrorCode::ProjectionInvariantViolation,
         "symmetry " + std::to_string(sym) + ", idempotency " + std::to_string(idem) + ", trace " + std::to_string(tr));
  }
}

inline ProjectionPoint gram(const Frame& f) {
  check_frame(f);
  return ProjectionPoint(f.rows.transpose() * f.rows);
}

inline DiagonalTarget schur_horn(const ProjectionPoint& p) {
  check_projection(p);
  return {p.entries.diagonal(), p.rank()};
}

inline DiagonalTarget column_norms_squared(const Frame& f) {
  check_frame(f);
  return {f.rows.colwise().squaredNorm().transpose(), static_cast<int>(f.k())};
}

inline ProjectionPoint complement(const ProjectionPoint& p) {
  check_projection(p);
  return ProjectionPoint(Matrix::Identity(p.size(), p.size()) - p.entries);
}

/// tr(P Diag(a))
inline double height(const ProjectionPoint& p, const Vector& a) {
  if (a.size() != p.size()) fail(ErrorCode::DimensionMismatch, "height vector length must match projection size");
  return p.entries.diagonal().dot(a);
}

/// Orthonormal basis (as rows) of the unit eigenspace of P.
inline Frame factor_projection(const ProjectionPoint& p) {
  check_projection(p);
  const Matrix sym = 0.5 * (p.entries + p.entries.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Vector& ev = es.eigenvalues();
  const int k = p.rank();
  const Eigen::Index n = p.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(ev(i) - 0.5) < tol::spectral) {
      fail(ErrorCode::SpectralGapTooSmall, "eigenvalue too close to 1/2");
    }
  }
  Eigen::Index above = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (ev(i) > 0.5) ++above;
  if (above != k || k < 1) fail(ErrorCode::ProjectionInvariantViolation, "unit eigenspace dimension differs from trace");
  // Eigenvalues ascend; the top k eigenvectors span the image.
  Matrix rows = es.eigenvectors().rightCols(k).transpose();
  return Frame(std::move(rows));
}

/// Nearest matrix with orthonormal rows (polar factor of M).
inline Matrix orthonormalize_rows(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

/// Row-orthonormalised i.i.d. Gaussian k x n matrix; deterministic in `seed`.
inline Frame random_frame(int n, int k, std::uint64_t seed) {
  if (k < 1 || k > n) fail(ErrorCode::RankOutOfRange, "random_frame needs 1 <= k <= n");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(k, n);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = normal(rng);
  // Gram-Schmidt on rows via QR of the transpose keeps the orthogonal-invariant law.
  Eigen::HouseholderQR<Matrix> qr(g.transpose());
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  const Matrix r = qr.matrixQR().topLeftCorner(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    if (r(i, i) < 0) q.col(i) *= -1.0;
  return Frame(q.transpose());
}

/// Permutation matrix g with g e_i = e_{sigma(i)}.
inline Matrix permutation_matrix(const std::vector<int>& sigma) {
  const auto n = static_cast<Eigen::Index>(sigma.size());
  Matrix g = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) g(sigma[static_cast<std::size_t>(i)], i) = 1.0;
  return g;
}

}  // namespace frametop
