#pragma once

// One-parameter rotation families R: [0,1] -> SO(k) built from disjoint
// planar rotations, so R(t) is orthogonal up to rounding for every t.

#include "frametop/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace frametop {

struct RotationPlane {
  Vector a, b;  // orthonormal pair spanning the plane
  double angle = 0.0;
};

/// R(t) = I + sum over planes of (cos t*angle - 1)(aa^t + bb^t) + sin t*angle (ba^t - ab^t).
class RotationFamily {
 public:
  explicit RotationFamily(Eigen::Index k) : k_(k) {}
  RotationFamily(Eigen::Index k, std::vector<RotationPlane> planes) : k_(k), planes_(std::move(planes)) {}

  Eigen::Index dim() const { return k_; }
  const std::vector<RotationPlane>& planes() const { return planes_; }

  Matrix at(double t) const {
    Matrix r = Matrix::Identity(k_, k_);
    for (const auto& pl : planes_) {
      const double c = std::cos(t * pl.angle), s = std::sin(t * pl.angle);
      r += (c - 1.0) * (pl.a * pl.a.transpose() + pl.b * pl.b.transpose()) +
           s * (pl.b * pl.a.transpose() - pl.a * pl.b.transpose());
    }
    return r;
  }

  /// Antisymmetric generator X with R(t) = exp(tX).
  Matrix generator() const {
    Matrix x = Matrix::Zero(k_, k_);
    for (const auto& pl : planes_) x += pl.angle * (pl.b * pl.a.transpose() - pl.a * pl.b.transpose());
    return x;
  }

  RotationFamily inverse() const {
    RotationFamily inv(k_, planes_);
    for (auto& pl : inv.planes_) pl.angle = -pl.angle;
    return inv;
  }

 private:
  Eigen::Index k_;
  std::vector<RotationPlane> planes_;
};

/// Family from I to A through planar angles read off the real Schur form of A.
inline RotationFamily so_k_path(const Matrix& a) {
  const Eigen::Index k = a.rows();
  if (a.cols() != k || k == 0) fail(ErrorCode::NotSpecialOrthogonal, "rotation must be square");
  if ((a.transpose() * a - Matrix::Identity(k, k)).norm() > 1e-10 || std::abs(a.determinant() - 1.0) > 1e-10) {
    fail(ErrorCode::NotSpecialOrthogonal, "A^t A != I or det A != 1");
  }
  if (k == 1) return RotationFamily(1);
  Eigen::RealSchur<Matrix> schur(a);
  const Matrix& t = schur.matrixT();
  const Matrix& q = schur.matrixU();
  std::vector<RotationPlane> planes;
  std::vector<Eigen::Index> minus;
  for (Eigen::Index i = 0; i < k;) {
    if (i + 1 < k && t(i + 1, i) != 0.0) {
      const double s = 0.5 * (t(i + 1, i) - t(i, i + 1));
      const double c = 0.5 * (t(i, i) + t(i + 1, i + 1));
      planes.push_back({q.col(i), q.col(i + 1), std::atan2(s, c)});
      i += 2;
    } else {
      if (t(i, i) < 0.0) minus.push_back(i);
      ++i;
    }
  }
  if (minus.size() % 2 != 0) fail(ErrorCode::NotSpecialOrthogonal, "odd number of -1 eigenvalues");
  for (std::size_t m = 0; m < minus.size(); m += 2) {
    planes.push_back({q.col(minus[m]), q.col(minus[m + 1]), std::numbers::pi});
  }
  RotationFamily fam(k, std::move(planes));
  if ((fam.at(1.0) - a).norm() > 1e-9) fail(ErrorCode::NotSpecialOrthogonal, "Schur reconstruction failed");
  return fam;
}

/// Single-plane family whose endpoint maps u to v (||u|| = ||v||).
inline RotationFamily rotation_taking(const Vector& u, const Vector& v) {
  const Eigen::Index k = u.size();
  const double nu = u.norm();
  if (nu <= 1e-300 || (u - v).norm() <= 1e-15 * std::max(1.0, nu)) return RotationFamily(k);
  if (k == 1) fail(ErrorCode::NotSpecialOrthogonal, "no rotation of R^1 maps u to -u");
  const Vector a = u / nu;
  Vector b = v / v.norm() - a.dot(v / v.norm()) * a;
  const double cos_angle = std::clamp(a.dot(v) / v.norm(), -1.0, 1.0);
  if (b.norm() < 1e-12) {
    // v = -u: any unit vector orthogonal to u works.
    Eigen::Index axis = 0;
    a.cwiseAbs().minCoeff(&axis);
    b = Vector::Unit(k, axis) - a(axis) * a;
  }
  b.normalize();
  const double sin_angle = (v / v.norm()).dot(b);
  return RotationFamily(k, {RotationPlane{a, b, std::atan2(sin_angle, cos_angle)}});
}

}  // namespace frametop
