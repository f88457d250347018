#pragma once

// Deterministic d-NTF constructions: a general prescribed-diagonal builder and
// the explicit block frames (doubled, odd, simplex, identity-augmented).

#include "frametop/core.hpp"
#include "frametop/grassmann.hpp"
#include "frametop/hypersimplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace frametop {

struct BuildResult {
  Frame frame;
  int rotations = 0;
};

/// Builds a d-NTF by plane rotations of columns, starting from a coordinate
/// frame. One index carries a fractional norm at a time; every rotation pairs
/// it with an untouched coordinate column and fixes the carrier's norm, so at
/// most n-1 rotations are used.
inline BuildResult build_ntf_counted(const DiagonalTarget& target) {
  require_hypersimplex(target);
  const int n = target.n(), k = target.k;
  const Vector& d = target.d;

  // Unit columns at the k largest targets (ties by smaller index).
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d(a) > d(b); });
  Matrix f = Matrix::Zero(k, n);
  Vector cur = Vector::Zero(n);
  for (int r = 0; r < k; ++r) {
    f(r, order[r]) = 1.0;
    cur(order[r]) = 1.0;
  }

  std::vector<bool> untouched(n, true);
  // Carrier: largest overshoot or undershoot, ties by smaller index.
  int active = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(cur(i) - d(i)) > std::abs(cur(active) - d(active))) active = i;
  untouched[active] = false;

  int rotations = 0;
  for (int step = 0; step < n - 1; ++step) {
    const double v = cur(active);
    const double target_v = std::clamp(d(active), 0.0, 1.0);
    if (std::abs(v - target_v) <= 1e-15) {
      // Already exact: hand over to the untouched column with the largest gap.
      int next = -1;
      for (int i = 0; i < n; ++i)
        if (untouched[i] && (next < 0 || std::abs(cur(i) - d(i)) > std::abs(cur(next) - d(next)))) next = i;
      if (next < 0) break;
      active = next;
      untouched[active] = false;
      continue;
    }
    // Partner value must lie on the far side of the target: 1 to raise, 0 to lower.
    const double want = target_v > v ? 1.0 : 0.0;
    int partner = -1;
    for (int i = 0; i < n; ++i) {
      if (!untouched[i] || cur(i) != want) continue;
      if (partner < 0 || std::abs(cur(i) - d(i)) > std::abs(cur(partner) - d(partner))) partner = i;
    }
    if (partner < 0) break;  // only reachable through rounding at the last index
    // New carrier norm: c^2 v + s^2 w = target, columns are orthogonal.
    const double w = cur(partner);
    const double c2 = std::clamp((target_v - w) / (v - w), 0.0, 1.0);
    const double c = std::sqrt(c2), s = std::sqrt(1.0 - c2);
    const Vector fa = f.col(active), fb = f.col(partner);
    f.col(active) = c * fa + s * fb;
    f.col(partner) = -s * fa + c * fb;
    cur(active) = target_v;
    cur(partner) = v + w - target_v;
    ++rotations;
    active = partner;
    untouched[active] = false;
  }
  return {Frame(std::move(f)), rotations};
}

inline Frame build_ntf(const DiagonalTarget& target) { return build_ntf_counted(target).frame; }

/// k x (k+1) regular simplex frame: unit columns, rows orthogonal with
/// squared norm (k+1)/k, last column -e_k, first row (g, -g, 0, ..., 0).
inline Frame simplex_frame(int k) {
  if (k < 1) fail(ErrorCode::RankOutOfRange, "simplex_frame needs k >= 1");
  Matrix g(1, 2);
  g << 1.0, -1.0;
  for (int m = 2; m <= k; ++m) {
    // Columns 1..m have m-th coordinate 1/m; the rest is the scaled lower simplex.
    const double rho = std::sqrt(1.0 - 1.0 / (static_cast<double>(m) * m));
    Matrix next = Matrix::Zero(m, m + 1);
    next.topLeftCorner(m - 1, m) = rho * g;
    next.row(m - 1).head(m).setConstant(1.0 / m);
    next(m - 1, m) = -1.0;
    g = std::move(next);
  }
  return Frame(std::move(g));
}

/// sqrt(k/(2k+1)) [G | I_k], a k x (2k+1) equal-norm NTF.
inline Frame identity_augmented(int k) {
  if (k < 2) fail(ErrorCode::RankOutOfRange, "identity_augmented needs k >= 2");
  Matrix f(k, 2 * k + 1);
  f.leftCols(k + 1) = simplex_frame(k).rows;
  f.rightCols(k) = Matrix::Identity(k, k);
  f *= std::sqrt(static_cast<double>(k) / (2 * k + 1));
  return Frame(std::move(f));
}

/// (1/sqrt 2) [G | D G] with D = diag(1, ..., 1, -1).
inline Frame doubled_frame(const Frame& g) {
  check_frame(g);
  const Eigen::Index k = g.k(), p = g.n();
  Matrix f(k, 2 * p);
  f.leftCols(p) = g.rows;
  f.rightCols(p) = flip_last(k) * g.rows;
  f /= std::sqrt(2.0);
  return Frame(std::move(f));
}

/// Bottom row g_j = sqrt(d_j - d'_j / 2) of the odd block frame.
inline Vector odd_bottom_row(const Frame& gt, const DiagonalTarget& d) {
  const Eigen::Index p = gt.n();
  const Vector dprime = gt.rows.colwise().squaredNorm().transpose();
  Vector g(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double gap = d[j] - dprime(j) / 2.0;
    if (gap < -tol::frame_build) fail(ErrorCode::NormDeficit, "d_j below d'_j / 2 at index " + std::to_string(j));
    if (std::abs(d[p + j] - d[j]) > kGroupTol) fail(ErrorCode::ShapeMismatch, "d is not of the doubled odd form");
    g(j) = std::sqrt(std::max(gap, 0.0));
  }
  return g;
}

/// Block frame [[G~/sqrt2, -G~/sqrt2, 0], [g, g, sqrt(d_{2p+1})]] for
/// d = (d_1..d_p, d_1..d_p, d_{2p+1}) and a (k-1) x p frame G~.
inline Frame odd_frame(const Frame& gt, const DiagonalTarget& d) {
  check_frame(gt);
  const Eigen::Index p = gt.n(), km1 = gt.k();
  if (d.n() != 2 * p + 1 || d.k != km1 + 1) fail(ErrorCode::ShapeMismatch, "d must have 2p+1 entries and rank k");
  require_hypersimplex(d);
  const Vector g = odd_bottom_row(gt, d);
  Matrix f = Matrix::Zero(km1 + 1, 2 * p + 1);
  f.topLeftCorner(km1, p) = gt.rows / std::sqrt(2.0);
  f.block(0, p, km1, p) = -gt.rows / std::sqrt(2.0);
  f.row(km1).head(p) = g.transpose();
  f.row(km1).segment(p, p) = g.transpose();
  f(km1, 2 * p) = std::sqrt(std::max(d[2 * p], 0.0));
  return Frame(std::move(f));
}

}  // namespace frametop
