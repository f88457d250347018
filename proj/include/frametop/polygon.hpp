#pragma once

// Rank-two frames as closed planar polygons: column z_j (as a complex number)
// gives the edge z_j^2 / 2.

#include "frametop/core.hpp"
#include "frametop/grassmann.hpp"
#include "frametop/hypersimplex.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace frametop {

struct Polygon {
  std::vector<std::array<double, 2>> edges;
  std::vector<double> r;

  /// |sum of edges|
  double closure_residual() const {
    double x = 0.0, y = 0.0;
    for (const auto& e : edges) {
      x += e[0];
      y += e[1];
    }
    return std::hypot(x, y);
  }
};

inline Polygon frame_to_polygon(const Frame& f) {
  if (f.k() != 2) fail(ErrorCode::NotRankTwo, "polygons come from frames with k = 2");
  check_frame(f);
  Polygon poly;
  for (Eigen::Index j = 0; j < f.n(); ++j) {
    const double a = f.rows(0, j), b = f.rows(1, j);
    // (a + ib)^2 / 2
    poly.edges.push_back({0.5 * (a * a - b * b), a * b});
    poly.r.push_back(0.5 * (a * a + b * b));
  }
  return poly;
}

/// Three distinct indices whose pairwise side sums all exceed 1/2.
inline bool km_disconnected(const std::vector<double>& r) {
  double sum = 0.0;
  for (double x : r) {
    if (x < -tol::poly) fail(ErrorCode::NotNormalized, "side lengths must be non-negative");
    sum += x;
  }
  if (std::abs(sum - 1.0) > tol::poly) fail(ErrorCode::NotNormalized, "side lengths must sum to 1");
  Vector v(static_cast<Eigen::Index>(r.size()));
  for (std::size_t i = 0; i < r.size(); ++i) v(static_cast<Eigen::Index>(i)) = r[i];
  return find_km_triple(v, 0.5, tol::poly).has_value();
}

/// Three distinct indices with d_i + d_j > 1 pairwise; equivalent to
/// km_disconnected(d / 2).
inline bool frame_km_criterion(const DiagonalTarget& d) {
  if (d.k != 2) fail(ErrorCode::NotRankTwo, "the polygon criterion needs k = 2");
  require_hypersimplex(d);
  return find_km_triple(d.d, 1.0).has_value();
}

}  // namespace frametop
