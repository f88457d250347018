#pragma once

// Fibers of the diagonal map on the Grassmannian: Riemannian descent onto
// mu^{-1}(d), a sampling estimate of the number of components, and the two
// fibers known in closed form.

#include "frametop/core.hpp"
#include "frametop/grassmann.hpp"
#include "frametop/hypersimplex.hpp"
#include "frametop/parallel.hpp"
#include "frametop/path_search.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

namespace frametop {

/// f(P) = ||diag(P) - d||^2
inline double fiber_objective(const Matrix& p, const Vector& d) { return (p.diagonal() - d).squaredNorm(); }

/// Riemannian gradient PG + GP - 2PGP of f with G = 2 Diag(diag P - d).
inline Matrix fiber_gradient(const Matrix& p, const Vector& d) {
  const Matrix g = (2.0 * (p.diagonal() - d)).asDiagonal();
  const Matrix pg = p * g;
  return pg + pg.transpose() - 2.0 * pg * p;
}

/// Nearest rank-k projection: top-k eigenvectors of the symmetric part.
inline Matrix retract_projection(const Matrix& m, int k) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  const Matrix v = es.eigenvectors().rightCols(k);
  return v * v.transpose();
}

struct DescentOutcome {
  std::optional<ProjectionPoint> point;
  double objective = 0.0;
  int iterations = 0;
};

/// Gradient descent with backtracking (step halving from 1), then a
/// Gauss-Newton polish in frame coordinates once the objective is small.
inline DescentOutcome descend_to_fiber(const ProjectionPoint& p0, const DiagonalTarget& d, int max_iters = 10000) {
  try {
    check_projection(p0, 1e-8);
  } catch (const Error&) {
    fail(ErrorCode::InvalidStart, "starting point is not a projection");
  }
  require_hypersimplex(d);
  if (p0.size() != d.n() || p0.rank() != d.k) fail(ErrorCode::InvalidStart, "starting projection has the wrong size or rank");
  const double target = tol::fiber * tol::fiber;
  DescentOutcome out;
  Matrix p = p0.entries;
  double f = fiber_objective(p, d.d);
  if (f <= target) {
    out.point = p0;
    out.objective = f;
    return out;
  }
  const double polish_at = 1e-6;
  int it = 0;
  for (; it < max_iters && f > target; ++it) {
    if (f <= polish_at) break;
    const Matrix grad = fiber_gradient(p, d.d);
    const double gnorm2 = grad.squaredNorm();
    if (gnorm2 < 1e-28) break;  // critical point off the fiber
    double step = 1.0;
    bool moved = false;
    for (int h = 0; h < 60; ++h, step *= 0.5) {
      const Matrix trial = retract_projection(p - step * grad, d.k);
      const double ft = fiber_objective(trial, d.d);
      if (ft <= f - 1e-4 * step * gnorm2) {
        p = trial;
        f = ft;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (f > target && f <= polish_at) {
    const Frame frame = factor_projection(ProjectionPoint(p));
    const ProjectionOutcome pr = project_to_variety(frame.rows, d.d);
    if (pr.converged) {
      const Matrix q = pr.frame.transpose() * pr.frame;
      if (fiber_objective(q, d.d) < f) {
        p = q;
        f = fiber_objective(q, d.d);
      }
    }
  }
  out.iterations = it;
  out.objective = f;
  if (f <= target) out.point = ProjectionPoint(0.5 * (p + p.transpose()));
  return out;
}

/// Fibers known in closed form: 0/1 targets and (1, 1/3, 1/3, 1/3) with k = 2
/// up to permutation.
inline std::optional<std::vector<ProjectionPoint>> exact_fiber_special(const DiagonalTarget& d) {
  if (!in_hypersimplex(d)) return std::nullopt;
  const int n = d.n();
  bool zero_one = true;
  for (int i = 0; i < n; ++i)
    if (std::abs(d[i]) > tol::sum && std::abs(d[i] - 1.0) > tol::sum) zero_one = false;
  if (zero_one) {
    Matrix p = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      if (d[i] > 0.5) p(i, i) = 1.0;
    return std::vector<ProjectionPoint>{ProjectionPoint(p)};
  }
  if (n != 4 || d.k != 2) return std::nullopt;
  int one = -1;
  std::vector<int> thirds;
  for (int i = 0; i < 4; ++i) {
    if (std::abs(d[i] - 1.0) <= tol::sum) one = i;
    else if (std::abs(d[i] - 1.0 / 3.0) <= tol::sum) thirds.push_back(i);
  }
  if (one < 0 || thirds.size() != 3) return std::nullopt;
  std::vector<ProjectionPoint> out;
  for (int sb : {1, -1}) {
    for (int sc : {1, -1}) {
      Vector v = Vector::Zero(4);
      v(thirds[0]) = 1.0;
      v(thirds[1]) = sb;
      v(thirds[2]) = sc;
      v /= std::sqrt(3.0);
      Matrix p = v * v.transpose();
      p(one, one) = 1.0;
      out.emplace_back(p);
    }
  }
  return out;
}

struct ComponentEstimate {
  int count = 0;
  std::vector<ProjectionPoint> representatives;
  int converged = 0;
  std::vector<std::uint64_t> seeds;
};

/// Seeds for sample i: a splitmix64 stream started from `seed`.
inline std::vector<std::uint64_t> derive_seeds(std::uint64_t seed, int count) {
  std::vector<std::uint64_t> out;
  std::uint64_t x = seed;
  for (int i = 0; i < count; ++i) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    out.push_back(z ^ (z >> 31));
  }
  return out;
}

/// Upper-bound estimate of the number of fiber components: descend from
/// seeded random projections, then link points closer than `link_tol` or
/// joined by a local path in the frame variety (modulo O(k)).
inline ComponentEstimate count_components(const DiagonalTarget& d, int num_samples = 64, double link_tol = 0.05,
                                          int link_attempts = 6, std::uint64_t seed = 1) {
  require_hypersimplex(d);
  const int n = d.n(), k = d.k;
  ComponentEstimate est;
  est.seeds = derive_seeds(seed, num_samples);
  std::vector<std::optional<ProjectionPoint>> found(static_cast<std::size_t>(num_samples));
  parallel_for(static_cast<std::size_t>(num_samples), [&](std::size_t i) {
    const Frame f0 = random_frame(n, k, est.seeds[i]);
    found[i] = descend_to_fiber(ProjectionPoint(f0.rows.transpose() * f0.rows), d).point;
  });
  std::vector<Matrix> pts;
  for (auto& f : found)
    if (f) pts.push_back(f->entries);
  est.converged = static_cast<int>(pts.size());
  if (pts.empty()) fail(ErrorCode::NoConvergedSamples, "no descent reached the fiber");
  // Deterministic order: lexicographic on the entries.
  std::sort(pts.begin(), pts.end(), [](const Matrix& a, const Matrix& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  const std::size_t m = pts.size();
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](int a) { return detail::find_root(parent, a); };
  std::vector<std::tuple<double, int, int>> pairs;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) pairs.emplace_back((pts[a] - pts[b]).norm(), static_cast<int>(a), static_cast<int>(b));
  std::sort(pairs.begin(), pairs.end());
  for (const auto& [dist, a, b] : pairs)
    if (dist <= link_tol) parent[root(a)] = root(b);
  // Frame-level links between remaining components, nearest pairs first.
  std::vector<Matrix> frames;
  frames.reserve(m);
  for (const auto& p : pts) {
    Matrix f = factor_projection(ProjectionPoint(p)).rows;
    auto pr = project_to_variety(f, d.d);
    frames.push_back(pr.converged ? pr.frame : f);
  }
  std::vector<std::vector<int>> tried(m, std::vector<int>(m, 0));
  for (const auto& [dist, a, b] : pairs) {
    const int ra = root(a), rb = root(b);
    if (ra == rb || tried[ra][rb] >= link_attempts) continue;
    ++tried[ra][rb];
    ++tried[rb][ra];
    const Matrix r = procrustes(frames[a], frames[b], /*allow_reflection=*/true);
    if (local_connect(frames[a], r * frames[b], d.d)) parent[root(a)] = root(b);
  }
  std::vector<int> seen;
  for (std::size_t a = 0; a < m; ++a) {
    const int ra = root(static_cast<int>(a));
    if (std::find(seen.begin(), seen.end(), ra) == seen.end()) {
      seen.push_back(ra);
      est.representatives.emplace_back(pts[a]);
    }
  }
  est.count = static_cast<int>(seen.size());
  return est;
}

}  // namespace frametop
