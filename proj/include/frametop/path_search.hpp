#pragma once

// Numerical paths in the frame variety F^d_{n,k}: projection onto the
// variety, local interpolate-and-project connections, and a seeded roadmap
// search. Failure of the search is inconclusive, never a proof.

#include "frametop/core.hpp"
#include "frametop/frame_path.hpp"
#include "frametop/grassmann.hpp"
#include "frametop/rotation.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <queue>
#include <random>
#include <vector>

namespace frametop {

/// Constraint residual: upper triangle of FF^t - I followed by ||f_j||^2 - d_j.
inline Vector frame_constraints(const Matrix& f, const Vector& d) {
  const Eigen::Index k = f.rows(), n = f.cols();
  Vector c(k * (k + 1) / 2 + n);
  const Matrix g = f * f.transpose();
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i; j < k; ++j) c(r++) = g(i, j) - (i == j ? 1.0 : 0.0);
  for (Eigen::Index j = 0; j < n; ++j) c(r++) = f.col(j).squaredNorm() - d(j);
  return c;
}

/// Jacobian of frame_constraints with respect to column-major vec(F).
inline Matrix frame_constraint_jacobian(const Matrix& f) {
  const Eigen::Index k = f.rows(), n = f.cols();
  Matrix jac = Matrix::Zero(k * (k + 1) / 2 + n, k * n);
  auto var = [k](Eigen::Index a, Eigen::Index b) { return b * k + a; };
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i; j < k; ++j, ++r) {
      for (Eigen::Index b = 0; b < n; ++b) {
        jac(r, var(i, b)) += f(j, b);
        jac(r, var(j, b)) += f(i, b);
      }
    }
  }
  for (Eigen::Index j = 0; j < n; ++j, ++r)
    for (Eigen::Index a = 0; a < k; ++a) jac(r, var(a, j)) = 2.0 * f(a, j);
  return jac;
}

struct ProjectionOutcome {
  Matrix frame;
  double residual = 0.0;
  bool converged = false;
};

/// Minimum-norm Gauss-Newton correction onto {FF^t = I, ||f_j||^2 = d_j}.
inline ProjectionOutcome project_to_variety(Matrix f, const Vector& d, int max_iters = 60,
                                            double target = 1e-13) {
  ProjectionOutcome out;
  for (int it = 0; it < max_iters; ++it) {
    const Vector c = frame_constraints(f, d);
    out.residual = c.norm();
    if (out.residual <= target) break;
    const Matrix jac = frame_constraint_jacobian(f);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(jac);
    cod.setThreshold(1e-10);
    const Vector step = cod.solve(c);
    f -= Eigen::Map<const Matrix>(step.data(), f.rows(), f.cols());
    if (!f.allFinite()) break;
  }
  out.residual = frame_constraints(f, d).norm();
  out.converged = f.allFinite() && out.residual <= 1e-11;
  out.frame = std::move(f);
  return out;
}

/// R in SO(k) (or O(k) when `allow_reflection`) minimising ||x - R y||.
inline Matrix procrustes(const Matrix& x, const Matrix& y, bool allow_reflection = false) {
  Eigen::JacobiSVD<Matrix> svd(x * y.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix u = svd.matrixU();
  const Matrix v = svd.matrixV();
  if (!allow_reflection && (u * v.transpose()).determinant() < 0) u.col(u.cols() - 1) *= -1.0;
  return u * v.transpose();
}

/// Interpolates x -> y linearly and projects every chord point onto the
/// variety, bisecting intervals whose projected step exceeds `step`. Returns
/// the sampled path or nothing when a projection fails or a jump persists.
inline std::optional<std::vector<Matrix>> local_connect(const Matrix& x, const Matrix& y, const Vector& d,
                                                        double step = kSampleStep, int max_depth = 8) {
  struct Node {
    double t;
    Matrix f;
  };
  auto project_at = [&](double t, const Matrix& warm) -> std::optional<Matrix> {
    const Matrix chord = (1.0 - t) * x + t * y;
    auto res = project_to_variety(chord, d);
    if (!res.converged || (res.frame - warm).norm() > 4.0 * step) {
      // Fall back to the neighbouring sample shifted along the chord.
      auto alt = project_to_variety(warm + 0.5 * (chord - warm), d);
      if (alt.converged && (!res.converged || (alt.frame - warm).norm() < (res.frame - warm).norm())) res = alt;
    }
    if (!res.converged) return std::nullopt;
    return res.frame;
  };
  const double dist = (x - y).norm();
  const int intervals = std::max(8, static_cast<int>(std::ceil(dist / step)));
  std::vector<Node> pts;
  pts.push_back({0.0, x});
  for (int i = 1; i < intervals; ++i) {
    const double t = static_cast<double>(i) / intervals;
    auto f = project_at(t, pts.back().f);
    if (!f) return std::nullopt;
    pts.push_back({t, std::move(*f)});
  }
  pts.push_back({1.0, y});
  for (int depth = 0; depth < max_depth; ++depth) {
    bool refined = false;
    std::vector<Node> next;
    next.push_back(pts.front());
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if ((pts[i].f - pts[i - 1].f).norm() > step) {
        const double tm = 0.5 * (pts[i].t + pts[i - 1].t);
        auto mid = project_at(tm, pts[i - 1].f);
        if (!mid) return std::nullopt;
        next.push_back({tm, std::move(*mid)});
        refined = true;
      }
      next.push_back(pts[i]);
    }
    pts = std::move(next);
    if (!refined) break;
  }
  std::vector<Matrix> out;
  out.reserve(pts.size());
  for (std::size_t i = 1; i < pts.size(); ++i)
    if ((pts[i].f - pts[i - 1].f).norm() > step) return std::nullopt;
  for (auto& node : pts) out.push_back(std::move(node.f));
  return out;
}

/// Samples of R(t) y for t in [0,1], densified to kSampleStep.
inline std::vector<Matrix> rotation_samples(const RotationFamily& fam, const Matrix& y) {
  FramePath tmp;
  append_segment(tmp, PathSegment{}, [&](double t) -> Matrix { return fam.at(t) * y; });
  return tmp.grid;
}

struct SearchBudget {
  int max_nodes = 800;
  int batch = 40;
  int neighbors = 10;
  double radius = 1.6;
  std::uint64_t seed = 1;
};

enum class SearchStatus { Found, Failure };

struct SearchResult {
  SearchStatus status = SearchStatus::Failure;
  FramePath path;
  int nodes = 0;
  int edges = 0;
  std::string detail;
};

namespace detail {

struct Edge {
  int to;
  std::vector<Matrix> samples;  // from this node to `to`
};

// Local path x -> R y followed by the rotation R y -> y.
inline std::optional<std::vector<Matrix>> connect_mod_rotation(const Matrix& x, const Matrix& y, const Vector& d) {
  const Matrix r = procrustes(x, y);
  auto leg = local_connect(x, r * y, d);
  if (!leg) return std::nullopt;
  const RotationFamily fam = so_k_path(r.transpose());
  const Matrix ry = r * y;
  std::vector<Matrix> spin = rotation_samples(fam, ry);
  for (std::size_t i = 1; i < spin.size(); ++i) leg->push_back(spin[i]);
  leg->back() = y;
  return leg;
}

inline double distance_mod_rotation(const Matrix& x, const Matrix& y) { return (x - procrustes(x, y) * y).norm(); }

inline int find_root(std::vector<int>& parent, int a) {
  while (parent[a] != a) a = parent[a] = parent[parent[a]];
  return a;
}

}  // namespace detail

/// Path from f0 to f1 inside F^d: the trivial path, an SO(k) orbit path, or a
/// roadmap over projected random samples joined by local connections.
inline SearchResult numerical_path_search(const Frame& f0, const Frame& f1, const DiagonalTarget& d,
                                          const SearchBudget& budget = {}) {
  for (const Frame* f : {&f0, &f1}) {
    if (f->k() != d.k || f->n() != d.n() || f->stiefel_residual() > tol::frame_build ||
        (f->rows.colwise().squaredNorm().transpose() - d.d).cwiseAbs().maxCoeff() > tol::frame_build) {
      fail(ErrorCode::EndpointInvalid, "endpoint is not in F^d within tol_frame");
    }
  }
  SearchResult out;
  out.path.d = d;
  out.path.start = f0;
  out.path.end = f1;
  const Eigen::Index k = d.k;
  if ((f0.rows - f1.rows).norm() <= tol::frame_build) {
    append_samples(out.path, {SegmentKind::Reparametrized, {}, "trivial", {}, 0, 1, 0, 0}, {f0.rows, f1.rows});
    out.status = SearchStatus::Found;
    return out;
  }
  // Orbit case f1 = R f0 with R in SO(k).
  const Matrix r = f1.rows * f0.rows.transpose();
  if ((r * f0.rows - f1.rows).norm() <= tol::frame_build && r.determinant() > 0) {
    const RotationFamily fam = so_k_path(orthonormalize_rows(r));
    PathSegment seg{SegmentKind::BlockRotation, {}, "orbit rotation", fam.generator(), 0, 1, 0, 0};
    seg.columns.resize(static_cast<std::size_t>(d.n()));
    std::iota(seg.columns.begin(), seg.columns.end(), 0);
    append_segment(out.path, seg, [&](double t) -> Matrix { return fam.at(t) * f0.rows; });
    out.path.grid.back() = f1.rows;
    out.status = SearchStatus::Found;
    return out;
  }

  std::vector<Matrix> nodes{f0.rows, f1.rows};
  std::vector<std::vector<detail::Edge>> adj(2);
  std::vector<int> parent{0, 1};
  std::mt19937_64 rng(budget.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Matrix flip = flip_last(k);

  auto try_link = [&](int a) {
    std::vector<std::pair<double, int>> cand;
    for (int b = 0; b < static_cast<int>(nodes.size()); ++b) {
      if (b == a) continue;
      const double dist = detail::distance_mod_rotation(nodes[a], nodes[b]);
      if (dist <= budget.radius) cand.emplace_back(dist, b);
    }
    std::sort(cand.begin(), cand.end());
    int tried = 0;
    for (const auto& [dist, b] : cand) {
      if (tried++ >= budget.neighbors) break;
      const int ra = detail::find_root(parent, a), rb = detail::find_root(parent, b);
      if (ra == rb) continue;
      auto leg = detail::connect_mod_rotation(nodes[a], nodes[b], d.d);
      if (!leg) continue;
      std::vector<Matrix> back(leg->rbegin(), leg->rend());
      adj[a].push_back({b, std::move(*leg)});
      adj[b].push_back({a, std::move(back)});
      parent[ra] = rb;
      ++out.edges;
    }
  };

  try_link(0);
  try_link(1);
  while (static_cast<int>(nodes.size()) < budget.max_nodes &&
         detail::find_root(parent, 0) != detail::find_root(parent, 1)) {
    for (int s = 0; s < budget.batch && static_cast<int>(nodes.size()) < budget.max_nodes; ++s) {
      Matrix g(k, d.n());
      for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = normal(rng);
      auto proj = project_to_variety(orthonormalize_rows(g), d.d);
      if (!proj.converged) continue;
      // Keep the sample set closed under the reflection D.
      for (const Matrix& m : {proj.frame, Matrix(flip * proj.frame)}) {
        nodes.push_back(m);
        adj.emplace_back();
        parent.push_back(static_cast<int>(parent.size()));
        try_link(static_cast<int>(nodes.size()) - 1);
      }
    }
  }
  out.nodes = static_cast<int>(nodes.size());
  if (detail::find_root(parent, 0) != detail::find_root(parent, 1)) {
    out.detail = "roadmap exhausted without joining the endpoints";
    return out;
  }
  // Breadth-first search over realised edges.
  std::vector<int> prev(nodes.size(), -1), via(nodes.size(), -1);
  std::queue<int> queue;
  queue.push(0);
  prev[0] = 0;
  while (!queue.empty()) {
    const int a = queue.front();
    queue.pop();
    for (int e = 0; e < static_cast<int>(adj[a].size()); ++e) {
      const int b = adj[a][e].to;
      if (prev[b] >= 0) continue;
      prev[b] = a;
      via[b] = e;
      queue.push(b);
    }
  }
  std::vector<int> chain;
  for (int v = 1; v != 0; v = prev[v]) chain.push_back(v);
  std::reverse(chain.begin(), chain.end());
  int at = 0;
  for (int v : chain) {
    const auto& edge = adj[at][via[v]];
    append_samples(out.path, {SegmentKind::Reparametrized, {}, "roadmap edge", {}, 0, 1, 0, 0}, edge.samples);
    at = v;
  }
  out.status = SearchStatus::Found;
  return out;
}

}  // namespace frametop
