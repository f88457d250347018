#pragma once

// Connectivity certificates: explicit paths from a frame F to D F with
// det D = -1, assembled from block rotations (column switches), the odd block
// construction, the explicit n = 2k+1 rotation, duality lifts and, for the
// rank-two base cases, a numerical search.

#include "frametop/core.hpp"
#include "frametop/frame_builder.hpp"
#include "frametop/frame_path.hpp"
#include "frametop/grassmann.hpp"
#include "frametop/hypersimplex.hpp"
#include "frametop/path_search.hpp"
#include "frametop/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace frametop {

/// Path swapping the heads of two blocks. Columns of `part_i` form alpha times
/// an NTF and columns of `part_j` beta times an NTF; heads must have equal norm.
inline FramePath switch_path(const Frame& f, const std::vector<int>& part_i, const std::vector<int>& part_j,
                             double alpha, double beta) {
  check_frame(f);
  const int n = static_cast<int>(f.n());
  const Eigen::Index k = f.k();
  std::set<int> seen;
  for (int c : part_i) seen.insert(c);
  for (int c : part_j) seen.insert(c);
  if (part_i.empty() || part_j.empty() || static_cast<int>(part_i.size() + part_j.size()) != n ||
      static_cast<int>(seen.size()) != n || *seen.begin() < 0 || *seen.rbegin() >= n) {
    fail(ErrorCode::PartitionInvalid, "index lists must partition the columns");
  }
  if (std::abs(alpha * alpha + beta * beta - 1.0) > tol::path) fail(ErrorCode::BlockNotNTF, "alpha^2 + beta^2 != 1");
  auto block_gram = [&](const std::vector<int>& cols) {
    Matrix g = Matrix::Zero(k, k);
    for (int c : cols) g += f.rows.col(c) * f.rows.col(c).transpose();
    return g;
  };
  const Matrix id = Matrix::Identity(k, k);
  if ((block_gram(part_i) - alpha * alpha * id).norm() > tol::path ||
      (block_gram(part_j) - beta * beta * id).norm() > tol::path) {
    fail(ErrorCode::BlockNotNTF, "a block is not a scaled NTF");
  }
  const int hi = part_i.front(), hj = part_j.front();
  if (std::abs(f.rows.col(hi).squaredNorm() - f.rows.col(hj).squaredNorm()) > tol::path) {
    fail(ErrorCode::HeadNormMismatch, "heads have different norms");
  }

  FramePath path;
  path.d = DiagonalTarget(f.rows.colwise().squaredNorm().transpose(), static_cast<int>(k));
  path.start = f;
  const RotationFamily a = rotation_taking(f.rows.col(hi), f.rows.col(hj));
  // Stage 1: rotate block I by A(t).
  PathSegment s1{SegmentKind::BlockRotation, part_i, "switch stage 1", a.generator(), 0, 1, 0, 0};
  append_segment(path, s1, [&](double t) -> Matrix {
    Matrix m = f.rows;
    const Matrix r = a.at(t);
    for (int c : part_i) m.col(c) = r * f.rows.col(c);
    return m;
  });
  Matrix f2 = path.grid.back();
  // Stage 2: rotate {j1} + I \ {i1} by A(t)^t.
  std::vector<int> second{hj};
  second.insert(second.end(), part_i.begin() + 1, part_i.end());
  const RotationFamily back = a.inverse();
  PathSegment s2{SegmentKind::BlockRotation, second, "switch stage 2", back.generator(), 0, 1, 0, 0};
  append_segment(path, s2, [&](double t) -> Matrix {
    Matrix m = f2;
    const Matrix r = back.at(t);
    for (int c : second) m.col(c) = r * f2.col(c);
    return m;
  });
  // Snap the endpoint to the exact swap.
  Matrix swapped = f.rows;
  swapped.col(hi) = f.rows.col(hj);
  swapped.col(hj) = f.rows.col(hi);
  if ((path.grid.back() - swapped).norm() <= tol::frame_build) path.grid.back() = swapped;
  path.end = Frame(path.grid.back());
  return path;
}

namespace detail {

inline ConnectivityCertificate finish(DiagonalTarget user_d, Frame canonical_frame, Matrix reflection,
                                      FramePath canonical_path, std::vector<int> perm, std::string route) {
  ConnectivityCertificate cert;
  cert.d = std::move(user_d);
  cert.reflection = std::move(reflection);
  cert.frame = Frame(to_user_columns(canonical_frame.rows, perm));
  cert.path = to_user_columns(canonical_path, perm, cert.d);
  cert.path.d = cert.d;
  cert.path.start = cert.frame;
  cert.path.end = Frame(cert.reflection * cert.frame.rows);
  // Exact endpoints; the grid differs from them only by rounding.
  if ((cert.path.grid.front() - cert.path.start.rows).norm() <= tol::frame_build) cert.path.grid.front() = cert.path.start.rows;
  if ((cert.path.grid.back() - cert.path.end.rows).norm() <= tol::frame_build) cert.path.grid.back() = cert.path.end.rows;
  cert.permutation = std::move(perm);
  cert.route = std::move(route);
  cert.report = verify_certificate(cert);
  return cert;
}

inline bool is_identity(const std::vector<int>& perm) {
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (perm[i] != static_cast<int>(i)) return false;
  return true;
}

}  // namespace detail

/// Doubled targets with all entries at most 1/2 and p >= k: switch every pair
/// r <-> p+r of (1/sqrt2)[G | DG].
inline ConnectivityCertificate certify_prop_first(const DiagonalTarget& d) {
  require_hypersimplex(d);
  auto perm = match_doubled(d.d);
  const int p = d.n() / 2;
  if (!perm || p < d.k) fail(ErrorCode::PatternMismatch, "d is not of the doubled form with p >= k");
  const Vector canon = permute(d.d, *perm);
  if (canon.maxCoeff() > 0.5 + tol::sum) fail(ErrorCode::PatternMismatch, "doubled entries exceed 1/2");
  if (!satisfies_hypothesis(d)) fail(ErrorCode::HypothesisViolation, "sum of the n-k smallest entries is below 1");
  Vector half(p);
  for (int r = 0; r < p; ++r) half(r) = std::clamp(canon(r) + canon(p + r), 0.0, 1.0);  // 2 d_r
  half *= static_cast<double>(d.k) / half.sum();
  const Frame g = build_ntf(DiagonalTarget(half, d.k));
  const Frame f = doubled_frame(g);
  const double a = 1.0 / std::sqrt(2.0);

  FramePath path;
  path.d = DiagonalTarget(f.rows.colwise().squaredNorm().transpose(), d.k);
  path.start = f;
  std::vector<int> left(p), right(p);
  std::iota(left.begin(), left.end(), 0);
  std::iota(right.begin(), right.end(), p);
  Frame cur = f;
  for (int r = 0; r < p; ++r) {
    // Head of each block first; after the switch the heads trade blocks.
    std::rotate(left.begin(), std::find(left.begin(), left.end(), r), left.end());
    std::rotate(right.begin(), std::find(right.begin(), right.end(), p + r), right.end());
    FramePath leg = switch_path(cur, left, right, a, a);
    append_path(path, leg);
    std::swap(left.front(), right.front());
    cur = leg.end;
  }
  const bool swapped = !detail::is_identity(*perm);
  return detail::finish(d, f, flip_last(d.k), std::move(path), swapped ? *perm : std::vector<int>{}, "prop-first");
}

/// Odd targets (d_1..d_p, d_1..d_p, d_{2p+1}) with d_i >= d'_i/2, given a
/// certificate for d'. Rotates every column by diag(B, -1), then runs the
/// certificate path backwards in the top k-1 rows.
inline ConnectivityCertificate certify_prop_second(const DiagonalTarget& d, const DiagonalTarget& dprime,
                                                   const ConnectivityCertificate& subcert) {
  require_hypersimplex(d);
  require_hypersimplex(dprime);
  const int n = d.n(), k = d.k;
  if (n % 2 != 1 || dprime.n() != n / 2 || dprime.k != k - 1) {
    fail(ErrorCode::PatternMismatch, "need n = 2p+1, d' in the hypersimplex for (p, k-1)");
  }
  const int p = n / 2;
  if (subcert.d.n() != p || subcert.d.k != k - 1 || (subcert.d.d - dprime.d).cwiseAbs().maxCoeff() > tol::frame_build) {
    fail(ErrorCode::SubcertificateInvalid, "subcertificate is for a different target");
  }
  const VerificationReport sub = verify_certificate(subcert);
  if (!sub.passed) fail(ErrorCode::SubcertificateInvalid, "subcertificate does not verify: " + sub.failure);
  auto perm = match_odd(d.d, dprime.d, tol::frame_build);
  if (!perm) {
    if (match_odd(d.d, dprime.d, 2.0)) fail(ErrorCode::NormDeficit, "some d_i is below d'_i / 2");
    fail(ErrorCode::PatternMismatch, "d is not of the odd doubled form");
  }
  const DiagonalTarget canon(permute(d.d, *perm), k);
  const Matrix& gt = subcert.frame.rows;
  const Frame f = odd_frame(Frame(gt), canon);
  const Matrix& b = subcert.reflection;

  FramePath path;
  path.d = canon;
  path.start = f;
  // Stage 1: F -> D'F with D' = diag(B, -1) in SO(k).
  Matrix dp = Matrix::Zero(k, k);
  dp.topLeftCorner(k - 1, k - 1) = b;
  dp(k - 1, k - 1) = -1.0;
  const RotationFamily fam = so_k_path(dp);
  PathSegment s1{SegmentKind::BlockRotation, {}, "rotate all columns to diag(B,-1)", fam.generator(), 0, 1, 0, 0};
  s1.columns.resize(static_cast<std::size_t>(n));
  std::iota(s1.columns.begin(), s1.columns.end(), 0);
  append_segment(path, s1, [&](double t) -> Matrix { return fam.at(t) * f.rows; });
  // Stage 2: top rows follow the subcertificate path from B G~ back to G~.
  const Matrix bottom = -f.rows.row(k - 1);
  std::vector<Matrix> lifted;
  lifted.reserve(subcert.path.grid.size());
  const double r2 = 1.0 / std::sqrt(2.0);
  for (auto it = subcert.path.grid.rbegin(); it != subcert.path.grid.rend(); ++it) {
    Matrix m = Matrix::Zero(k, n);
    m.topLeftCorner(k - 1, p) = r2 * *it;
    m.block(0, p, k - 1, p) = -r2 * *it;
    m.row(k - 1) = bottom;
    lifted.push_back(std::move(m));
  }
  append_samples(path, {SegmentKind::Reparametrized, {}, "lifted reverse of " + subcert.route, {}, 0, 1, 0, 0}, lifted);
  path.end = Frame(path.grid.back());
  const bool swapped = !detail::is_identity(*perm);
  return detail::finish(d, f, flip_last(k), std::move(path), swapped ? *perm : std::vector<int>{},
                        "prop-second[" + subcert.route + "]");
}

/// Certificate for (1-d, n-k): continuous orthonormal completions of every
/// grid frame, with B = delta(1) delta(0)^t as the reflection.
inline ConnectivityCertificate duality_lift(const ConnectivityCertificate& cert, double step_max = tol::step_max) {
  const VerificationReport rep = verify_certificate(cert);
  if (!rep.passed) fail(ErrorCode::SubcertificateInvalid, "certificate to lift does not verify: " + rep.failure);
  const int n = cert.d.n(), k = cert.d.k, m = n - k;
  if (m < 1) fail(ErrorCode::RankOutOfRange, "dual rank must be positive");
  const auto& grid = cert.path.grid;
  const Matrix id = Matrix::Identity(n, n);

  // Initial completion: eigenvectors of I - P for eigenvalue 1.
  const Matrix q0 = id - grid.front().transpose() * grid.front();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (q0 + q0.transpose()));
  Matrix delta = es.eigenvectors().rightCols(m).transpose();

  FramePath path;
  path.d = dual_target(cert.d);
  std::vector<Matrix> lifted;
  lifted.reserve(grid.size());
  lifted.push_back(delta);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const Matrix q = id - grid[i].transpose() * grid[i];
    Matrix next = orthonormalize_rows(delta * q);
    next = orthonormalize_rows(next * q);  // one more sweep to land on the complement
    const double step = (next - delta).norm();
    if (!(step <= step_max)) {
      fail(ErrorCode::CompletionDiscontinuity,
           "completion jumps by " + std::to_string(step) + " at grid index " + std::to_string(i));
    }
    lifted.push_back(next);
    delta = std::move(next);
  }
  Matrix b = lifted.back() * lifted.front().transpose();
  const double det = b.determinant();
  if (std::abs(det - 1.0) <= 1e-6) fail(ErrorCode::DetSignUnexpected, "lifted endpoint relation has det +1");
  b = orthonormalize_rows(b);
  lifted.back() = b * lifted.front();
  path.start = Frame(lifted.front());
  path.end = Frame(lifted.back());
  append_samples(path, {SegmentKind::Reparametrized, {}, "complement of " + cert.route, {}, 0, 1, 0, 0}, lifted);
  return detail::finish(dual_target(cert.d), Frame(lifted.front()), b, std::move(path), {}, "duality[" + cert.route + "]");
}

/// Equal-norm n = 2k+1: three switches, the explicit rotation of columns
/// k+1, k+2 over t in [pi/2, pi], and a final switch; D = diag(-1, 1, ..., 1).
inline ConnectivityCertificate step1_path(int k) {
  if (k < 2) fail(ErrorCode::RankOutOfRange, "step1_path needs k >= 2");
  const int n = 2 * k + 1;
  const Frame f = identity_augmented(k);
  const double alpha = std::sqrt((k + 1.0) / n), beta = std::sqrt(static_cast<double>(k) / n);
  const double c = beta;

  FramePath path;
  path.d = equal_norm_target(n, k);
  path.start = f;
  // Blocks in 0-based indices: simplex columns 0..k, identity columns k+1..2k.
  std::vector<int> gblock(k + 1), iblock(k);
  std::iota(gblock.begin(), gblock.end(), 0);
  std::iota(iblock.begin(), iblock.end(), k + 1);
  Frame cur = f;
  auto do_switch = [&](int a, int b) {
    // a lies in the simplex-scaled block, b in the identity-scaled block.
    auto in = [](const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); };
    if (!in(gblock, a)) std::swap(a, b);
    std::rotate(gblock.begin(), std::find(gblock.begin(), gblock.end(), a), gblock.end());
    std::rotate(iblock.begin(), std::find(iblock.begin(), iblock.end(), b), iblock.end());
    FramePath leg = switch_path(cur, gblock, iblock, alpha, beta);
    append_path(path, leg);
    std::swap(gblock.front(), iblock.front());
    cur = leg.end;
  };
  do_switch(0, k + 1);
  do_switch(1, 0);
  do_switch(1, k + 1);

  // Explicit rotation in the plane of e_1, e_k for columns k, k+1.
  const Matrix base = cur.rows;
  PathSegment rot{SegmentKind::Step1Rotation, {k, k + 1}, "t in [pi/2, pi]", {}, std::numbers::pi / 2, std::numbers::pi, 0, 0};
  append_segment(path, rot, [&](double s) -> Matrix {
    const double t = std::numbers::pi / 2 + s * std::numbers::pi / 2;
    Matrix m = base;
    m.col(k).setZero();
    m.col(k + 1).setZero();
    m(0, k) = c * std::cos(t);
    m(k - 1, k) = -c * std::sin(t);
    m(0, k + 1) = c * std::sin(t);
    m(k - 1, k + 1) = c * std::cos(t);
    return m;
  });
  cur = Frame(path.grid.back());
  // Final switch of columns k, k+1: {k, k+2..2k} is a beta-block, {k+1, 0..k-1} an alpha-block.
  std::vector<int> part_i{k}, part_j{k + 1};
  for (int c2 = k + 2; c2 < n; ++c2) part_i.push_back(c2);
  for (int c2 = 0; c2 < k; ++c2) part_j.push_back(c2);
  append_path(path, switch_path(cur, part_i, part_j, beta, alpha));
  return detail::finish(equal_norm_target(n, k), f, flip_first(k), std::move(path), {}, "step1(" + std::to_string(k) + ")");
}

/// (n_0, k_0) = (n, k), then n' = (n-1)/2, k' = k-1 with k' replaced by n'-k'
/// when n < 4k-1; stops at even n, n = 2k+1 or k = 2.
inline std::vector<std::pair<int, int>> reduction_sequence(int n, int k) {
  if (k < 2 || k > n - 2) fail(ErrorCode::RankOutOfRange, "need 2 <= k <= n-2");
  std::vector<std::pair<int, int>> seq{{n, k}};
  while (true) {
    const auto [ni, ki] = seq.back();
    if (ni % 2 == 0 || ni == 2 * ki + 1 || ki == 2) break;
    if (ni < 2 * ki + 1) break;  // only the starting pair can sit below 2k+1; duality handles it
    const int nn = (ni - 1) / 2, kp = ki - 1;
    seq.emplace_back(nn, ni >= 4 * ki - 1 ? kp : nn - kp);
  }
  return seq;
}

/// Rank-two base case: numerical search from F to diag(1, -1) F.
inline ConnectivityCertificate certify_numerical(const DiagonalTarget& d, const SearchBudget& budget = {}) {
  require_hypersimplex(d);
  const Frame f = build_ntf(d);
  const Matrix refl = flip_last(d.k);
  SearchResult res = numerical_path_search(f, Frame(refl * f.rows), d, budget);
  if (res.status != SearchStatus::Found) {
    fail(ErrorCode::BaseCaseUnverified, "base case unverified: " + res.detail);
  }
  return detail::finish(d, f, refl, std::move(res.path), {}, "numerical(" + std::to_string(res.nodes) + " nodes)");
}

inline ConnectivityCertificate certify_equal_norm(int n, int k, const SearchBudget& budget = {}) {
  if (k < 2 || k > n - 2) fail(ErrorCode::RankOutOfRange, "equal-norm frames are disconnected unless 2 <= k <= n-2");
  if (n % 2 == 0) {
    if (2 * k <= n) return certify_prop_first(equal_norm_target(n, k));
    return duality_lift(certify_prop_first(equal_norm_target(n, n - k)));
  }
  if (n == 2 * k + 1) return step1_path(k);
  if (2 * k > n) return duality_lift(certify_equal_norm(n, n - k, budget));
  if (k == 2) return certify_numerical(equal_norm_target(n, k), budget);
  // n odd, n > 2k+1, k >= 3: odd construction over the pair (p, k-1).
  const int p = (n - 1) / 2;
  const ConnectivityCertificate sub = certify_equal_norm(p, k - 1, budget);
  return certify_prop_second(equal_norm_target(n, k), equal_norm_target(p, k - 1), sub);
}

namespace detail {

inline std::optional<ConnectivityCertificate> certify_constructive(const DiagonalTarget& d, const SearchBudget& budget) {
  const int n = d.n(), k = d.k;
  if (d.d.maxCoeff() - d.d.minCoeff() <= kGroupTol && equal_norm_admissible(n, k)) {
    ConnectivityCertificate c = certify_equal_norm(n, k, budget);
    // Equal entries: the user vector may differ from k/n only by rounding.
    c.d = d;
    c.path.d = d;
    c.report = verify_certificate(c);
    return c;
  }
  if (!satisfies_hypothesis(d)) return std::nullopt;
  if (match_prop_first(d) && n / 2 >= k) return certify_prop_first(d);
  if (match_prop_second(d)) {
    const int p = n / 2;
    return certify_prop_second(d, equal_norm_target(p, k - 1), certify_equal_norm(p, k - 1, budget));
  }
  return std::nullopt;
}

}  // namespace detail

/// Certificate for any target covered by the constructions, directly or through
/// the dual; rank-two (or corank-two) targets fall back to the numerical search.
inline ConnectivityCertificate certify_target(const DiagonalTarget& d, const SearchBudget& budget = {}) {
  require_hypersimplex(d);
  if (auto c = detail::certify_constructive(d, budget)) return *c;
  const DiagonalTarget dual = dual_target(d);
  if (auto c = detail::certify_constructive(dual, budget)) {
    ConnectivityCertificate lifted = duality_lift(*c);
    lifted.d = d;
    lifted.path.d = d;
    lifted.report = verify_certificate(lifted);
    return lifted;
  }
  if (d.k == 2 && d.n() >= 4) return certify_numerical(d, budget);
  if (d.n() - d.k == 2 && d.n() >= 4) {
    ConnectivityCertificate lifted = duality_lift(certify_numerical(dual, budget));
    lifted.d = d;
    lifted.path.d = d;
    lifted.report = verify_certificate(lifted);
    return lifted;
  }
  fail(ErrorCode::PatternMismatch, "no construction applies to this target");
}

}  // namespace frametop
