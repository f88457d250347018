#pragma once

// Discrete paths in the frame variety and their verification.

#include "frametop/core.hpp"
#include "frametop/grassmann.hpp"
#include "frametop/hypersimplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace frametop {

enum class SegmentKind { BlockRotation, Step1Rotation, Reparametrized };

inline std::string_view to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::BlockRotation: return "BlockRotation";
    case SegmentKind::Step1Rotation: return "Step1Rotation";
    case SegmentKind::Reparametrized: return "Reparametrized";
  }
  return "Reparametrized";
}

struct PathSegment {
  SegmentKind kind = SegmentKind::Reparametrized;
  std::vector<int> columns;  // columns that move; empty means recorded elsewhere
  std::string note;
  Matrix generator;          // antisymmetric generator for BlockRotation, else empty
  double t_begin = 0.0, t_end = 1.0;
  std::size_t first = 0, last = 0;  // grid index range, inclusive
};

struct FramePath {
  DiagonalTarget d;
  Frame start, end;
  std::vector<PathSegment> segments;
  std::vector<Matrix> grid;
};

/// Grid density: every segment gets at least this many intervals.
inline constexpr int kMinSamples = 64;
/// Segments are refined until consecutive frames differ by at most this much;
/// kept well below tol::step_max so derived paths (duality lifts) stay within it.
inline constexpr double kSampleStep = 0.02;

/// Appends segment samples of `eval` on [0,1] to `path`, refining the uniform
/// grid until consecutive frames are within kSampleStep.
inline void append_segment(FramePath& path, PathSegment seg, const std::function<Matrix(double)>& eval) {
  int intervals = kMinSamples;
  std::vector<Matrix> samples;
  for (int attempt = 0; attempt < 12; ++attempt) {
    samples.clear();
    samples.reserve(static_cast<std::size_t>(intervals) + 1);
    double worst = 0.0;
    for (int i = 0; i <= intervals; ++i) {
      samples.push_back(eval(static_cast<double>(i) / intervals));
      if (i > 0) worst = std::max(worst, (samples[i] - samples[i - 1]).norm());
    }
    if (worst <= kSampleStep) break;
    intervals = static_cast<int>(std::ceil(intervals * worst / kSampleStep * 1.1));
  }
  std::size_t begin = 0;
  if (!path.grid.empty() && (path.grid.back() - samples.front()).norm() <= tol::frame_build) begin = 1;
  seg.first = path.grid.empty() ? 0 : path.grid.size() - (begin == 1 ? 1 : 0);
  for (std::size_t i = begin; i < samples.size(); ++i) path.grid.push_back(std::move(samples[i]));
  seg.last = path.grid.size() - 1;
  path.segments.push_back(std::move(seg));
}

/// Appends an already sampled sequence of frames as one segment.
inline void append_samples(FramePath& path, PathSegment seg, const std::vector<Matrix>& samples) {
  std::size_t begin = 0;
  if (!path.grid.empty() && !samples.empty() && (path.grid.back() - samples.front()).norm() <= tol::frame_build) begin = 1;
  seg.first = path.grid.empty() ? 0 : path.grid.size() - (begin == 1 ? 1 : 0);
  for (std::size_t i = begin; i < samples.size(); ++i) path.grid.push_back(samples[i]);
  seg.last = path.grid.empty() ? 0 : path.grid.size() - 1;
  path.segments.push_back(std::move(seg));
}

/// Concatenates `tail` onto `head`, shifting its segment ranges.
inline void append_path(FramePath& head, const FramePath& tail) {
  if (tail.grid.empty()) return;
  const bool skip = !head.grid.empty() && (head.grid.back() - tail.grid.front()).norm() <= tol::frame_build;
  const std::size_t offset = head.grid.empty() ? 0 : head.grid.size() - (skip ? 1 : 0);
  for (std::size_t i = skip ? 1 : 0; i < tail.grid.size(); ++i) head.grid.push_back(tail.grid[i]);
  for (auto seg : tail.segments) {
    seg.first += offset;
    seg.last += offset;
    head.segments.push_back(std::move(seg));
  }
  head.end = tail.end;
}

struct VerificationReport {
  bool passed = false;
  double max_stiefel_residual = 0.0;
  double max_norm_residual = 0.0;
  double max_step = 0.0;
  double start_residual = 0.0;
  double end_residual = 0.0;
  double det_d = 0.0;
  double d_orthogonality = 0.0;
  std::size_t grid_size = 0;
  long worst_index = -1;
  double tol = tol::path;
  double step_max = tol::step_max;
  std::string failure;
};

inline VerificationReport verify_path(const FramePath& path, double tolerance = tol::path,
                                      double step_max = tol::step_max) {
  VerificationReport rep;
  rep.tol = tolerance;
  rep.step_max = step_max;
  rep.grid_size = path.grid.size();
  if (path.grid.empty()) {
    rep.failure = "empty grid";
    return rep;
  }
  const Eigen::Index n = path.d.n();
  double worst = -1.0;
  for (std::size_t i = 0; i < path.grid.size(); ++i) {
    const Matrix& f = path.grid[i];
    if (f.cols() != n || f.rows() != path.d.k) {
      rep.failure = "grid frame " + std::to_string(i) + " has the wrong shape";
      rep.worst_index = static_cast<long>(i);
      return rep;
    }
    const double st = (f * f.transpose() - Matrix::Identity(f.rows(), f.rows())).norm();
    const double nr = (f.colwise().squaredNorm().transpose() - path.d.d).cwiseAbs().maxCoeff();
    const double step = i > 0 ? (f - path.grid[i - 1]).norm() : 0.0;
    rep.max_stiefel_residual = std::max(rep.max_stiefel_residual, st);
    rep.max_norm_residual = std::max(rep.max_norm_residual, nr);
    rep.max_step = std::max(rep.max_step, step);
    const double badness = std::max({st / tolerance, nr / tolerance, step / step_max});
    if (!std::isfinite(badness) || badness > worst) {
      worst = std::isfinite(badness) ? badness : 1e300;
      rep.worst_index = static_cast<long>(i);
    }
  }
  rep.start_residual = path.start.rows.size() ? (path.grid.front() - path.start.rows).norm() : 0.0;
  rep.end_residual = path.end.rows.size() ? (path.grid.back() - path.end.rows).norm() : 0.0;
  if (!(rep.max_stiefel_residual <= tolerance)) rep.failure = "frame residual exceeds tolerance";
  else if (!(rep.max_norm_residual <= tolerance)) rep.failure = "column norm residual exceeds tolerance";
  else if (!(rep.max_step <= step_max)) rep.failure = "grid step exceeds step_max";
  else if (!(rep.start_residual <= tolerance) || !(rep.end_residual <= tolerance)) rep.failure = "endpoint mismatch";
  rep.passed = rep.failure.empty();
  if (!rep.passed && rep.failure.find("tolerance") != std::string::npos) {
    rep.failure += " at grid index " + std::to_string(rep.worst_index);
  } else if (!rep.passed && rep.failure.find("step") != std::string::npos) {
    rep.failure += " at grid index " + std::to_string(rep.worst_index);
  }
  return rep;
}

/// A verified path from F to D F with det D = -1 proves the frame space connected.
struct ConnectivityCertificate {
  DiagonalTarget d;
  Frame frame;
  Matrix reflection;  // D
  FramePath path;
  VerificationReport report;
  std::vector<int> permutation;  // canonical slot -> user index, identity when empty
  std::string route;

  int k() const { return d.k; }
};

inline VerificationReport verify_certificate(const ConnectivityCertificate& cert, double tolerance = tol::path,
                                             double step_max = tol::step_max) {
  FramePath path = cert.path;
  path.d = cert.d;
  path.start = cert.frame;
  path.end = Frame(cert.reflection * cert.frame.rows);
  VerificationReport rep;
  if (cert.reflection.rows() != cert.d.k || cert.reflection.cols() != cert.d.k || cert.frame.k() != cert.d.k ||
      cert.frame.n() != cert.d.n()) {
    rep.failure = "certificate shapes are inconsistent";
    return rep;
  }
  rep = verify_path(path, tolerance, step_max);
  rep.det_d = cert.reflection.determinant();
  rep.d_orthogonality =
      (cert.reflection * cert.reflection.transpose() - Matrix::Identity(cert.d.k, cert.d.k)).norm();
  if (rep.passed) {
    if (std::abs(rep.det_d + 1.0) > 1e-10) rep.failure = "det D is not -1";
    else if (rep.d_orthogonality > 1e-10) rep.failure = "D is not orthogonal";
    rep.passed = rep.failure.empty();
  }
  return rep;
}

/// Moves canonical column c to user column perm[c] in every frame of the path.
inline Matrix to_user_columns(const Matrix& canonical, const std::vector<int>& perm) {
  if (perm.empty()) return canonical;
  Matrix out(canonical.rows(), canonical.cols());
  for (std::size_t c = 0; c < perm.size(); ++c) out.col(perm[c]) = canonical.col(static_cast<Eigen::Index>(c));
  return out;
}

inline FramePath to_user_columns(const FramePath& path, const std::vector<int>& perm, const DiagonalTarget& user_d) {
  if (perm.empty()) return path;
  FramePath out;
  out.d = user_d;
  out.start = Frame(to_user_columns(path.start.rows, perm));
  out.end = Frame(to_user_columns(path.end.rows, perm));
  out.grid.reserve(path.grid.size());
  for (const auto& f : path.grid) out.grid.push_back(to_user_columns(f, perm));
  out.segments = path.segments;
  for (auto& seg : out.segments)
    for (int& c : seg.columns) c = perm[static_cast<std::size_t>(c)];
  return out;
}

}  // namespace frametop
