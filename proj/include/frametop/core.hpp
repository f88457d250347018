#pragma once

// Shared vocabulary: matrix aliases, tolerances and the error type used by
// every frametop module.

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace frametop {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace tol {
/// Comparisons of sums against 1 or k (hypersimplex bookkeeping).
inline constexpr double sum = 1e-12;
/// Residual accepted for frames and projections we construct ourselves.
inline constexpr double frame_build = 1e-10;
/// Residual accepted for externally supplied frames and projections.
inline constexpr double frame_accept = 1e-8;
/// Minimum distance of projection eigenvalues from 1/2 before factoring.
inline constexpr double spectral = 1e-6;
/// Path verification residual.
inline constexpr double path = 1e-8;
/// Largest Frobenius jump allowed between consecutive grid frames.
inline constexpr double step_max = 0.1;
/// Fiber residual ||diag(P) - d||.
inline constexpr double fiber = 1e-8;
/// Feasibility slack for stratum candidates.
inline constexpr double strata = 1e-9;
/// Polygon closure and side-length checks.
inline constexpr double poly = 1e-10;
}  // namespace tol

enum class ErrorCode {
  HypersimplexViolation,
  HypothesisViolation,
  BetaOutOfRange,
  RankOutOfRange,
  DimensionMismatch,
  ShapeMismatch,
  FrameInvariantViolation,
  ProjectionInvariantViolation,
  SpectralGapTooSmall,
  NormDeficit,
  NotSpecialOrthogonal,
  PartitionInvalid,
  BlockNotNTF,
  HeadNormMismatch,
  PatternMismatch,
  SubcertificateInvalid,
  CompletionDiscontinuity,
  DetSignUnexpected,
  EndpointInvalid,
  BaseCaseUnverified,
  IndexOutOfRange,
  TooLarge,
  InvalidStart,
  NoConvergedSamples,
  NotRankTwo,
  NotNormalized,
  ParseError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::HypersimplexViolation: return "HypersimplexViolation";
    case ErrorCode::HypothesisViolation: return "HypothesisViolation";
    case ErrorCode::BetaOutOfRange: return "BetaOutOfRange";
    case ErrorCode::RankOutOfRange: return "RankOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::FrameInvariantViolation: return "FrameInvariantViolation";
    case ErrorCode::ProjectionInvariantViolation: return "ProjectionInvariantViolation";
    case ErrorCode::SpectralGapTooSmall: return "SpectralGapTooSmall";
    case ErrorCode::NormDeficit: return "NormDeficit";
    case ErrorCode::NotSpecialOrthogonal: return "NotSpecialOrthogonal";
    case ErrorCode::PartitionInvalid: return "PartitionInvalid";
    case ErrorCode::BlockNotNTF: return "BlockNotNTF";
    case ErrorCode::HeadNormMismatch: return "HeadNormMismatch";
    case ErrorCode::PatternMismatch: return "PatternMismatch";
    case ErrorCode::SubcertificateInvalid: return "SubcertificateInvalid";
    case ErrorCode::CompletionDiscontinuity: return "CompletionDiscontinuity";
    case ErrorCode::DetSignUnexpected: return "DetSignUnexpected";
    case ErrorCode::EndpointInvalid: return "EndpointInvalid";
    case ErrorCode::BaseCaseUnverified: return "BaseCaseUnverified";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InvalidStart: return "InvalidStart";
    case ErrorCode::NoConvergedSamples: return "NoConvergedSamples";
    case ErrorCode::NotRankTwo: return "NotRankTwo";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

/// Diagonal k x k matrix diag(1, ..., 1, -1).
inline Matrix flip_last(Eigen::Index k) {
  Matrix d = Matrix::Identity(k, k);
  d(k - 1, k - 1) = -1.0;
  return d;
}

/// Diagonal k x k matrix diag(-1, 1, ..., 1).
inline Matrix flip_first(Eigen::Index k) {
  Matrix d = Matrix::Identity(k, k);
  d(0, 0) = -1.0;
  return d;
}

}  // namespace frametop
