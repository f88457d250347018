#include "frametop/certificates.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace frametop;

namespace {

Matrix plane_rotation(double theta) {
  Matrix r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

Matrix random_special_orthogonal(int k, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix g(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) g(i, j) = nd(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

// (1/sqrt2)[I_2 | diag(1, -1)]
Frame half_frame() {
  Matrix f(2, 4);
  f << 1, 0, 1, 0, 0, 1, 0, -1;
  return Frame(f / std::sqrt(2.0));
}

}  // namespace

TEST(RotationFamily, IdentityIsConstant) {
  const RotationFamily fam = so_k_path(Matrix::Identity(3, 3));
  for (double t : {0.0, 0.3, 1.0}) EXPECT_LE((fam.at(t) - Matrix::Identity(3, 3)).norm(), 1e-15);
}

TEST(RotationFamily, PlaneRotationInterpolatesAngle) {
  const double theta = 1.1;
  const RotationFamily fam = so_k_path(plane_rotation(theta));
  for (double t : {0.0, 0.25, 0.5, 1.0}) EXPECT_LE((fam.at(t) - plane_rotation(t * theta)).norm(), 1e-12) << t;
}

TEST(RotationFamily, MinusIdentityIsHalfTurn) {
  const RotationFamily fam = so_k_path(-Matrix::Identity(2, 2));
  for (double t : {0.0, 0.5, 1.0}) {
    const Matrix r = fam.at(t);
    // Rotation by +t pi or -t pi; both are acceptable planar parametrizations.
    EXPECT_TRUE((r - plane_rotation(t * std::numbers::pi)).norm() < 1e-12 ||
                (r - plane_rotation(-t * std::numbers::pi)).norm() < 1e-12)
        << t;
  }
}

TEST(RotationFamily, RandomRotationsStayInSOk) {
  std::mt19937_64 rng(31);
  for (int k = 2; k <= 7; ++k)
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix a = random_special_orthogonal(k, rng);
      const RotationFamily fam = so_k_path(a);
      EXPECT_LE((fam.at(0.0) - Matrix::Identity(k, k)).norm(), 1e-12);
      EXPECT_LE((fam.at(1.0) - a).norm(), 1e-9);
      for (double t = 0.0; t <= 1.0; t += 0.125) {
        const Matrix r = fam.at(t);
        EXPECT_LE((r * r.transpose() - Matrix::Identity(k, k)).norm(), 1e-12);
        EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
      }
      const Matrix x = fam.generator();
      EXPECT_LE((x + x.transpose()).norm(), 1e-12);
    }
}

TEST(RotationFamily, RejectsNonRotations) {
  for (const Matrix& bad : {Matrix(Matrix::Identity(2, 2) * 2.0), Matrix(flip_last(3))}) {
    try {
      so_k_path(bad);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NotSpecialOrthogonal);
    }
  }
}

TEST(RotationFamily, RotationTakingMapsVectors) {
  std::mt19937_64 rng(32);
  std::normal_distribution<double> nd;
  for (int k = 2; k <= 6; ++k)
    for (int trial = 0; trial < 20; ++trial) {
      Vector u(k), v(k);
      for (int i = 0; i < k; ++i) {
        u(i) = nd(rng);
        v(i) = nd(rng);
      }
      v *= u.norm() / v.norm();
      EXPECT_LE((rotation_taking(u, v).at(1.0) * u - v).norm(), 1e-12);
      EXPECT_LE((rotation_taking(u, -u).at(1.0) * u + u).norm(), 1e-12);
    }
}

TEST(BlockRotation, PreservesFrameWhenBlockIsScaledNtf) {
  // A k x m frame scaled by alpha next to a k x rest frame scaled by beta;
  // only the first block moves.
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 60; ++trial) {
    const int k = 2 + trial % 3;
    const int m = k + static_cast<int>(rng() % 3), rest = k + static_cast<int>(rng() % 3);
    const double alpha = std::sqrt(0.2 + 0.6 * std::uniform_real_distribution<double>()(rng));
    const double beta = std::sqrt(1.0 - alpha * alpha);
    Matrix f(k, m + rest);
    f.leftCols(m) = alpha * random_frame(m, k, rng()).rows;
    f.rightCols(rest) = beta * random_frame(rest, k, rng()).rows;
    const Matrix a = random_special_orthogonal(k, rng);
    const RotationFamily fam = so_k_path(a);
    for (double t = 0.0; t <= 1.0; t += 0.05) {
      Matrix g = f;
      g.leftCols(m) = fam.at(t) * f.leftCols(m);
      EXPECT_LE((g * g.transpose() - Matrix::Identity(k, k)).norm(), 1e-9);
      EXPECT_LE((g.colwise().squaredNorm() - f.colwise().squaredNorm()).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(SwitchPath, EqualHeadsGiveVerifiedLoop) {
  const Frame f = half_frame();
  const FramePath path = switch_path(f, {0, 1}, {2, 3}, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0));
  EXPECT_LE((path.end.rows - f.rows).norm(), 1e-14);
  EXPECT_TRUE(verify_path(path).passed);
}

TEST(SwitchPath, OppositeHeadsAreInterchanged) {
  const Frame f = half_frame();
  const FramePath path = switch_path(f, {1, 0}, {3, 2}, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0));
  Matrix swapped = f.rows;
  swapped.col(1) = f.rows.col(3);
  swapped.col(3) = f.rows.col(1);
  EXPECT_LE((path.end.rows - swapped).norm(), 1e-14);
  const VerificationReport rep = verify_path(path);
  EXPECT_TRUE(rep.passed) << rep.failure;
  EXPECT_LE(rep.max_step, tol::step_max);
  ASSERT_EQ(path.segments.size(), 2u);
  for (const auto& seg : path.segments) EXPECT_EQ(seg.kind, SegmentKind::BlockRotation);
}

TEST(SwitchPath, Errors) {
  const Frame f = half_frame();
  const double a = 1 / std::sqrt(2.0);
  auto code_of = [&](auto&& call) {
    try {
      call();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ParseError;  // sentinel: no error raised
  };
  EXPECT_EQ(code_of([&] { switch_path(f, {0, 1}, {2}, a, a); }), ErrorCode::PartitionInvalid);
  EXPECT_EQ(code_of([&] { switch_path(f, {0, 1}, {1, 2, 3}, a, a); }), ErrorCode::PartitionInvalid);
  EXPECT_EQ(code_of([&] { switch_path(f, {0, 2}, {1, 3}, a, a); }), ErrorCode::BlockNotNTF);
  EXPECT_EQ(code_of([&] { switch_path(f, {0, 1}, {2, 3}, 0.6, 0.6); }), ErrorCode::BlockNotNTF);
  // Scaled blocks with heads of different norms: head 1 has norm 1/4, head 3 has 1/2.
  Matrix g(2, 5);
  g.leftCols(3) = a * build_ntf({{1.0, 0.5, 0.5}, 2}).rows;
  g.rightCols(2) = a * Matrix::Identity(2, 2);
  EXPECT_EQ(code_of([&] { switch_path(Frame(g), {1, 0, 2}, {3, 4}, a, a); }), ErrorCode::HeadNormMismatch);
}

TEST(VerifyPath, ConstantPathPasses) {
  FramePath path;
  path.d = DiagonalTarget(Vector::Constant(4, 0.5), 2);
  path.start = path.end = half_frame();
  path.grid.assign(5, half_frame().rows);
  const VerificationReport rep = verify_path(path);
  EXPECT_TRUE(rep.passed);
  EXPECT_LE(rep.max_stiefel_residual, 1e-15);
  EXPECT_LE(rep.max_norm_residual, 1e-15);
  EXPECT_EQ(rep.max_step, 0.0);
  EXPECT_EQ(rep.grid_size, 5u);
}

TEST(VerifyPath, CorruptedFrameIsLocated) {
  FramePath path = switch_path(half_frame(), {1, 0}, {3, 2}, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0));
  const std::size_t bad = path.grid.size() / 3;
  path.grid[bad](0, 0) += 1e-3;
  const VerificationReport rep = verify_path(path);
  EXPECT_FALSE(rep.passed);
  EXPECT_EQ(rep.worst_index, static_cast<long>(bad));
  EXPECT_NE(rep.failure.find(std::to_string(bad)), std::string::npos) << rep.failure;
}

TEST(VerifyPath, LargeStepFails) {
  FramePath path;
  path.d = DiagonalTarget(Vector::Constant(4, 0.5), 2);
  path.start = half_frame();
  path.end = Frame(-half_frame().rows);
  path.grid = {half_frame().rows, -half_frame().rows};
  const VerificationReport rep = verify_path(path);
  EXPECT_FALSE(rep.passed);
  EXPECT_NE(rep.failure.find("step"), std::string::npos);
}
