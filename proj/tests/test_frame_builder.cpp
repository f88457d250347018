#include "frametop/frame_builder.hpp"

#include "sampling.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace frametop;
using frametop::sampling::random_member;

namespace {

double stiefel(const Matrix& f) { return (f * f.transpose() - Matrix::Identity(f.rows(), f.rows())).norm(); }

double norm_gap(const Matrix& f, const Vector& d) {
  return (f.colwise().squaredNorm().transpose() - d).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(FrameBuilder, RandomTargetsWithinRotationBudget) {
  std::mt19937_64 rng(21);
  for (int n = 2; n <= 12; ++n)
    for (int k = 1; k < n; ++k)
      for (int trial = 0; trial < 60; ++trial) {
        const DiagonalTarget t = random_member(rng, n, k);
        const BuildResult r = build_ntf_counted(t);
        ASSERT_LE(stiefel(r.frame.rows), tol::frame_build) << n << "," << k;
        ASSERT_LE(norm_gap(r.frame.rows, t.d), tol::frame_build) << n << "," << k;
        ASSERT_LE(r.rotations, n - 1);
      }
}

TEST(FrameBuilder, VerticesAndEqualNorm) {
  const Frame v = build_ntf({{0, 1, 0, 1}, 2});
  EXPECT_LE(norm_gap(v.rows, (Vector(4) << 0, 1, 0, 1).finished()), 1e-15);
  for (int n = 3; n <= 12; ++n)
    for (int k = 1; k < n; ++k) {
      const DiagonalTarget t = equal_norm_target(n, k);
      const Frame f = build_ntf(t);
      EXPECT_LE(stiefel(f.rows), tol::frame_build);
      EXPECT_LE(norm_gap(f.rows, t.d), tol::frame_build);
    }
}

TEST(FrameBuilder, RejectsPointsOutsideHypersimplex) {
  try {
    build_ntf({{0.7, 0.7, 0.7}, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HypersimplexViolation);
  }
}

TEST(FrameBuilder, EqualNormTriangleIsRotatedMercedes) {
  // Oracle: any 2 x 3 frame with column norms 2/3 has Gram matrix
  // (2/3) I - (1/3)(J - I) up to column signs.
  const Frame f = build_ntf(equal_norm_target(3, 2));
  const Matrix g = f.rows.transpose() * f.rows;
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(g(i, i), 2.0 / 3, 1e-12);
    for (int j = 0; j < 3; ++j)
      if (i != j) EXPECT_NEAR(std::abs(g(i, j)), 1.0 / 3, 1e-12);
  }
}

TEST(FrameBuilder, SimplexFrameStructure) {
  for (int k = 1; k <= 12; ++k) {
    const Matrix g = simplex_frame(k).rows;
    ASSERT_EQ(g.rows(), k);
    ASSERT_EQ(g.cols(), k + 1);
    EXPECT_LE((g.colwise().squaredNorm().transpose() - Vector::Ones(k + 1)).norm(), 1e-13);
    EXPECT_LE((g * g.transpose() - (k + 1.0) / k * Matrix::Identity(k, k)).norm(), 1e-13);
    EXPECT_LE((g.col(k) + Vector::Unit(k, k - 1)).norm(), 1e-15);
    EXPECT_NEAR(g(0, 0), -g(0, 1), 1e-15);
    EXPECT_GT(g(0, 0), 0.0);
    if (k >= 2) {
      EXPECT_LE(g.row(0).tail(k - 1).norm(), 1e-15);
      EXPECT_LE((g.col(0).tail(k - 1) - g.col(1).tail(k - 1)).norm(), 1e-15);
      EXPECT_LE(g.col(k).head(k - 1).norm(), 1e-15);
    }
  }
  Matrix expect(2, 3);
  expect << std::sqrt(3.0) / 2, -std::sqrt(3.0) / 2, 0, 0.5, 0.5, -1;
  EXPECT_LE((simplex_frame(2).rows - expect).norm(), 1e-15);
}

TEST(FrameBuilder, IdentityAugmented) {
  for (int k = 2; k <= 8; ++k) {
    const Frame f = identity_augmented(k);
    EXPECT_LE(stiefel(f.rows), 1e-13);
    EXPECT_LE(norm_gap(f.rows, equal_norm_target(2 * k + 1, k).d), 1e-13);
  }
}

TEST(FrameBuilder, DoubledFrame) {
  const DiagonalTarget half(Vector::Constant(4, 0.5), 2);
  const Frame g = build_ntf({Vector::Ones(2), 2});
  const Frame f = doubled_frame(g);
  EXPECT_LE(stiefel(f.rows), 1e-14);
  EXPECT_LE(norm_gap(f.rows, half.d), 1e-14);
  // Column norms halve; the second half is the first half with the last row negated.
  const Frame r = build_ntf({{0.8, 0.6, 0.6}, 2});
  const Frame fr = doubled_frame(r);
  EXPECT_LE(norm_gap(fr.rows, (Vector(6) << 0.4, 0.3, 0.3, 0.4, 0.3, 0.3).finished()), 1e-12);
  EXPECT_LE((fr.rows.rightCols(3) - flip_last(2) * fr.rows.leftCols(3)).norm(), 1e-15);
}

TEST(FrameBuilder, OddFrame) {
  // d = (2/5)^5 with G~ the 1 x 2 frame (1, 1)/sqrt2 scaled to d' = (1/2, 1/2).
  const DiagonalTarget d = equal_norm_target(5, 2);
  Matrix gt(1, 2);
  gt << std::sqrt(0.5), std::sqrt(0.5);
  const Frame f = odd_frame(Frame(gt), d);
  EXPECT_LE(stiefel(f.rows), 1e-13);
  EXPECT_LE(norm_gap(f.rows, d.d), 1e-13);
  EXPECT_NEAR(f.rows(1, 4), std::sqrt(0.4), 1e-15);

  for (int k = 2; k <= 5; ++k) {
    const int p = k + 1;
    const DiagonalTarget target = equal_norm_target(2 * p + 1, k);
    const Frame sub = build_ntf(equal_norm_target(p, k - 1));
    const Frame o = odd_frame(sub, target);
    EXPECT_LE(stiefel(o.rows), 1e-12) << k;
    EXPECT_LE(norm_gap(o.rows, target.d), 1e-12) << k;
  }

  // d_j = 0.3 sits below d'_j / 2 = 0.5.
  Matrix big(1, 2);
  big << 1.0, 0.0;
  try {
    odd_frame(Frame(big), {{0.3, 0.3, 0.3, 0.3, 0.8}, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NormDeficit);
  }
}
