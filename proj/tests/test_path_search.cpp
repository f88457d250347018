#include "frametop/certificates.hpp"
#include "frametop/path_search.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace frametop;

TEST(PathSearch, JacobianMatchesFiniteDifferences) {
  const Frame f = random_frame(5, 2, 7);
  const Vector d = Vector::Constant(5, 0.4);
  const Matrix jac = frame_constraint_jacobian(f.rows);
  const double h = 1e-6;
  for (Eigen::Index v = 0; v < f.rows.size(); ++v) {
    Matrix plus = f.rows, minus = f.rows;
    plus.data()[v] += h;
    minus.data()[v] -= h;
    const Vector fd = (frame_constraints(plus, d) - frame_constraints(minus, d)) / (2 * h);
    EXPECT_LE((fd - jac.col(v)).norm(), 1e-8) << v;
  }
}

TEST(PathSearch, ProjectionLandsOnVariety) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> nd(0.0, 0.05);
  const DiagonalTarget d = equal_norm_target(6, 2);
  const Frame f = build_ntf(d);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix noisy = f.rows;
    for (Eigen::Index i = 0; i < noisy.size(); ++i) noisy.data()[i] += nd(rng);
    const ProjectionOutcome out = project_to_variety(noisy, d.d);
    ASSERT_TRUE(out.converged);
    EXPECT_LE((out.frame * out.frame.transpose() - Matrix::Identity(2, 2)).norm(), 1e-11);
    EXPECT_LE((out.frame.colwise().squaredNorm().transpose() - d.d).cwiseAbs().maxCoeff(), 1e-11);
  }
}

TEST(PathSearch, ProcrustesRecoversRotation) {
  const Frame y = random_frame(6, 3, 3);
  const Matrix r = random_frame(3, 3, 4).rows;
  Matrix rot = r;
  if (rot.determinant() < 0) rot.row(0) *= -1.0;
  EXPECT_LE((procrustes(rot * y.rows, y.rows) - rot).norm(), 1e-12);
  const Matrix refl = flip_last(3);
  EXPECT_LE((procrustes(refl * y.rows, y.rows, true) - refl).norm(), 1e-12);
  EXPECT_NEAR(procrustes(refl * y.rows, y.rows).determinant(), 1.0, 1e-12);
}

TEST(PathSearch, LocalConnectProducesVerifiedSegment) {
  const DiagonalTarget d = equal_norm_target(5, 2);
  const Frame x = build_ntf(d);
  const Matrix y = project_to_variety(x.rows + 0.2 * random_frame(5, 2, 9).rows, d.d).frame;
  auto seg = local_connect(x.rows, y, d.d);
  ASSERT_TRUE(seg);
  FramePath path;
  path.d = d;
  path.start = x;
  path.end = Frame(y);
  path.grid = *seg;
  const VerificationReport rep = verify_path(path, tol::path, kSampleStep + 1e-12);
  EXPECT_TRUE(rep.passed) << rep.failure;
}

TEST(PathSearch, TrivialPath) {
  const DiagonalTarget d = equal_norm_target(5, 2);
  const Frame f = build_ntf(d);
  const SearchResult r = numerical_path_search(f, f, d);
  ASSERT_EQ(r.status, SearchStatus::Found);
  EXPECT_TRUE(verify_path(r.path).passed);
}

TEST(PathSearch, OrbitCase) {
  const DiagonalTarget d = equal_norm_target(6, 3);
  const Frame f = build_ntf(d);
  Matrix rot = random_frame(3, 3, 12).rows;
  if (rot.determinant() < 0) rot.row(0) *= -1.0;
  const SearchResult r = numerical_path_search(f, Frame(rot * f.rows), d);
  ASSERT_EQ(r.status, SearchStatus::Found);
  const VerificationReport rep = verify_path(r.path);
  EXPECT_TRUE(rep.passed) << rep.failure;
}

TEST(PathSearch, OrthogonalGroupFiberIsNotConnected) {
  Matrix f0 = Matrix::Zero(2, 4);
  f0(0, 0) = f0(1, 1) = 1.0;
  const DiagonalTarget d({1, 1, 0, 0}, 2);
  SearchBudget budget;
  budget.max_nodes = 200;
  const SearchResult r = numerical_path_search(Frame(f0), Frame(flip_last(2) * f0), d, budget);
  EXPECT_EQ(r.status, SearchStatus::Failure);
  EXPECT_FALSE(r.detail.empty());
}

TEST(PathSearch, RankTwoReflectionIsReached) {
  const DiagonalTarget d = equal_norm_target(7, 2);
  const Frame f = build_ntf(d);
  const SearchResult r = numerical_path_search(f, Frame(flip_last(2) * f.rows), d);
  ASSERT_EQ(r.status, SearchStatus::Found) << r.detail;
  EXPECT_TRUE(verify_path(r.path).passed);
}

TEST(PathSearch, EndpointValidation) {
  const DiagonalTarget d = equal_norm_target(5, 2);
  const Frame f = build_ntf(d);
  Matrix off = f.rows;
  off(0, 0) += 0.01;
  try {
    numerical_path_search(f, Frame(off), d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EndpointInvalid);
  }
}
