#include "frametop/hypersimplex.hpp"

#include "sampling.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

using namespace frametop;
using frametop::sampling::random_member;

namespace {

// Oracle: minimum over all (n-k)-subsets of the subset sum.
double min_subset_sum(const Vector& d, int size) {
  const int n = static_cast<int>(d.size());
  double best = 1e300;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != size) continue;
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) s += d(i);
    best = std::min(best, s);
  }
  return best;
}

}  // namespace

TEST(Hypersimplex, Membership) {
  EXPECT_TRUE(in_hypersimplex({{1, 1, 0, 0}, 2}));
  EXPECT_TRUE(in_hypersimplex({{0.5, 0.5, 0.5, 0.5}, 2}));
  EXPECT_FALSE(in_hypersimplex({{0.7, 0.7, 0.7}, 2}));
  EXPECT_FALSE(in_hypersimplex({{1.2, 0.8, 0, 0}, 2}));
  EXPECT_FALSE(in_hypersimplex({{-0.1, 1, 1, 0.1}, 2}));
}

TEST(Hypersimplex, HypothesisExamples) {
  EXPECT_TRUE(satisfies_hypothesis(equal_norm_target(6, 3)));
  EXPECT_FALSE(satisfies_hypothesis({{1, 1, 0, 0}, 2}));
  EXPECT_FALSE(satisfies_hypothesis({{1, 1.0 / 3, 1.0 / 3, 1.0 / 3}, 2}));
  EXPECT_THROW(satisfies_hypothesis({{0.7, 0.7, 0.7}, 2}), Error);
}

TEST(Hypersimplex, HypothesisMatchesSubsetEnumeration) {
  std::mt19937_64 rng(11);
  for (int n = 3; n <= 9; ++n) {
    for (int k = 1; k < n; ++k) {
      for (int trial = 0; trial < 200; ++trial) {
        const DiagonalTarget t = random_member(rng, n, k);
        EXPECT_EQ(satisfies_hypothesis(t), min_subset_sum(t.d, n - k) >= 1.0 - tol::sum);
      }
    }
  }
}

TEST(Hypersimplex, HypothesisForcesRankAndCorankAtLeastTwo) {
  std::mt19937_64 rng(12);
  for (int n = 3; n <= 9; ++n)
    for (int k = 1; k < n; ++k)
      for (int trial = 0; trial < 100; ++trial) {
        const DiagonalTarget t = random_member(rng, n, k);
        if (satisfies_hypothesis(t)) {
          EXPECT_GE(k, 2);
          EXPECT_GE(n - k, 2);
        }
      }
}

TEST(Hypersimplex, TwoValueTarget) {
  const DiagonalTarget a = two_value_target(4, 2, 0.5);
  EXPECT_NEAR((a.d - Vector::Constant(4, 0.5)).norm(), 0.0, 1e-15);
  const DiagonalTarget b = two_value_target(6, 3, 1.0 / 3);
  Vector expect(6);
  expect << 2.0 / 3, 2.0 / 3, 2.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3;
  EXPECT_NEAR((b.d - expect).norm(), 0.0, 1e-15);
  EXPECT_TRUE(satisfies_hypothesis(b));
  EXPECT_NEAR(smallest_complement_sum(b), 1.0, 1e-15);
  try {
    two_value_target(6, 3, 0.6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BetaOutOfRange);
  }
  try {
    two_value_target(5, 1, 0.25);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankOutOfRange);
  }
}

TEST(Hypersimplex, TwoValueEndpointsSatisfyHypothesis) {
  for (int n = 4; n <= 12; ++n)
    for (int k = 2; k <= n - 2; ++k)
      for (double beta : {1.0 / (n - k), static_cast<double>(k) / n}) {
        EXPECT_TRUE(satisfies_hypothesis(two_value_target(n, k, beta))) << n << "," << k << "," << beta;
      }
}

TEST(Hypersimplex, DualTarget) {
  const DiagonalTarget a = dual_target({{1, 1, 0, 0}, 2});
  EXPECT_EQ(a.k, 2);
  EXPECT_EQ(a.d, (Vector(4) << 0, 0, 1, 1).finished());
  const DiagonalTarget b = dual_target({{0.4, 0.3, 0.3, 0.4, 0.3, 0.3}, 2});
  EXPECT_EQ(b.k, 4);
  EXPECT_NEAR((b.d - (Vector(6) << 0.6, 0.7, 0.7, 0.6, 0.7, 0.7).finished()).norm(), 0.0, 1e-15);
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const DiagonalTarget t = random_member(rng, 7, 3);
    const DiagonalTarget back = dual_target(dual_target(t));
    EXPECT_EQ(back.k, 3);
    EXPECT_LE((back.d - t.d).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(satisfies_hypothesis(t), satisfies_hypothesis(dual_target(t)));
  }
}

TEST(Hypersimplex, ClassifyExamples) {
  const auto even = classify_admissibility({{0.4, 0.3, 0.3, 0.4, 0.3, 0.3}, 2});
  EXPECT_EQ(even.status, AdmissibilityStatus::ProvenAdmissible);
  EXPECT_EQ(even.rule, "table-even-small-k");
  ASSERT_TRUE(even.witness.beta && even.witness.alpha && even.witness.interval);
  EXPECT_NEAR(*even.witness.alpha, 0.4, 1e-12);
  EXPECT_NEAR(*even.witness.beta, 0.3, 1e-12);
  EXPECT_NEAR(even.witness.interval->first, 0.25, 1e-12);
  EXPECT_NEAR(even.witness.interval->second, 1.0 / 3, 1e-12);
  // The witness permutation lays d out as (alpha, beta, beta, alpha, beta, beta).
  const Vector canon = permute((Vector(6) << 0.4, 0.3, 0.3, 0.4, 0.3, 0.3).finished(), even.witness.permutation);
  EXPECT_NEAR((canon - (Vector(6) << 0.4, 0.3, 0.3, 0.4, 0.3, 0.3).finished()).norm(), 0.0, 1e-15);

  const auto o2 = classify_admissibility({{1, 1, 0, 0}, 2});
  EXPECT_EQ(o2.status, AdmissibilityStatus::ProvenDisconnected);
  EXPECT_EQ(o2.rule, "o2-degenerate");

  const auto km = classify_admissibility({{0.7, 0.7, 0.6, 0}, 2});
  EXPECT_EQ(km.status, AdmissibilityStatus::ProvenDisconnected);
  EXPECT_EQ(km.rule, "km-criterion");
  EXPECT_EQ(km.witness.indices, (std::vector<int>{0, 1, 2}));

  EXPECT_EQ(classify_admissibility(equal_norm_target(7, 3)).rule, "equal-norm");
  EXPECT_EQ(classify_admissibility({{1, 1.0 / 3, 1.0 / 3, 1.0 / 3}, 2}).status, AdmissibilityStatus::Unknown);
}

TEST(Hypersimplex, ClassifyTableRowsAndDuality) {
  // Odd n, odd k: n = 11 (p = 5), k = 3 (q = 1), beta in [1/5, 3/11].
  // At the top of the interval both values agree and the equal-norm rule answers first.
  for (double beta : {1.0 / 5, 0.5 * (1.0 / 5 + 3.0 / 11), 3.0 / 11}) {
    const double alpha = (3.0 - 8.0 * beta) / 3.0;
    Vector d(11);
    d << alpha, beta, beta, beta, beta, alpha, beta, beta, beta, beta, alpha;
    const auto v = classify_admissibility({d, 3});
    EXPECT_EQ(v.status, AdmissibilityStatus::ProvenAdmissible);
    EXPECT_EQ(v.rule, beta == 3.0 / 11 ? "equal-norm" : "table-odd-n-odd-k") << beta;
  }
  // Large even k: n = 6 (p = 3), k = 4 (q = 2): beta in [1/2, 2/3].
  Vector d(6);
  const double beta = 0.6, alpha = (2.0 - beta) / 2.0;
  d << alpha, alpha, beta, alpha, alpha, beta;
  EXPECT_EQ(classify_admissibility({d, 4}).rule, "table-even-large-k");
  // Duality: the dual of a catalogued target is classified through its dual.
  const auto dual = classify_admissibility(dual_target({{0.4, 0.3, 0.3, 0.4, 0.3, 0.3}, 2}));
  EXPECT_EQ(dual.status, AdmissibilityStatus::ProvenAdmissible);
}

TEST(Hypersimplex, ClassifyNeverAdmitsWithoutHypothesis) {
  std::mt19937_64 rng(14);
  for (int n = 4; n <= 8; ++n)
    for (int k = 2; k <= n - 2; ++k)
      for (int trial = 0; trial < 100; ++trial) {
        const DiagonalTarget t = random_member(rng, n, k);
        const auto v = classify_admissibility(t);
        if (v.status == AdmissibilityStatus::ProvenAdmissible) EXPECT_TRUE(satisfies_hypothesis(t));
        // A disconnection proof and the hypothesis exclude each other.
        if (v.status == AdmissibilityStatus::ProvenDisconnected) EXPECT_FALSE(satisfies_hypothesis(t));
      }
}

TEST(Hypersimplex, MatchDoubledAndOdd) {
  const Vector d = (Vector(4) << 0.3, 0.7, 0.7, 0.3).finished();
  auto perm = match_doubled(d);
  ASSERT_TRUE(perm);
  const Vector c = permute(d, *perm);
  EXPECT_DOUBLE_EQ(c(0), c(2));
  EXPECT_DOUBLE_EQ(c(1), c(3));
  EXPECT_FALSE(match_doubled((Vector(4) << 0.3, 0.7, 0.6, 0.4).finished()));

  const Vector odd = equal_norm_target(9, 3).d;
  auto op = match_odd(odd, Vector::Constant(4, 0.5), 0.0);
  ASSERT_TRUE(op);
  EXPECT_EQ(op->size(), 9u);
  // d_i = 1/3 is below d'_i / 2 = 0.4, so no match without slack.
  EXPECT_FALSE(match_odd(odd, Vector::Constant(4, 0.8), 0.0));
}
