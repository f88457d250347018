#pragma once

// Diagonal targets d in the hypersimplex, the (n-k)-subset hypothesis, and
// matching of d against the catalogued admissible and disconnected families.

#include "frametop/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace frametop {

struct DiagonalTarget {
  int k = 0;
  Vector d;

  DiagonalTarget() = default;
  DiagonalTarget(Vector values, int rank) : k(rank), d(std::move(values)) {}
  DiagonalTarget(std::initializer_list<double> values, int rank) : k(rank), d(values.size()) {
    Eigen::Index i = 0;
    for (double v : values) d(i++) = v;
  }

  int n() const { return static_cast<int>(d.size()); }
  double operator[](Eigen::Index i) const { return d(i); }
};

inline DiagonalTarget equal_norm_target(int n, int k) {
  return {Vector::Constant(n, static_cast<double>(k) / n), k};
}

inline bool in_hypersimplex(const DiagonalTarget& t) {
  if (t.n() < 1 || t.k < 1 || t.k > t.n()) return false;
  for (Eigen::Index i = 0; i < t.d.size(); ++i) {
    if (!std::isfinite(t.d(i)) || t.d(i) < -tol::sum || t.d(i) > 1.0 + tol::sum) return false;
  }
  return std::abs(t.d.sum() - t.k) <= tol::sum * std::max(1, t.n());
}

inline void require_hypersimplex(const DiagonalTarget& t) {
  if (!in_hypersimplex(t)) fail(ErrorCode::HypersimplexViolation, "d is not in the hypersimplex for the given k");
}

/// Sum of the (n-k) smallest entries, the binding (n-k)-subset sum.
inline double smallest_complement_sum(const DiagonalTarget& t) {
  std::vector<double> v(t.d.data(), t.d.data() + t.d.size());
  std::sort(v.begin(), v.end());
  return std::accumulate(v.begin(), v.begin() + (t.n() - t.k), 0.0);
}

/// Every (n-k)-subset of entries sums to at least 1.
inline bool satisfies_hypothesis(const DiagonalTarget& t) {
  require_hypersimplex(t);
  return smallest_complement_sum(t) >= 1.0 - tol::sum;
}

/// d = (alpha^k, beta^(n-k)) with alpha = 1 - (n-k) beta / k.
inline DiagonalTarget two_value_target(int n, int k, double beta) {
  if (k < 2 || k > n - 2) fail(ErrorCode::RankOutOfRange, "two-value family needs 2 <= k <= n-2");
  const double lo = 1.0 / (n - k);
  const double hi = static_cast<double>(k) / n;
  if (beta < lo - tol::sum || beta > hi + tol::sum) {
    fail(ErrorCode::BetaOutOfRange, "beta must lie in [1/(n-k), k/n]");
  }
  const double alpha = 1.0 - (n - k) * beta / k;
  Vector d(n);
  d.head(k).setConstant(alpha);
  d.tail(n - k).setConstant(beta);
  return {d, k};
}

/// (1 - d) with rank n - k.
inline DiagonalTarget dual_target(const DiagonalTarget& t) {
  require_hypersimplex(t);
  return {Vector::Ones(t.n()) - t.d, t.n() - t.k};
}

/// Pairwise distinct i, j, l with all three pair sums strictly above `threshold`.
inline std::optional<std::array<int, 3>> find_km_triple(const Vector& v, double threshold, double margin = tol::sum) {
  const int n = static_cast<int>(v.size());
  threshold += margin;  // strict, and not fooled by rounding at equality
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int l = j + 1; l < n; ++l)
        if (v(i) + v(j) > threshold && v(j) + v(l) > threshold && v(i) + v(l) > threshold) {
          return std::array<int, 3>{i, j, l};
        }
  return std::nullopt;
}

// Canonical orderings. perm[c] is the original index placed at canonical slot c.

inline constexpr double kGroupTol = 1e-9;

inline std::vector<int> idx_identity(int n) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

/// d reordered as (d_1..d_p, d_1..d_p); the identity when d is already so.
inline std::optional<std::vector<int>> match_doubled(const Vector& d) {
  const int n = static_cast<int>(d.size());
  if (n % 2 != 0 || n == 0) return std::nullopt;
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return d(a) < d(b); });
  const int p = n / 2;
  bool in_layout = true;
  for (int r = 0; r < p && in_layout; ++r) in_layout = std::abs(d(r) - d(p + r)) <= kGroupTol;
  if (in_layout) return idx_identity(n);
  std::vector<int> perm(n);
  for (int r = 0; r < p; ++r) {
    if (std::abs(d(idx[2 * r]) - d(idx[2 * r + 1])) > kGroupTol) return std::nullopt;
    perm[r] = idx[2 * r];
    perm[p + r] = idx[2 * r + 1];
  }
  return perm;
}

/// d reordered as (d_1..d_p, d_1..d_p, d_{2p+1}) with pair r assigned to
/// dprime(r) and d_r >= dprime(r)/2 - slack. Pairs are assigned in sorted order
/// against sorted dprime, which succeeds whenever any assignment does.
inline std::optional<std::vector<int>> match_odd(const Vector& d, const Vector& dprime, double slack) {
  const int n = static_cast<int>(d.size());
  if (n % 2 != 1 || n < 3) return std::nullopt;
  const int p = n / 2;
  if (dprime.size() != p) return std::nullopt;
  bool in_layout = true;
  for (int r = 0; r < p && in_layout; ++r)
    in_layout = std::abs(d(r) - d(p + r)) <= kGroupTol && d(r) >= dprime(r) / 2.0 - slack;
  if (in_layout) return idx_identity(n);
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dprime(a) < dprime(b); });
  for (int single = 0; single < n; ++single) {
    std::vector<int> rest;
    for (int i = 0; i < n; ++i)
      if (i != single) rest.push_back(i);
    std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) { return d(a) < d(b); });
    bool ok = true;
    std::vector<int> perm(n);
    for (int r = 0; r < p && ok; ++r) {
      const int a = rest[2 * r], b = rest[2 * r + 1];
      if (std::abs(d(a) - d(b)) > kGroupTol || d(a) < dprime(order[r]) / 2.0 - slack) ok = false;
      perm[order[r]] = a;
      perm[p + order[r]] = b;
    }
    if (ok) {
      perm[2 * p] = single;
      return perm;
    }
  }
  return std::nullopt;
}

/// Apply a canonical permutation: out(c) = d(perm[c]).
inline Vector permute(const Vector& d, const std::vector<int>& perm) {
  Vector out(d.size());
  for (std::size_t c = 0; c < perm.size(); ++c) out(static_cast<Eigen::Index>(c)) = d(perm[c]);
  return out;
}

enum class AdmissibilityStatus { ProvenAdmissible, ProvenDisconnected, Unknown };

inline std::string_view to_string(AdmissibilityStatus s) {
  switch (s) {
    case AdmissibilityStatus::ProvenAdmissible: return "ProvenAdmissible";
    case AdmissibilityStatus::ProvenDisconnected: return "ProvenDisconnected";
    case AdmissibilityStatus::Unknown: return "Unknown";
  }
  return "Unknown";
}

/// Which catalogued two-value family matched.
enum class TableRow { EvenSmallK, EvenLargeK, OddRankOdd, OddRankEven };

inline std::string_view to_string(TableRow r) {
  switch (r) {
    case TableRow::EvenSmallK: return "table-even-small-k";
    case TableRow::EvenLargeK: return "table-even-large-k";
    case TableRow::OddRankOdd: return "table-odd-n-odd-k";
    case TableRow::OddRankEven: return "table-odd-n-even-k";
  }
  return "table";
}

struct Witness {
  std::optional<int> p, q;
  std::optional<double> alpha, beta;
  std::optional<std::pair<double, double>> interval;
  std::vector<int> permutation;
  std::vector<int> indices;
};

struct AdmissibilityVerdict {
  AdmissibilityStatus status = AdmissibilityStatus::Unknown;
  std::string rule;
  Witness witness;
};

struct TableMatch {
  TableRow row;
  int p = 0, q = 0;
  double alpha = 0, beta = 0, lo = 0, hi = 0;
  std::vector<int> permutation;
};

namespace detail {

struct TwoValues {
  double big = 0, small = 0;
  std::vector<int> big_idx, small_idx;
};

inline std::optional<TwoValues> split_two_values(const Vector& d) {
  TwoValues tv;
  tv.big = d.maxCoeff();
  tv.small = d.minCoeff();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (std::abs(d(i) - tv.big) <= kGroupTol) {
      tv.big_idx.push_back(static_cast<int>(i));
    } else if (std::abs(d(i) - tv.small) <= kGroupTol) {
      tv.small_idx.push_back(static_cast<int>(i));
    } else {
      return std::nullopt;
    }
  }
  return tv;
}

inline bool within(double x, double lo, double hi) { return x >= lo - tol::sum && x <= hi + tol::sum; }

// alpha slots, beta slots, optional trailing value; layout (a^q b^(p-q) a^q b^(p-q) [tail]).
inline std::vector<int> table_layout(const std::vector<int>& a_idx, const std::vector<int>& b_idx, int p, int q,
                                     bool tail_is_alpha, bool has_tail) {
  std::vector<int> perm;
  std::size_t ai = 0, bi = 0;
  for (int half = 0; half < 2; ++half) {
    for (int r = 0; r < q; ++r) perm.push_back(a_idx[ai++]);
    for (int r = 0; r < p - q; ++r) perm.push_back(b_idx[bi++]);
  }
  if (has_tail) perm.push_back(tail_is_alpha ? a_idx[ai++] : b_idx[bi++]);
  return perm;
}

}  // namespace detail

/// Match d (up to permutation) against the catalogued two-value families.
inline std::optional<TableMatch> match_table_row(const DiagonalTarget& t) {
  const int n = t.n(), k = t.k;
  auto tv = detail::split_two_values(t.d);
  if (!tv) return std::nullopt;
  // Assignments of (alpha, beta) to the two value classes; with a single value both are tried.
  std::vector<std::pair<std::vector<int>, std::vector<int>>> assignments;
  if (tv->small_idx.empty()) {
    const auto& all = tv->big_idx;
    for (std::size_t m = 0; m <= all.size(); ++m) {
      assignments.emplace_back(std::vector<int>(all.begin(), all.begin() + m),
                               std::vector<int>(all.begin() + m, all.end()));
    }
  } else {
    assignments.emplace_back(tv->big_idx, tv->small_idx);
    assignments.emplace_back(tv->small_idx, tv->big_idx);
  }
  for (const auto& [a_idx, b_idx] : assignments) {
    const int na = static_cast<int>(a_idx.size());
    const double alpha = a_idx.empty() ? 0.0 : t.d(a_idx.front());
    const double beta = b_idx.empty() ? 0.0 : t.d(b_idx.front());
    if (b_idx.empty()) continue;
    if (n % 2 == 0 && k % 2 == 0) {
      const int p = n / 2, q = k / 2;
      if (q < 1 || q >= p || na != 2 * q) continue;
      if (k <= p) {
        const double lo = q / (2.0 * p - 2.0 * q), hi = static_cast<double>(q) / p;
        if (detail::within(beta, lo, hi))
          return TableMatch{TableRow::EvenSmallK, p, q, alpha, beta, lo, hi,
                            detail::table_layout(a_idx, b_idx, p, q, false, false)};
      } else {
        const double lo = 0.5, hi = static_cast<double>(q) / p;
        if (detail::within(beta, lo, hi))
          return TableMatch{TableRow::EvenLargeK, p, q, alpha, beta, lo, hi,
                            detail::table_layout(a_idx, b_idx, p, q, false, false)};
      }
    } else if (n % 2 == 1) {
      const int p = n / 2;
      if (k % 2 == 1) {
        const int q = (k - 1) / 2;
        if (q < 1 || q >= p || k >= p || na != 2 * q + 1) continue;
        const double lo = static_cast<double>(q) / p, hi = (2.0 * q + 1) / (2.0 * p + 1);
        if (detail::within(beta, lo, hi))
          return TableMatch{TableRow::OddRankOdd, p, q, alpha, beta, lo, hi,
                            detail::table_layout(a_idx, b_idx, p, q, true, true)};
      } else {
        const int q = k / 2;
        if (q < 1 || q >= p || k >= p || na != 2 * q) continue;
        const double lo = (2.0 * q - 1) / (2.0 * p), hi = (2.0 * q) / (2.0 * p + 1);
        if (detail::within(beta, lo, hi))
          return TableMatch{TableRow::OddRankEven, p, q, alpha, beta, lo, hi,
                            detail::table_layout(a_idx, b_idx, p, q, false, true)};
      }
    }
  }
  return std::nullopt;
}

/// Doubled form (d_1..d_p, d_1..d_p) with the half bounds: all <= 1/2 when
/// p >= k, all >= 1/2 when p < k.
inline std::optional<std::vector<int>> match_prop_first(const DiagonalTarget& t) {
  auto perm = match_doubled(t.d);
  if (!perm) return std::nullopt;
  const int p = t.n() / 2;
  const bool small = p >= t.k;
  for (Eigen::Index i = 0; i < t.d.size(); ++i) {
    if (small && t.d(i) > 0.5 + tol::sum) return std::nullopt;
    if (!small && t.d(i) < 0.5 - tol::sum) return std::nullopt;
  }
  return perm;
}

/// Equal-norm pair (p, r) with 2 <= r <= p-2 is catalogued as admissible.
inline bool equal_norm_admissible(int n, int k) { return k >= 2 && k <= n - 2; }

/// Odd form with the equal-norm companion d' = ((k-1)/p)^p, whose rank k-1
/// pair (p, k-1) must itself be admissible.
inline std::optional<std::vector<int>> match_prop_second(const DiagonalTarget& t) {
  if (t.n() % 2 != 1) return std::nullopt;
  const int p = t.n() / 2;
  if (p < t.k - 1 || !equal_norm_admissible(p, t.k - 1)) return std::nullopt;
  const Vector dprime = Vector::Constant(p, static_cast<double>(t.k - 1) / p);
  return match_odd(t.d, dprime, tol::sum);
}

namespace detail {

inline bool is_zero_one(const Vector& d) {
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (std::abs(d(i)) > tol::sum && std::abs(d(i) - 1.0) > tol::sum) return false;
  return true;
}

inline std::optional<AdmissibilityVerdict> classify_direct(const DiagonalTarget& t) {
  using S = AdmissibilityStatus;
  if (smallest_complement_sum(t) < 1.0 - tol::sum) return std::nullopt;
  const int n = t.n(), k = t.k;
  if (detail::split_two_values(t.d) && t.d.maxCoeff() - t.d.minCoeff() <= kGroupTol && equal_norm_admissible(n, k)) {
    return AdmissibilityVerdict{S::ProvenAdmissible, "equal-norm", {}};
  }
  if (auto m = match_table_row(t)) {
    Witness w;
    w.p = m->p;
    w.q = m->q;
    w.alpha = m->alpha;
    w.beta = m->beta;
    w.interval = std::make_pair(m->lo, m->hi);
    w.permutation = m->permutation;
    return AdmissibilityVerdict{S::ProvenAdmissible, std::string(to_string(m->row)), w};
  }
  if (auto perm = match_prop_first(t)) {
    Witness w;
    w.p = n / 2;
    w.permutation = *perm;
    return AdmissibilityVerdict{S::ProvenAdmissible, "prop-first", w};
  }
  if (auto perm = match_prop_second(t)) {
    Witness w;
    w.p = n / 2;
    w.permutation = *perm;
    return AdmissibilityVerdict{S::ProvenAdmissible, "prop-second", w};
  }
  return std::nullopt;
}

}  // namespace detail

inline AdmissibilityVerdict classify_admissibility(const DiagonalTarget& t) {
  using S = AdmissibilityStatus;
  require_hypersimplex(t);
  if (t.k == 2 && detail::is_zero_one(t.d)) {
    return {S::ProvenDisconnected, "o2-degenerate", {}};
  }
  if (t.k == 2) {
    if (auto tri = find_km_triple(t.d, 1.0)) {
      Witness w;
      w.indices.assign(tri->begin(), tri->end());
      return {S::ProvenDisconnected, "km-criterion", w};
    }
  }
  if (auto v = detail::classify_direct(t)) return *v;
  const DiagonalTarget dual = dual_target(t);
  if (auto v = detail::classify_direct(dual)) {
    v->rule = "duality:" + v->rule;
    return *v;
  }
  return {S::Unknown, "none", {}};
}

}  // namespace frametop
