#pragma once

// Critical-stratum candidates of height functions restricted to a fiber:
// ordered blocks of equal height, occupancies c_i, and the levels b_i solved
// from the trace equations.

#include "frametop/core.hpp"
#include "frametop/hypersimplex.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace frametop {

struct HeightBlock {
  double value = 0.0;
  int multiplicity = 0;
};

struct HeightSpec {
  Vector a;
  std::vector<int> sigma;  // a(sigma[0]) >= a(sigma[1]) >= ...
  std::vector<HeightBlock> blocks;
};

/// Descending sort of `a`, ties by original index, with equal values grouped.
inline HeightSpec sort_spec(const Vector& a) {
  HeightSpec s;
  s.a = a;
  s.sigma.resize(static_cast<std::size_t>(a.size()));
  std::iota(s.sigma.begin(), s.sigma.end(), 0);
  std::stable_sort(s.sigma.begin(), s.sigma.end(), [&](int x, int y) { return a(x) > a(y); });
  for (int idx : s.sigma) {
    if (!s.blocks.empty() && s.blocks.back().value == a(idx)) {
      ++s.blocks.back().multiplicity;
    } else {
      s.blocks.push_back({a(idx), 1});
    }
  }
  return s;
}

/// C_i (n - k - M_i + C_i) for the prefix of the first i blocks (1-based i).
inline int level_codimension(const std::vector<int>& m, const std::vector<int>& c, int i, int n, int k) {
  if (m.size() != c.size() || i < 1 || i > static_cast<int>(m.size())) {
    fail(ErrorCode::IndexOutOfRange, "prefix index must lie in 1..number of blocks");
  }
  const int big_m = std::accumulate(m.begin(), m.begin() + i, 0);
  const int big_c = std::accumulate(c.begin(), c.begin() + i, 0);
  return big_c * (n - k - big_m + big_c);
}

inline constexpr double kStrataTol = tol::strata;

struct LevelSolution {
  std::vector<double> b;
  bool feasible = false;
};

/// b_i = (c_i - sum of d^sigma over block i) / m_i; feasible iff b strictly
/// decreases and every shifted entry d^sigma_j + b_i lies in [0, 1].
inline LevelSolution solve_levels(const DiagonalTarget& d, const std::vector<int>& sigma, const std::vector<int>& m,
                                  const std::vector<int>& c) {
  const int n = d.n();
  if (static_cast<int>(sigma.size()) != n || m.size() != c.size() || m.empty() ||
      std::accumulate(m.begin(), m.end(), 0) != n) {
    fail(ErrorCode::ShapeMismatch, "sigma must permute 1..n and m must be a composition of n");
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int s : sigma) {
    if (s < 0 || s >= n || seen[static_cast<std::size_t>(s)]) fail(ErrorCode::ShapeMismatch, "sigma is not a permutation");
    seen[static_cast<std::size_t>(s)] = true;
  }
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i] < 1 || c[i] < 0 || c[i] > m[i]) fail(ErrorCode::ShapeMismatch, "need 1 <= m_i and 0 <= c_i <= m_i");
  if (std::accumulate(c.begin(), c.end(), 0) != d.k) fail(ErrorCode::ShapeMismatch, "occupancies must sum to k");

  LevelSolution sol;
  sol.feasible = true;
  int pos = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < m[i]; ++j) sum += d[sigma[static_cast<std::size_t>(pos + j)]];
    const double b = (c[i] - sum) / m[i];
    for (int j = 0; j < m[i]; ++j) {
      const double shifted = d[sigma[static_cast<std::size_t>(pos + j)]] + b;
      if (shifted < -kStrataTol || shifted > 1.0 + kStrataTol) sol.feasible = false;
    }
    if (!sol.b.empty() && !(sol.b.back() - b > kStrataTol)) sol.feasible = false;
    sol.b.push_back(b);
    pos += m[i];
  }
  return sol;
}

struct StratumCandidate {
  std::vector<int> sigma;
  std::vector<int> m, c;
  std::vector<double> b;
  bool feasible = false;
  std::vector<int> level_codims;
  std::optional<int> witness_r;  // 1-based prefix with level codimension 1
};

inline StratumCandidate make_candidate(const DiagonalTarget& d, std::vector<int> sigma, std::vector<int> m,
                                       std::vector<int> c) {
  StratumCandidate cand;
  const LevelSolution sol = solve_levels(d, sigma, m, c);
  cand.b = sol.b;
  cand.feasible = sol.feasible;
  for (int i = 1; i <= static_cast<int>(m.size()); ++i) {
    const int codim = level_codimension(m, c, i, d.n(), d.k);
    cand.level_codims.push_back(codim);
    if (codim == 1 && !cand.witness_r) cand.witness_r = i;
  }
  cand.sigma = std::move(sigma);
  cand.m = std::move(m);
  cand.c = std::move(c);
  return cand;
}

namespace detail {

inline constexpr int kMaxStrataN = 12;

// Indices of `mask` in ascending order.
inline std::vector<int> mask_indices(std::uint32_t mask) {
  std::vector<int> out;
  for (int i = 0; mask != 0; ++i, mask >>= 1)
    if (mask & 1u) out.push_back(i);
  return out;
}

// Level of a block and whether its shifted entries stay in [0, 1].
inline std::optional<double> block_level(const DiagonalTarget& d, std::uint32_t mask, int c) {
  double sum = 0.0;
  int m = 0;
  double lo = 1e300, hi = -1e300;
  for (int i : mask_indices(mask)) {
    sum += d[i];
    lo = std::min(lo, d[i]);
    hi = std::max(hi, d[i]);
    ++m;
  }
  const double b = (c - sum) / m;
  if (lo + b < -kStrataTol || hi + b > 1.0 + kStrataTol) return std::nullopt;
  return b;
}

// Multiset key of a block: sorted values rounded to the feasibility tolerance.
inline std::string block_key(const DiagonalTarget& d, std::uint32_t mask, int c) {
  std::vector<long long> vals;
  for (int i : mask_indices(mask)) vals.push_back(std::llround(d[i] / kStrataTol));
  std::sort(vals.begin(), vals.end());
  std::ostringstream os;
  os << c << ':';
  for (auto v : vals) os << v << ',';
  return os.str();
}

}  // namespace detail

/// All ordered block decompositions (up to reordering equal values) with at
/// most `max_blocks` blocks, feasible or not.
inline std::vector<StratumCandidate> enumerate_strata(const DiagonalTarget& d, int max_blocks,
                                                      std::size_t limit = 200000) {
  require_hypersimplex(d);
  const int n = d.n(), k = d.k;
  if (n > detail::kMaxStrataN) fail(ErrorCode::TooLarge, "enumeration supports n <= 12");
  max_blocks = std::clamp(max_blocks, 1, n);
  std::vector<StratumCandidate> out;
  std::set<std::string> keys;
  std::vector<std::pair<std::uint32_t, int>> stack;

  auto emit = [&]() {
    std::string key;
    std::vector<int> sigma, m, c;
    for (const auto& [mask, ci] : stack) {
      key += detail::block_key(d, mask, ci) + '|';
      auto idx = detail::mask_indices(mask);
      sigma.insert(sigma.end(), idx.begin(), idx.end());
      m.push_back(static_cast<int>(idx.size()));
      c.push_back(ci);
    }
    if (!keys.insert(key).second) return;
    if (out.size() >= limit) fail(ErrorCode::TooLarge, "more than " + std::to_string(limit) + " candidates");
    out.push_back(make_candidate(d, std::move(sigma), std::move(m), std::move(c)));
  };

  auto dfs = [&](auto&& self, std::uint32_t remaining, int used_c) -> void {
    if (remaining == 0) {
      if (used_c == k) emit();
      return;
    }
    if (static_cast<int>(stack.size()) >= max_blocks) return;
    const int rem_count = std::popcount(remaining);
    // Every non-empty submask of the remaining indices is a candidate next block.
    for (std::uint32_t sub = remaining; sub != 0; sub = (sub - 1) & remaining) {
      const int size = std::popcount(sub);
      for (int ci = 0; ci <= size && used_c + ci <= k; ++ci) {
        if (k - used_c - ci > rem_count - size) continue;
        stack.emplace_back(sub, ci);
        self(self, remaining & ~sub, used_c + ci);
        stack.pop_back();
      }
    }
  };
  dfs(dfs, (1u << n) - 1u, 0);
  std::sort(out.begin(), out.end(), [](const StratumCandidate& x, const StratumCandidate& y) {
    return std::tie(x.m, x.c, x.sigma) < std::tie(y.m, y.c, y.sigma);
  });
  return out;
}

struct CodimOneResult {
  bool none = true;
  std::optional<StratumCandidate> witness;
};

/// Searches for a feasible candidate with a prefix r where C_r = 1 and
/// M_r = n - k, i.e. level codimension exactly 1.
inline CodimOneResult verify_no_codim_one(const DiagonalTarget& d) {
  require_hypersimplex(d);
  const int n = d.n(), k = d.k;
  if (n > detail::kMaxStrataN) fail(ErrorCode::TooLarge, "exhaustive search supports n <= 12");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::uint32_t full = (1u << n) - 1u;

  // Feasible levels of every (block, occupancy).
  std::vector<std::optional<double>> level(static_cast<std::size_t>(full + 1) * (n + 1));
  for (std::uint32_t mask = 1; mask <= full; ++mask)
    for (int c = 0; c <= std::popcount(mask); ++c) level[mask * (n + 1) + c] = detail::block_level(d, mask, c);

  // lowest[state]: smallest first level over completions from (remaining, C, hit);
  // -inf for a finished witness, +inf when nothing completes. A block at level b
  // can precede the rest exactly when b exceeds this value by the tolerance.
  const auto state = [&](std::uint32_t remaining, int big_c, bool hit) {
    return (static_cast<std::size_t>(remaining) * (k + 1) + big_c) * 2 + (hit ? 1 : 0);
  };
  std::vector<double> lowest(static_cast<std::size_t>(full + 1) * (k + 1) * 2, kInf);
  std::vector<char> done(lowest.size(), 0);

  // Calls f(sub, ci, b, next_state) for each admissible next block in a fixed order.
  const auto for_each_block = [&](std::uint32_t remaining, int big_c, bool hit, auto&& f) {
    const int rem_count = std::popcount(remaining);
    const int big_m = n - rem_count;
    for (std::uint32_t sub = remaining; sub != 0; sub = (sub - 1) & remaining) {
      const int size = std::popcount(sub);
      const int nm = big_m + size;
      if (!hit && nm > n - k) continue;  // the prefix size n-k would be skipped
      for (int ci = 0; ci <= size && big_c + ci <= k; ++ci) {
        const int nc = big_c + ci;
        if (!hit && nc > 1) break;
        if (k - nc > rem_count - size) continue;
        const auto& b = level[sub * (n + 1) + ci];
        if (!b) continue;
        const bool now_hit = hit || (nm == n - k && nc == 1);
        if (f(sub, ci, *b, state(remaining & ~sub, nc, now_hit))) return;
      }
    }
  };

  const auto solve = [&](auto&& self, std::uint32_t remaining, int big_c, bool hit) -> double {
    const std::size_t s = state(remaining, big_c, hit);
    if (done[s]) return lowest[s];
    double best = kInf;
    if (remaining == 0) {
      best = (big_c == k && hit) ? -kInf : kInf;
    } else {
      for_each_block(remaining, big_c, hit, [&](std::uint32_t sub, int ci, double b, std::size_t) {
        const int nc = big_c + ci;
        const bool now_hit = hit || (n - std::popcount(remaining & ~sub) == n - k && nc == 1);
        const double rest = self(self, remaining & ~sub, nc, now_hit);
        if (b - rest > kStrataTol) best = std::min(best, b);
        return false;
      });
    }
    done[s] = 1;
    lowest[s] = best;
    return best;
  };

  CodimOneResult res;
  if (solve(solve, full, 0, false) == kInf) return res;

  // Rebuild the first witness in enumeration order.
  std::vector<int> sigma, m, c;
  std::uint32_t remaining = full;
  int big_c = 0;
  bool hit = false;
  double prev = kInf;
  while (remaining != 0) {
    bool advanced = false;
    for_each_block(remaining, big_c, hit, [&](std::uint32_t sub, int ci, double b, std::size_t next) {
      if (prev != kInf && !(prev - b > kStrataTol)) return false;
      if (!done[next] || !(b - lowest[next] > kStrataTol)) return false;
      auto idx = detail::mask_indices(sub);
      sigma.insert(sigma.end(), idx.begin(), idx.end());
      m.push_back(static_cast<int>(idx.size()));
      c.push_back(ci);
      remaining &= ~sub;
      big_c += ci;
      hit = hit || (n - std::popcount(remaining) == n - k && big_c == 1);
      prev = b;
      advanced = true;
      return true;
    });
    if (!advanced) return res;  // unreachable when the table says a witness exists
  }
  res.none = false;
  res.witness = make_candidate(d, std::move(sigma), std::move(m), std::move(c));
  return res;
}

}  // namespace frametop
