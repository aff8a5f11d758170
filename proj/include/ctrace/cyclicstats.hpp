#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctrace/gapseq.hpp"
#include "ctrace/numeric.hpp"

namespace ctrace {

inline constexpr int kDefaultOrderCap = 6;

// Cyclic statistic mod ell:
//   S_{i_1..i_m; ell}(x) = sum_{j=1}^{k/ell} x_{i_1 + j*ell} * ... * x_{i_m + j*ell}
// with 1-based indices taken mod k.
struct StatIndex {
  std::vector<int> indices;  // 1-based, each in [1, k]
  int modulus = 1;

  int order() const { return static_cast<int>(indices.size()); }

  // Text form "i1,i2,...,im;ell", e.g. "1,3;2". ";ell" may be omitted (ell = 1).
  static StatIndex parse(std::string_view text);
  std::string str() const;

  friend bool operator==(const StatIndex&, const StatIndex&) = default;
};

// Throws Error("ModulusMismatch") if ell does not divide k, and
// Error("InvalidStatIndex") for empty tuples or indices outside [1, k].
void validate(const StatIndex& idx, std::size_t k);

BigInt stat(std::span<const Gap> x, const StatIndex& idx);
inline BigInt stat(const GapSequence& x, const StatIndex& idx) { return stat(x.gaps(), idx); }

// S(x - s). Exact for rational shifts, double precision otherwise; double
// comparisons elsewhere use kShiftedStatTolerance.
double shifted_stat(std::span<const Gap> x, std::span<const double> s, const StatIndex& idx);
Rational shifted_stat(std::span<const Gap> x, std::span<const Rational> s, const StatIndex& idx);
inline constexpr double kShiftedStatTolerance = 1e-6;

// True iff every statistic mod ell of order <= m_max agrees on x and y.
bool stats_equal_up_to(std::span<const Gap> x, std::span<const Gap> y, int m_max, int ell);

// Largest z <= cap such that stats_equal_up_to(x, y, z, ell); 0 if the
// first-order statistics already differ.
int matched_order(std::span<const Gap> x, std::span<const Gap> y, int ell, int cap = kDefaultOrderCap);

// Smallest-order statistic mod ell separating x and y, lexicographically
// first among tuples of that order.
std::optional<StatIndex> min_distinguishing_stat(std::span<const Gap> x, std::span<const Gap> y,
                                                 int ell, int cap = kDefaultOrderCap);

// Smallest divisor ell of k with s_j = s_{j+ell} for all j.
template <class T>
int symmetry_period(std::span<const T> s) {
  const std::size_t k = s.size();
  for (std::size_t ell = 1; ell < k; ++ell) {
    if (k % ell != 0) continue;
    bool symmetric = true;
    for (std::size_t j = 0; j < k && symmetric; ++j) symmetric = s[j] == s[(j + ell) % k];
    if (symmetric) return static_cast<int>(ell);
  }
  return static_cast<int>(k);
}

struct CounterexamplePair {
  std::vector<Gap> x;
  std::vector<Gap> y;
  int cap = kDefaultOrderCap;
};

// Exhaustive check over {0..max_value}^k: every pair of cyclically distinct
// sequences (one canonical representative per rotation class) whose ell = 1
// statistics agree through order `cap`. Empty for cap = 6.
std::vector<CounterexamplePair> verify_characterization(int k, int max_value,
                                                        int cap = kDefaultOrderCap,
                                                        int threads = 1);

std::string counterexamples_csv(const std::vector<CounterexamplePair>& pairs);

// Calls fn(tuple) for every nondecreasing m-tuple over [1, k] (1-based) whose
// first entry is <= first_max, in lexicographic order. Stops early when fn
// returns false.
void for_each_nondecreasing_tuple(int k, int m, int first_max,
                                  const std::function<bool(std::span<const int>)>& fn);

namespace detail {
// Unchecked 64-bit evaluation for small-valued enumeration sweeps.
std::int64_t stat_i64(std::span<const Gap> x, std::span<const int> indices, int ell);
}  // namespace detail

}  // namespace ctrace
