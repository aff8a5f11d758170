#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ctrace/cyclicstats.hpp"
#include "ctrace/gapseq.hpp"
#include "ctrace/numeric.hpp"

namespace ctrace {

// Two cyclically distinct gap offset sequences whose statistics agree
// through `matched_order` and differ at the next order. The sources they
// stand for are 10^{n+x_1}...10^{n+x_k} for a base gap n.
struct LowerBoundPair {
  GapSequence x;
  GapSequence y;
  int matched_order = 0;
  bool is_permutation = false;
};

// Computes the matched order and permutation flag, and checks the pair
// invariants. Throws Error("InvalidPair") for cyclically equal sequences or
// mismatched k.
LowerBoundPair make_lower_bound_pair(GapSequence x, GapSequence y);

// x = (0,2,3,2,1,1,1,1,2,3,2,0), y = 3 - x, matched through order 4.
LowerBoundPair paper_pair();

// P[trace = a | x-source] / P[trace = a | y-source] for base gap n. For
// permutation pairs every symmetric factor cancels and the ratio reduces to
// sum_i prod_j prod_{h=x_j+1}^{x*} (n + h - a_{j+i}) over the same with y,
// which is evaluated exactly. Throws Error("ZeroDenominator").
Rational prob_ratio_exact(const LowerBoundPair& pair, std::span<const Gap> a, std::int64_t n);
// (ratio - 1), exact then rounded.
double prob_ratio_deviation(const LowerBoundPair& pair, std::span<const Gap> a, std::int64_t n);
// Ratio as a double; p cancels but is validated. Throws Error("NotPermutation")
// for non-permutation pairs.
double prob_ratio(const LowerBoundPair& pair, std::span<const Gap> a, std::int64_t n, double p);

// Same ratio straight from the binomial form, without the permutation
// reduction: exact big-integer and log-gamma (compensated log-sum-exp).
Rational prob_ratio_binomial_exact(const LowerBoundPair& pair, std::span<const Gap> a,
                                   std::int64_t n);
double prob_ratio_lgamma(const LowerBoundPair& pair, std::span<const Gap> a, std::int64_t n);

struct SweepRow {
  std::int64_t n = 0;
  std::int64_t samples_drawn = 0;
  std::int64_t samples_kept = 0;
  double max_dev = 0.0;
  double q99_dev = 0.0;
  double slope_so_far = 0.0;  // NaN until two rows are available
};

struct SweepTable {
  std::vector<SweepRow> rows;
  double slope = 0.0;  // least squares of ln(max_dev) against ln(n)
};

// For each n, samples gap tuples from the x-source conditioned on all ones
// surviving until `samples_per_n` of them fall in the window
// |a_j - n(1-p)| <= C_window sqrt(n ln n), and records the max and 0.99
// quantile of |ratio - 1| over the kept samples.
SweepTable ratio_deviation_sweep(const LowerBoundPair& pair, double p,
                                 std::span<const std::int64_t> n_values,
                                 std::int64_t samples_per_n, double C_window, std::uint64_t seed,
                                 int threads = 1);

std::string sweep_csv(const SweepTable& table);

// floor(ln(1/epsilon) / (9 d_H)); Error("DomainError") unless
// 0 < d_H <= 1/2 and 0 < epsilon < 1.
std::int64_t hellinger_sample_bound(double d_H, double epsilon);

struct PairSearchOptions {
  // Only consider y = max_value - x (elementwise).
  bool complement_only = false;
};

// Every pair from {0..max_value}^k that is cyclically distinct, a
// permutation, equal through target_order and unequal at target_order + 1,
// one representative per class under rotation, swap and reversal.
std::vector<LowerBoundPair> search_matching_pairs(int k, int max_value, int target_order,
                                                  PairSearchOptions options = {});

std::string pairs_csv(const std::vector<LowerBoundPair>& pairs);

}  // namespace ctrace
