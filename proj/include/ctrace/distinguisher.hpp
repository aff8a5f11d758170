#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctrace/channel.hpp"
#include "ctrace/cyclicstats.hpp"
#include "ctrace/gapseq.hpp"
#include "ctrace/partition.hpp"

namespace ctrace {

enum class Verdict { X, Y };
const char* to_string(Verdict v);

// Two cyclically distinct candidates with equal k and equal binary length.
class DistinguishInstance {
 public:
  // Throws Error("InvalidInstance") on mismatched k / length or cyclically
  // equal candidates.
  DistinguishInstance(GapSequence x, GapSequence y, ChannelParams params,
                      double C = kDefaultSeparation, std::int64_t trace_budget = 100000);

  const GapSequence& x() const { return x_; }
  const GapSequence& y() const { return y_; }
  const ChannelParams& params() const { return params_; }
  double C() const { return C_; }
  std::int64_t trace_budget() const { return budget_; }
  std::size_t k() const { return x_.k(); }
  // Binary string length n driving the sqrt(n) ln(n) scale.
  double n() const { return static_cast<double>(x_.binary_length()); }

 private:
  GapSequence x_, y_;
  ChannelParams params_;
  double C_;
  std::int64_t budget_;
};

// Yields the parsed gaps of the next trace, or nullopt when that trace does
// not have exactly k ones.
using TraceSource = std::function<std::optional<GapSequence>()>;

// Partition of {q x_j} and {q y_j} plus the derived cluster patterns.
struct ClusterLayout {
  SeparatedPartition partition;
  std::vector<Gap> s_x;
  std::vector<Gap> s_y;
  std::map<int, double> means;  // g(id)
  bool patterns_cyclically_distinct() const { return !cyclically_equal(s_x, s_y); }
};
ClusterLayout cluster_layout(const DistinguishInstance& inst);

struct TraceDiagnostics {
  std::int64_t drawn = 0;
  std::int64_t missing_ones = 0;
  std::int64_t not_useful = 0;
  std::int64_t unaligned = 0;
  std::int64_t bound_violations = 0;
};

struct DistinguishResult {
  Verdict verdict = Verdict::X;
  bool similar_path = false;
  // Populated on the similar-traces path only.
  std::optional<StatIndex> statistic;
  int ell = 0;
  double f_hat = 0.0;
  double target_x = 0.0;
  double target_y = 0.0;
  std::int64_t useful_count = 0;
  TraceDiagnostics diagnostics;
};

// Number of traces the cyclically-distinct branch draws:
// ceil(ln(1/4) / ln(1 - q^k)) + 10.
std::int64_t cyclic_branch_draws(double q, std::size_t k);

// Builds the partition; if the cluster patterns are cyclically distinct,
// classifies the first k-one trace by its pattern (throws
// Error("NoUsableTrace") if none of the draws has k ones), otherwise rotates
// y onto x's pattern and runs test_similar_traces.
DistinguishResult test_cyclic_traces(const DistinguishInstance& inst, const TraceSource& source);

// Requires s == s_x and s_y a rotation of s. Estimates the minimal
// distinguishing statistic mod the period of s from useful traces and picks
// the closer candidate (ties go to X). Throws Error("NoUsefulTraces") or
// Error("NoDistinguishingStat").
DistinguishResult test_similar_traces(const DistinguishInstance& inst, const std::vector<Gap>& s,
                                      const TraceSource& source);

// (4k+1) * C * sqrt(n) * ln(n)
double usefulness_radius(double C, double n, std::size_t k);

bool is_useful(const GapSequence& trace_gaps, const SeparatedPartition& part,
               const std::map<int, double>& means, double C, double n, std::size_t k);

// Smallest r with assign(rotate_left(trace, r)_j) == s_j for all j. Throws
// Error("NoAlignment").
long long align_trace(const GapSequence& trace_gaps, const std::vector<Gap>& s,
                      const SeparatedPartition& part);

// (1/q^m) * sum_{j=1}^{k/ell} prod_r (gap_{i_r + j ell} - shift_{i_r + j ell}),
// where shift_j = g(s_j) for an aligned trace.
double estimator_f(std::span<const Gap> aligned_gaps, const StatIndex& idx,
                   std::span<const double> shift, double q);

// Per-trace magnitude bound on useful traces:
// (k / q^m) (4k+1)^6 C^6 n^3 ln^6 n.
double estimator_bound(std::size_t k, int m, double q, double C, double n);

// Repeated experiments: trial t draws traces from the channel of `source`
// (x or y of the instance) with Rng::derive(seed, t). A trial that throws
// records the error name instead of a verdict. Results are identical for
// any thread count.
struct TrialOutcome {
  std::int64_t trial = 0;
  std::optional<DistinguishResult> result;
  std::string error;
};
std::vector<TrialOutcome> run_distinguish_trials(const DistinguishInstance& inst, Verdict source,
                                                 std::int64_t trials, std::uint64_t seed,
                                                 int threads = 1);

}  // namespace ctrace
