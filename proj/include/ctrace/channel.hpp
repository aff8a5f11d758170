#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "ctrace/gapseq.hpp"
#include "ctrace/numeric.hpp"
#include "ctrace/rng.hpp"

namespace ctrace {

// Deletion probability p in (0, 1) and the master seed of an experiment.
class ChannelParams {
 public:
  // Throws Error("InvalidProbability") unless 0 < p < 1.
  explicit ChannelParams(double p, std::uint64_t seed = 0);

  double p() const { return p_; }
  double q() const { return 1.0 - p_; }
  std::uint64_t seed() const { return seed_; }

 private:
  double p_;
  std::uint64_t seed_;
};

// Circular deletion channel on an arbitrary binary string: delete each bit
// with probability p, then rotate by a uniform offset (none for "").
BinaryString sample_trace(const BinaryString& x, const ChannelParams& params, Rng& rng);

// Exact Bin(n, q) sampler by inversion against a precomputed CDF table.
class BinomialSampler {
 public:
  BinomialSampler(std::int64_t trials, double q);
  std::int64_t operator()(Rng& rng) const;
  std::int64_t trials() const { return trials_; }

 private:
  std::int64_t trials_;
  std::int64_t offset_ = 0;  // value of cdf_[0]
  std::vector<double> cdf_;
};

// Gap-level view of the channel for a fixed source: keeps one sampler per
// distinct gap value. Immutable after construction, so one instance may be
// shared by worker threads that each own their Rng.
class GapChannel {
 public:
  GapChannel(GapSequence source, const ChannelParams& params);

  // The parsed trace when all k ones survive (read from the first 1 of the
  // rotated trace), otherwise nullopt. Same law as
  // parse_gaps(sample_trace(to_binary(source))) restricted to k-one traces.
  std::optional<GapSequence> sample(Rng& rng) const;

  // Gap tuple under the channel conditioned on every 1 surviving, in the
  // source's own frame (no rotation).
  std::vector<Gap> sample_aligned_gaps(Rng& rng) const;

  const GapSequence& source() const { return source_; }
  const ChannelParams& params() const { return params_; }

 private:
  GapSequence source_;
  ChannelParams params_;
  std::vector<std::shared_ptr<const BinomialSampler>> per_gap_;
};

std::optional<GapSequence> sample_gap_trace(const GapSequence& x, const ChannelParams& params,
                                            Rng& rng);

// P[trace == to_binary(a)] =
//   (1/|a|) * (sum_i prod_j C(x_j, a_{j+i})) * p^{|x|-|a|} * q^{|a|}.
// Any rotation of to_binary(a) has the same probability. Throws
// Error("InvalidProbability") unless 0 < p < 1 and Error("LengthMismatch")
// if a and x have different k.
Rational exact_trace_prob(const GapSequence& x, const GapSequence& a, const Rational& p);

// Exact law of the trace string by enumerating all 2^|x| deletion patterns.
// Throws Error("TooLarge") above kBruteForceMaxLength bits.
inline constexpr Gap kBruteForceMaxLength = 18;
std::map<BinaryString, Rational> brute_force_trace_distribution(const GapSequence& x,
                                                                const Rational& p);

// mu0(a) = (1/k) sum_i prod_j Bin(x_j, q)(a_{j+i}): the gap-tuple law given
// that all k ones survive, read from a uniformly random 1.
double conditioned_gap_prob(const GapSequence& x, const GapSequence& a, double p);
Rational conditioned_gap_prob_exact(const GapSequence& x, const GapSequence& a, const Rational& p);

double binomial_pmf(std::int64_t n, std::int64_t r, double q);

}  // namespace ctrace
