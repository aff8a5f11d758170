#include "ctrace/channel.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "ctrace/error.hpp"

namespace ctrace {

namespace {

void check_probability(const Rational& p) {
  if (p <= 0 || p >= 1) {
    throw Error("InvalidProbability", "deletion probability must lie in (0, 1), got " +
                                          to_decimal(p, 6));
  }
}

void check_same_k(const GapSequence& x, const GapSequence& a) {
  if (x.k() != a.k()) {
    throw Error("LengthMismatch", "trace has " + std::to_string(a.k()) + " ones, source has " +
                                      std::to_string(x.k()));
  }
}

Rational power(const Rational& base, Gap exponent) {
  Rational out = 1;
  for (Gap e = 0; e < exponent; ++e) out *= base;
  return out;
}

// sum_i prod_j f(x_j, a_{(j + i) mod k}).
template <class T, class F>
T shift_sum(const GapSequence& x, const GapSequence& a, F&& factor) {
  const std::size_t k = x.k();
  T total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    T product = 1;
    for (std::size_t j = 0; j < k && product != 0; ++j) product *= factor(x[j], a[(j + i) % k]);
    total += product;
  }
  return total;
}

}  // namespace

ChannelParams::ChannelParams(double p, std::uint64_t seed) : p_(p), seed_(seed) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error("InvalidProbability",
                "deletion probability must lie in (0, 1), got " + std::to_string(p));
  }
}

BinaryString sample_trace(const BinaryString& x, const ChannelParams& params, Rng& rng) {
  std::string kept;
  kept.reserve(x.size());
  for (char c : x.str()) {
    if (!rng.bernoulli(params.p())) kept.push_back(c);
  }
  if (kept.empty()) return BinaryString();
  const auto offset = static_cast<std::ptrdiff_t>(rng.below(kept.size()));
  std::rotate(kept.begin(), kept.begin() + offset, kept.end());
  return BinaryString(std::move(kept));
}

double binomial_pmf(std::int64_t n, std::int64_t r, double q) {
  if (r < 0 || r > n) return 0.0;
  if (q <= 0.0) return r == 0 ? 1.0 : 0.0;
  if (q >= 1.0) return r == n ? 1.0 : 0.0;
  const auto nn = static_cast<double>(n), rr = static_cast<double>(r);
  const double log_pmf = std::lgamma(nn + 1) - std::lgamma(rr + 1) - std::lgamma(nn - rr + 1) +
                         rr * std::log(q) + (nn - rr) * std::log1p(-q);
  return std::exp(log_pmf);
}

// The table spans mean +- 40 sd (or everything for small n); the mass
// outside is below double resolution.
BinomialSampler::BinomialSampler(std::int64_t trials, double q) : trials_(trials) {
  if (trials < 0) throw Error("InvalidArgument", "binomial trial count must be >= 0");
  const double mean = static_cast<double>(trials) * q;
  const double sd = std::sqrt(static_cast<double>(trials) * q * (1.0 - q));
  std::int64_t lo = 0, hi = trials;
  if (trials > 2000) {
    lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(mean - 40.0 * sd - 1.0));
    hi = std::min<std::int64_t>(trials, static_cast<std::int64_t>(mean + 40.0 * sd + 1.0));
  }
  offset_ = lo;
  cdf_.reserve(static_cast<std::size_t>(hi - lo + 1));
  double acc = 0.0;
  for (std::int64_t r = lo; r <= hi; ++r) {
    acc += binomial_pmf(trials, r, q);
    cdf_.push_back(acc);
  }
  for (double& c : cdf_) c /= acc;
}

std::int64_t BinomialSampler::operator()(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto index = std::min<std::ptrdiff_t>(it - cdf_.begin(),
                                              static_cast<std::ptrdiff_t>(cdf_.size()) - 1);
  return offset_ + index;
}

GapChannel::GapChannel(GapSequence source, const ChannelParams& params)
    : source_(std::move(source)), params_(params) {
  std::unordered_map<Gap, std::shared_ptr<const BinomialSampler>> cache;
  for (Gap g : source_) {
    auto& slot = cache[g];
    if (!slot) slot = std::make_shared<const BinomialSampler>(g, params_.q());
    per_gap_.push_back(slot);
  }
}

std::vector<Gap> GapChannel::sample_aligned_gaps(Rng& rng) const {
  std::vector<Gap> gaps(source_.k());
  for (std::size_t j = 0; j < gaps.size(); ++j) gaps[j] = (*per_gap_[j])(rng);
  return gaps;
}

std::optional<GapSequence> GapChannel::sample(Rng& rng) const {
  bool all_ones = true;
  for (std::size_t j = 0; j < source_.k(); ++j) all_ones &= !rng.bernoulli(params_.p());
  auto gaps = sample_aligned_gaps(rng);
  if (!all_ones) return std::nullopt;

  // Rotating the kept string by a uniform offset r and reading from its
  // first 1 starts at the first 1 at or after position r (cyclically).
  Gap length = static_cast<Gap>(gaps.size());
  for (Gap g : gaps) length += g;
  const auto r = static_cast<Gap>(rng.below(static_cast<std::uint64_t>(length)));
  std::size_t start = 0;
  Gap pos = 0;
  for (std::size_t i = 0; i < gaps.size(); pos += 1 + gaps[i], ++i) {
    if (pos >= r) {
      start = i;
      break;
    }
  }
  return GapSequence(rotate_left(gaps, static_cast<long long>(start)));
}

std::optional<GapSequence> sample_gap_trace(const GapSequence& x, const ChannelParams& params,
                                            Rng& rng) {
  return GapChannel(x, params).sample(rng);
}

Rational exact_trace_prob(const GapSequence& x, const GapSequence& a, const Rational& p) {
  check_probability(p);
  check_same_k(x, a);
  const Rational q = 1 - p;
  const BigInt ways =
      shift_sum<BigInt>(x, a, [](Gap xj, Gap aj) { return binomial(xj, aj); });
  const Gap len_x = x.binary_length(), len_a = a.binary_length();
  if (len_a > len_x) return 0;
  return Rational(ways) / len_a * power(p, len_x - len_a) * power(q, len_a);
}

std::map<BinaryString, Rational> brute_force_trace_distribution(const GapSequence& x,
                                                                const Rational& p) {
  check_probability(p);
  const Gap n = x.binary_length();
  if (n > kBruteForceMaxLength) {
    throw Error("TooLarge", "brute force limited to " + std::to_string(kBruteForceMaxLength) +
                                " bits, got " + std::to_string(n));
  }
  const std::string bits = to_binary(x).str();
  // Multiplicity of each surviving (unrotated) string.
  std::map<std::string, std::uint64_t> survivors;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::string kept;
    for (Gap b = 0; b < n; ++b) {
      if (mask >> b & 1U) kept.push_back(bits[static_cast<std::size_t>(b)]);
    }
    ++survivors[kept];
  }
  const Rational q = 1 - p;
  std::map<BinaryString, Rational> dist;
  for (const auto& [kept, count] : survivors) {
    const auto len = static_cast<Gap>(kept.size());
    const Rational mass = Rational(count) * power(q, len) * power(p, n - len);
    if (kept.empty()) {
      dist[BinaryString()] += mass;
      continue;
    }
    const Rational share = mass / len;
    for (Gap r = 0; r < len; ++r) {
      std::string rotated = kept.substr(static_cast<std::size_t>(r)) +
                            kept.substr(0, static_cast<std::size_t>(r));
      dist[BinaryString(std::move(rotated))] += share;
    }
  }
  return dist;
}

double conditioned_gap_prob(const GapSequence& x, const GapSequence& a, double p) {
  ChannelParams params(p);
  check_same_k(x, a);
  const double q = params.q();
  return shift_sum<double>(x, a, [q](Gap xj, Gap aj) { return binomial_pmf(xj, aj, q); }) /
         static_cast<double>(x.k());
}

Rational conditioned_gap_prob_exact(const GapSequence& x, const GapSequence& a,
                                    const Rational& p) {
  check_probability(p);
  check_same_k(x, a);
  const Rational q = 1 - p;
  return shift_sum<Rational>(x, a,
                             [&](Gap xj, Gap aj) {
                               if (aj > xj) return Rational(0);
                               return Rational(binomial(xj, aj)) * power(q, aj) *
                                      power(p, xj - aj);
                             }) /
         static_cast<long long>(x.k());
}

}  // namespace ctrace
