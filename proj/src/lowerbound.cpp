#include "ctrace/lowerbound.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "ctrace/channel.hpp"
#include "ctrace/error.hpp"

namespace ctrace {

namespace {

bool same_multiset(std::span<const Gap> x, std::span<const Gap> y) {
  std::vector<Gap> a(x.begin(), x.end()), b(y.begin(), y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

void check_trace(const LowerBoundPair& pair, std::span<const Gap> a, std::int64_t n) {
  if (a.size() != pair.x.k()) {
    throw Error("LengthMismatch", "trace has " + std::to_string(a.size()) + " gaps, pair has " +
                                      std::to_string(pair.x.k()));
  }
  if (n < 0) throw Error("InvalidArgument", "base gap n must be >= 0");
  for (Gap v : a) {
    if (v < 0) throw Error("InvalidArgument", "trace gaps must be >= 0");
  }
}

// sum_i prod_j prod_{h = x_j + 1}^{x*} (n + h - a_{j+i}). Equals
// sum_i prod_j C(n + x_j, a_{j+i}) divided by a factor shared by every
// permutation of x, whenever all a_j <= n + x*.
BigInt reduced_shift_sum(const GapSequence& x, Gap x_max, std::span<const Gap> a, std::int64_t n) {
  const std::size_t k = x.k();
  BigInt total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    BigInt product = 1;
    for (std::size_t j = 0; j < k && product != 0; ++j) {
      std::int64_t factor = 1;
      const Gap aj = a[(j + i) % k];
      for (Gap h = x[j] + 1; h <= x_max; ++h) factor *= n + h - aj;
      product *= factor;
    }
    total += product;
  }
  return total;
}

std::pair<BigInt, BigInt> reduced_ratio_parts(const LowerBoundPair& pair, std::span<const Gap> a,
                                              std::int64_t n) {
  if (!pair.is_permutation) {
    throw Error("InvalidArgument", "probability ratio needs a permutation pair");
  }
  check_trace(pair, a, n);
  const Gap x_max = *std::max_element(pair.x.begin(), pair.x.end());
  for (Gap v : a) {
    if (v > n + x_max) {
      throw Error("ZeroDenominator", "trace gap " + std::to_string(v) +
                                         " exceeds every source gap; both probabilities vanish");
    }
  }
  BigInt num = reduced_shift_sum(pair.x, x_max, a, n);
  BigInt den = reduced_shift_sum(pair.y, x_max, a, n);
  if (den == 0) throw Error("ZeroDenominator", "trace has probability 0 under the y-source");
  return {std::move(num), std::move(den)};
}

double log_binomial(double n, double r) {
  return std::lgamma(n + 1) - std::lgamma(r + 1) - std::lgamma(n - r + 1);
}

// log sum_i exp(t_i), Kahan-compensated over the shifted terms.
double log_sum_exp(const std::vector<double>& terms) {
  double top = -std::numeric_limits<double>::infinity();
  for (double t : terms) top = std::max(top, t);
  if (std::isinf(top)) return top;
  double sum = 0.0, carry = 0.0;
  for (double t : terms) {
    const double y = std::exp(t - top) - carry;
    const double s = sum + y;
    carry = (s - sum) - y;
    sum = s;
  }
  return top + std::log(sum);
}

double log_shift_sum(const GapSequence& x, std::span<const Gap> a, std::int64_t n) {
  const std::size_t k = x.k();
  std::vector<double> terms;
  terms.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    double t = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const Gap top = n + x[j], aj = a[(j + i) % k];
      if (aj > top) {
        t = -std::numeric_limits<double>::infinity();
        break;
      }
      t += log_binomial(static_cast<double>(top), static_cast<double>(aj));
    }
    terms.push_back(t);
  }
  return log_sum_exp(terms);
}

BigInt binomial_shift_sum(const GapSequence& x, std::span<const Gap> a, std::int64_t n) {
  const std::size_t k = x.k();
  BigInt total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    BigInt product = 1;
    for (std::size_t j = 0; j < k && product != 0; ++j) {
      product *= binomial(n + x[j], a[(j + i) % k]);
    }
    total += product;
  }
  return total;
}

double quantile(std::vector<double> values, double level) {
  if (values.empty()) return 0.0;
  // Nearest-rank quantile.
  auto rank = static_cast<std::size_t>(std::ceil(level * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size()) - 1;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank), values.end());
  return values[rank];
}

double fit_slope(const std::vector<SweepRow>& rows, std::size_t count) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t r = 0; r < count; ++r) {
    if (rows[r].max_dev > 0.0) {
      pts.emplace_back(std::log(static_cast<double>(rows[r].n)), std::log(rows[r].max_dev));
    }
  }
  if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (const auto& [u, v] : pts) {
    mx += u;
    my += v;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0, sxx = 0.0;
  for (const auto& [u, v] : pts) {
    sxy += (u - mx) * (v - my);
    sxx += (u - mx) * (u - mx);
  }
  return sxy / sxx;
}

// Index of the first order (>= 2) at which some ell = 1 statistic differs,
// or cap + 1. Orders are checked with 64-bit arithmetic; inputs are small.
int first_mismatch_order(std::span<const Gap> x, std::span<const Gap> y, int cap) {
  const int k = static_cast<int>(x.size());
  for (int m = 1; m <= cap; ++m) {
    bool differs = false;
    for_each_nondecreasing_tuple(k, m, 1, [&](std::span<const int> t) {
      differs = detail::stat_i64(x, t, 1) != detail::stat_i64(y, t, 1);
      return !differs;
    });
    if (differs) return m;
  }
  return cap + 1;
}

std::vector<Gap> reversed(std::span<const Gap> v) { return {v.rbegin(), v.rend()}; }

using PairKey = std::pair<std::vector<Gap>, std::vector<Gap>>;

// Class representative under rotation of each side, swap and reversal.
PairKey pair_key(std::span<const Gap> x, std::span<const Gap> y) {
  const auto canon = [](std::vector<Gap> v) {
    return canonical_rotation(GapSequence(std::move(v))).values();
  };
  const std::vector<Gap> cx = canon({x.begin(), x.end()}), cy = canon({y.begin(), y.end()});
  const std::vector<Gap> rx = canon(reversed(x)), ry = canon(reversed(y));
  return std::min({PairKey{cx, cy}, PairKey{cy, cx}, PairKey{rx, ry}, PairKey{ry, rx}});
}

// Odometer over {0..max_value}^k.
bool advance(std::vector<Gap>& v, int max_value) {
  for (auto& d : v) {
    if (d < max_value) {
      ++d;
      return true;
    }
    d = 0;
  }
  return false;
}

}  // namespace

LowerBoundPair make_lower_bound_pair(GapSequence x, GapSequence y) {
  if (x.k() != y.k()) throw Error("InvalidPair", "x and y must have the same length");
  if (cyclically_equal(x, y)) throw Error("InvalidPair", "x and y are cyclically equal");
  const bool permutation = same_multiset(x.gaps(), y.gaps());
  const int order = matched_order(x.gaps(), y.gaps(), 1, kDefaultOrderCap + 1);
  if (order > kDefaultOrderCap) {
    throw Error("InvalidPair", "statistics agree beyond order " + std::to_string(kDefaultOrderCap));
  }
  LowerBoundPair pair{std::move(x), std::move(y), order, permutation};
  return pair;
}

LowerBoundPair paper_pair() {
  const GapSequence x{0, 2, 3, 2, 1, 1, 1, 1, 2, 3, 2, 0};
  std::vector<Gap> y;
  for (Gap v : x) y.push_back(3 - v);
  LowerBoundPair pair = make_lower_bound_pair(x, GapSequence(std::move(y)));
  if (pair.matched_order != 4 || !pair.is_permutation) {
    throw Error("InvalidPair", "reference pair failed re-verification");
  }
  return pair;
}

Rational prob_ratio_exact(const LowerBoundPair& pair, std::span<const Gap> a, std::int64_t n) {
  auto [num, den] = reduced_ratio_parts(pair, a, n);
  return Rational(num, den);
}

double prob_ratio_deviation(const LowerBoundPair& pair, std::span<const Gap> a, std::int64_t n) {
  const auto [num, den] = reduced_ratio_parts(pair, a, n);
  const BigInt diff = num - den;
  return diff.convert_to<double>() / den.convert_to<double>();
}

double prob_ratio(const LowerBoundPair& pair, std::span<const Gap> a, std::int64_t n, double p) {
  ChannelParams params(p);  // validates p; it cancels from the ratio
  return 1.0 + prob_ratio_deviation(pair, a, n);
}

Rational prob_ratio_binomial_exact(const LowerBoundPair& pair, std::span<const Gap> a,
                                   std::int64_t n) {
  check_trace(pair, a, n);
  const BigInt den = binomial_shift_sum(pair.y, a, n);
  if (den == 0) throw Error("ZeroDenominator", "trace has probability 0 under the y-source");
  return Rational(binomial_shift_sum(pair.x, a, n), den);
}

double prob_ratio_lgamma(const LowerBoundPair& pair, std::span<const Gap> a, std::int64_t n) {
  check_trace(pair, a, n);
  const double log_den = log_shift_sum(pair.y, a, n);
  if (std::isinf(log_den)) {
    throw Error("ZeroDenominator", "trace has probability 0 under the y-source");
  }
  return std::exp(log_shift_sum(pair.x, a, n) - log_den);
}

SweepTable ratio_deviation_sweep(const LowerBoundPair& pair, double p,
                                 std::span<const std::int64_t> n_values,
                                 std::int64_t samples_per_n, double C_window, std::uint64_t seed,
                                 int threads) {
  const ChannelParams params(p);
  if (samples_per_n < 1) throw Error("InvalidArgument", "samples per n must be >= 1");
  if (!(C_window > 0.0)) throw Error("InvalidArgument", "window constant must be > 0");
  for (std::size_t i = 1; i < n_values.size(); ++i) {
    if (n_values[i] <= n_values[i - 1]) throw Error("InvalidArgument", "n values must increase");
  }
  const std::size_t k = pair.x.k();
  SweepTable table;
  for (std::int64_t n : n_values) {
    if (n < 2) throw Error("InvalidArgument", "n values must be >= 2");
    std::vector<Gap> source;
    for (Gap v : pair.x) source.push_back(n + v);
    const GapChannel channel(GapSequence(std::move(source)), params);
    const double centre = static_cast<double>(n) * params.q();
    const double half_width =
        C_window * std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(n)));

    // Sample s redraws from its own stream until it lands in the window.
    std::vector<double> devs(static_cast<std::size_t>(samples_per_n));
    std::vector<std::int64_t> attempts(devs.size());
    std::atomic<std::int64_t> next{0};
    const std::uint64_t n_stream = splitmix64(seed ^ static_cast<std::uint64_t>(n));
    const auto worker = [&] {
      for (std::int64_t s = next++; s < samples_per_n; s = next++) {
        Rng rng = Rng::derive(n_stream, static_cast<std::uint64_t>(s));
        std::vector<Gap> a;
        std::int64_t tries = 0;
        do {
          ++tries;
          a = rotate_left(channel.sample_aligned_gaps(rng),
                          static_cast<long long>(rng.below(k)));
        } while (std::any_of(a.begin(), a.end(), [&](Gap v) {
          return std::abs(static_cast<double>(v) - centre) > half_width;
        }));
        attempts[static_cast<std::size_t>(s)] = tries;
        devs[static_cast<std::size_t>(s)] = std::abs(prob_ratio_deviation(pair, a, n));
      }
    };
    {
      std::vector<std::jthread> pool;
      for (int w = 1; w < threads; ++w) pool.emplace_back(worker);
      worker();
    }

    SweepRow row;
    row.n = n;
    row.samples_kept = samples_per_n;
    for (std::int64_t t : attempts) row.samples_drawn += t;
    row.max_dev = *std::max_element(devs.begin(), devs.end());
    row.q99_dev = quantile(std::move(devs), 0.99);
    table.rows.push_back(row);
    table.rows.back().slope_so_far = fit_slope(table.rows, table.rows.size());
  }
  table.slope = fit_slope(table.rows, table.rows.size());
  return table;
}

std::string sweep_csv(const SweepTable& table) {
  std::ostringstream out;
  out.precision(10);
  out << "n,samples_kept,max_dev,q99_dev,slope_so_far\n";
  for (const auto& r : table.rows) {
    out << r.n << ',' << r.samples_kept << ',' << r.max_dev << ',' << r.q99_dev << ',';
    if (std::isnan(r.slope_so_far)) {
      out << "nan";
    } else {
      out << r.slope_so_far;
    }
    out << '\n';
  }
  return out.str();
}

std::int64_t hellinger_sample_bound(double d_H, double epsilon) {
  if (!(d_H > 0.0 && d_H <= 0.5)) throw Error("DomainError", "d_H must lie in (0, 1/2]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("DomainError", "epsilon must lie in (0, 1)");
  return static_cast<std::int64_t>(std::floor(std::log(1.0 / epsilon) / (9.0 * d_H)));
}

std::vector<LowerBoundPair> search_matching_pairs(int k, int max_value, int target_order,
                                                  PairSearchOptions options) {
  if (k < 1 || max_value < 0) throw Error("InvalidArgument", "k must be >= 1 and max_value >= 0");
  if (target_order < 1 || target_order > kDefaultOrderCap) {
    throw Error("InvalidArgument", "target order must lie in [1, 6]");
  }
  std::set<PairKey> found;
  const auto consider = [&](std::span<const Gap> x, std::span<const Gap> y) {
    if (cyclically_equal(x, y)) return;
    if (first_mismatch_order(x, y, target_order + 1) != target_order + 1) return;
    found.insert(pair_key(x, y));
  };

  std::vector<Gap> x(static_cast<std::size_t>(k), 0);
  if (options.complement_only) {
    std::vector<Gap> y(x.size());
    do {
      std::vector<int> counts(static_cast<std::size_t>(max_value) + 1, 0);
      for (Gap v : x) ++counts[static_cast<std::size_t>(v)];
      bool symmetric = true;
      for (int v = 0; v <= max_value && symmetric; ++v) {
        symmetric = counts[static_cast<std::size_t>(v)] ==
                    counts[static_cast<std::size_t>(max_value - v)];
      }
      if (!symmetric || !is_canonical_rotation(x)) continue;
      for (std::size_t j = 0; j < x.size(); ++j) y[j] = max_value - x[j];
      consider(x, y);
    } while (advance(x, max_value));
  } else {
    // Canonical representatives grouped by multiset.
    std::map<std::vector<Gap>, std::vector<std::vector<Gap>>> by_multiset;
    do {
      if (!is_canonical_rotation(x)) continue;
      std::vector<Gap> sorted = x;
      std::sort(sorted.begin(), sorted.end());
      by_multiset[sorted].push_back(x);
    } while (advance(x, max_value));
    for (const auto& [ms, members] : by_multiset) {
      for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) consider(members[a], members[b]);
      }
    }
  }

  std::vector<LowerBoundPair> out;
  for (const auto& [kx, ky] : found) out.push_back(make_lower_bound_pair(GapSequence(kx), GapSequence(ky)));
  return out;
}

std::string pairs_csv(const std::vector<LowerBoundPair>& pairs) {
  std::ostringstream out;
  out << "x,y,matched_order\n";
  for (const auto& p : pairs) {
    out << '"' << format_gaps(p.x) << "\",\"" << format_gaps(p.y) << "\"," << p.matched_order
        << '\n';
  }
  return out.str();
}

}  // namespace ctrace
