#include "ctrace/distinguisher.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "ctrace/error.hpp"

namespace ctrace {

const char* to_string(Verdict v) { return v == Verdict::X ? "x" : "y"; }

DistinguishInstance::DistinguishInstance(GapSequence x, GapSequence y, ChannelParams params,
                                         double C, std::int64_t trace_budget)
    : x_(std::move(x)), y_(std::move(y)), params_(params), C_(C), budget_(trace_budget) {
  if (x_.k() != y_.k()) throw Error("InvalidInstance", "x and y must have the same number of ones");
  if (x_.binary_length() != y_.binary_length()) {
    throw Error("InvalidInstance", "x and y must have the same binary length");
  }
  if (cyclically_equal(x_, y_)) throw Error("InvalidInstance", "x and y are cyclically equal");
  if (!(C_ > 0.0)) throw Error("InvalidInstance", "separation constant C must be > 0");
  if (budget_ < 1) throw Error("InvalidInstance", "trace budget must be >= 1");
}

ClusterLayout cluster_layout(const DistinguishInstance& inst) {
  const double q = inst.params().q();
  const std::size_t k = inst.k();
  std::vector<double> points;
  points.reserve(2 * k);
  for (Gap g : inst.x()) points.push_back(q * static_cast<double>(g));
  for (Gap g : inst.y()) points.push_back(q * static_cast<double>(g));
  auto part = build_partition(std::move(points), inst.C(), inst.n());
  std::vector<Gap> s_x(k), s_y(k);
  for (std::size_t j = 0; j < k; ++j) {
    s_x[j] = part.cluster_of_point()[j];
    s_y[j] = part.cluster_of_point()[k + j];
  }
  auto means = cluster_means(part);
  return ClusterLayout{std::move(part), std::move(s_x), std::move(s_y), std::move(means)};
}

std::int64_t cyclic_branch_draws(double q, std::size_t k) {
  const double success = std::pow(q, static_cast<double>(k));
  return static_cast<std::int64_t>(std::ceil(std::log(0.25) / std::log1p(-success))) + 10;
}

double usefulness_radius(double C, double n, std::size_t k) {
  return static_cast<double>(4 * k + 1) * C * separation_unit(n);
}

double estimator_bound(std::size_t k, int m, double q, double C, double n) {
  const double base = static_cast<double>(4 * k + 1) * C;
  const double ln = std::log(n);
  return static_cast<double>(k) / std::pow(q, m) * std::pow(base, 6) * std::pow(n, 3) *
         std::pow(ln, 6);
}

bool is_useful(const GapSequence& trace_gaps, const SeparatedPartition& part,
               const std::map<int, double>& means, double C, double n, std::size_t k) {
  if (trace_gaps.k() != k) return false;
  const double radius = usefulness_radius(C, n, k);
  for (Gap g : trace_gaps) {
    const auto v = static_cast<double>(g);
    if (std::abs(v - means.at(part.assign(v))) > radius) return false;
  }
  return true;
}

long long align_trace(const GapSequence& trace_gaps, const std::vector<Gap>& s,
                      const SeparatedPartition& part) {
  const std::size_t k = trace_gaps.k();
  if (s.size() != k) throw Error("NoAlignment", "pattern length differs from trace");
  std::vector<Gap> ids(k);
  for (std::size_t j = 0; j < k; ++j) ids[j] = part.assign(static_cast<double>(trace_gaps[j]));
  const long long r = rotation_offset(ids, s);
  if (r < 0) throw Error("NoAlignment", "trace cluster pattern matches no rotation of s");
  return r;
}

double estimator_f(std::span<const Gap> aligned_gaps, const StatIndex& idx,
                   std::span<const double> shift, double q) {
  return shifted_stat(aligned_gaps, shift, idx) / std::pow(q, idx.order());
}

DistinguishResult test_similar_traces(const DistinguishInstance& inst, const std::vector<Gap>& s,
                                      const TraceSource& source) {
  const ClusterLayout layout = cluster_layout(inst);
  if (layout.s_x != s) throw Error("InvalidArgument", "s must equal the cluster pattern of x");
  const long long offset = rotation_offset(layout.s_y, s);
  if (offset < 0) throw Error("InvalidArgument", "cluster pattern of y is not a rotation of s");
  const std::vector<Gap> y_aligned = rotate_left(inst.y().gaps(), offset);

  const std::size_t k = inst.k();
  const double q = inst.params().q();
  const double n = inst.n();
  DistinguishResult result;
  result.similar_path = true;
  result.ell = symmetry_period<Gap>(s);
  const auto idx = min_distinguishing_stat(inst.x().gaps(), y_aligned, result.ell);
  if (!idx) {
    throw Error("NoDistinguishingStat",
                "no statistic of order <= 6 mod " + std::to_string(result.ell) +
                    " separates the candidates");
  }
  result.statistic = idx;

  std::vector<double> shift(k), shift_over_q(k);
  for (std::size_t j = 0; j < k; ++j) {
    shift[j] = layout.means.at(static_cast<int>(s[j]));
    shift_over_q[j] = shift[j] / q;
  }
  result.target_x = shifted_stat(inst.x().gaps(), shift_over_q, *idx);
  result.target_y = shifted_stat(y_aligned, shift_over_q, *idx);

  const double bound = estimator_bound(k, idx->order(), q, inst.C(), n);
  auto& diag = result.diagnostics;
  double sum = 0.0;
  for (std::int64_t t = 0; t < inst.trace_budget(); ++t) {
    const auto trace = source();
    ++diag.drawn;
    if (!trace || trace->k() != k) {
      ++diag.missing_ones;
      continue;
    }
    if (!is_useful(*trace, layout.partition, layout.means, inst.C(), n, k)) {
      ++diag.not_useful;
      continue;
    }
    long long r = 0;
    try {
      r = align_trace(*trace, s, layout.partition);
    } catch (const Error&) {
      ++diag.unaligned;
      continue;
    }
    const auto aligned = rotate_left(trace->gaps(), r);
    const double f = estimator_f(aligned, *idx, shift, q);
    if (std::abs(f) > bound) ++diag.bound_violations;
    sum += f;
    ++result.useful_count;
  }
  if (result.useful_count == 0) {
    throw Error("NoUsefulTraces", "none of " + std::to_string(diag.drawn) + " traces was useful");
  }
  result.f_hat = sum / static_cast<double>(result.useful_count);
  result.verdict = std::abs(result.f_hat - result.target_x) <= std::abs(result.f_hat - result.target_y)
                       ? Verdict::X
                       : Verdict::Y;
  return result;
}

DistinguishResult test_cyclic_traces(const DistinguishInstance& inst, const TraceSource& source) {
  const ClusterLayout layout = cluster_layout(inst);
  if (!layout.patterns_cyclically_distinct()) {
    return test_similar_traces(inst, layout.s_x, source);
  }
  DistinguishResult result;
  const std::int64_t draws = cyclic_branch_draws(inst.params().q(), inst.k());
  for (std::int64_t t = 0; t < draws; ++t) {
    const auto trace = source();
    ++result.diagnostics.drawn;
    if (!trace || trace->k() != inst.k()) {
      ++result.diagnostics.missing_ones;
      continue;
    }
    std::vector<Gap> ids(inst.k());
    for (std::size_t j = 0; j < ids.size(); ++j) {
      ids[j] = layout.partition.assign(static_cast<double>((*trace)[j]));
    }
    result.verdict = cyclically_equal(ids, layout.s_x) ? Verdict::X : Verdict::Y;
    result.useful_count = 1;
    return result;
  }
  throw Error("NoUsableTrace",
              "none of " + std::to_string(draws) + " traces kept all " + std::to_string(inst.k()) +
                  " ones");
}

std::vector<TrialOutcome> run_distinguish_trials(const DistinguishInstance& inst, Verdict source,
                                                 std::int64_t trials, std::uint64_t seed,
                                                 int threads) {
  const GapChannel channel(source == Verdict::X ? inst.x() : inst.y(), inst.params());
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(std::max<std::int64_t>(trials, 0)));
  std::atomic<std::int64_t> next{0};
  const auto worker = [&] {
    for (std::int64_t t = next++; t < trials; t = next++) {
      auto& out = outcomes[static_cast<std::size_t>(t)];
      out.trial = t;
      Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(t));
      try {
        out.result = test_cyclic_traces(inst, [&] { return channel.sample(rng); });
      } catch (const Error& e) {
        out.error = e.name();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (int w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  return outcomes;
}

}  // namespace ctrace
