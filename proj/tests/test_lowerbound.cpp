#include <gtest/gtest.h>

#include <random>
#include <set>

#include "ctrace/channel.hpp"
#include "ctrace/error.hpp"
#include "ctrace/lowerbound.hpp"

using namespace ctrace;

namespace {

std::string error_name(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.name();
  }
  return "";
}

GapSequence lifted(const GapSequence& offsets, std::int64_t n) {
  std::vector<Gap> g;
  for (Gap v : offsets) g.push_back(n + v);
  return GapSequence(std::move(g));
}

std::vector<Gap> random_trace(std::mt19937_64& gen, std::size_t k, std::int64_t n, Gap spread) {
  std::vector<Gap> a(k);
  for (auto& v : a) v = n / 2 + static_cast<Gap>(gen() % static_cast<std::uint64_t>(2 * spread + 1)) - spread;
  return a;
}

}  // namespace

TEST(MatchedPair, Fields) {
  const auto pair = paper_pair();
  EXPECT_EQ(pair.x, (GapSequence{0, 2, 3, 2, 1, 1, 1, 1, 2, 3, 2, 0}));
  EXPECT_EQ(pair.y, (GapSequence{3, 1, 0, 1, 2, 2, 2, 2, 1, 0, 1, 3}));
  EXPECT_EQ(pair.matched_order, 4);
  EXPECT_TRUE(pair.is_permutation);
  EXPECT_TRUE(stats_equal_up_to(pair.x.gaps(), pair.y.gaps(), 4, 1));
  EXPECT_FALSE(stats_equal_up_to(pair.x.gaps(), pair.y.gaps(), 5, 1));
}

TEST(MakePair, Validation) {
  EXPECT_EQ(error_name([] { make_lower_bound_pair(GapSequence{1, 2}, GapSequence{2, 1}); }), "InvalidPair");
  EXPECT_EQ(error_name([] { make_lower_bound_pair(GapSequence{1, 2}, GapSequence{1}); }), "InvalidPair");
  const auto p = make_lower_bound_pair(GapSequence{0, 0, 1}, GapSequence{0, 1, 1});
  EXPECT_FALSE(p.is_permutation);
  EXPECT_EQ(p.matched_order, 0);
}

TEST(ProbRatio, CyclicallyEqualSourcesGiveOne) {
  const LowerBoundPair toy{GapSequence{0, 2}, GapSequence{2, 0}, kDefaultOrderCap, true};
  std::mt19937_64 gen(51);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_trace(gen, 2, 40, 6);
    EXPECT_EQ(prob_ratio_exact(toy, a, 40), 1);
    EXPECT_DOUBLE_EQ(prob_ratio(toy, a, 40, 0.5), 1.0);
  }
  const auto pp = paper_pair();
  const LowerBoundPair self{pp.x, pp.x, kDefaultOrderCap, true};
  EXPECT_EQ(prob_ratio_exact(self, std::vector<Gap>(12, 30), 64), 1);
}

TEST(ProbRatio, ReducedFormMatchesBinomialForm) {
  const auto pair = paper_pair();
  std::mt19937_64 gen(52);
  for (int t = 0; t < 200; ++t) {
    const std::int64_t n = 10 + static_cast<std::int64_t>(gen() % 60);
    const auto a = random_trace(gen, 12, n, 5);
    ASSERT_EQ(prob_ratio_exact(pair, a, n), prob_ratio_binomial_exact(pair, a, n));
  }
}

// Independent of the cancellation argument: the ratio of two full trace
// probabilities from the channel module.
TEST(ProbRatio, MatchesChannelProbabilities) {
  const LowerBoundPair pair = make_lower_bound_pair(GapSequence{0, 0, 0, 0, 1, 1}, GapSequence{0, 0, 0, 1, 0, 1});
  ASSERT_TRUE(pair.is_permutation);
  std::mt19937_64 gen(53);
  const Rational p(1, 3);
  for (int t = 0; t < 40; ++t) {
    const std::int64_t n = 4 + static_cast<std::int64_t>(gen() % 8);
    std::vector<Gap> a(6);
    for (auto& v : a) v = static_cast<Gap>(gen() % static_cast<std::uint64_t>(n + 1));
    const GapSequence ta(a);
    const Rational px = exact_trace_prob(lifted(pair.x, n), ta, p);
    const Rational py = exact_trace_prob(lifted(pair.y, n), ta, p);
    if (py == 0) continue;
    ASSERT_EQ(prob_ratio_exact(pair, a, n), px / py);
  }
}

TEST(ProbRatio, LogGammaAgreesWithExactOnOverlap) {
  const auto pair = paper_pair();
  std::mt19937_64 gen(54);
  for (std::int64_t n = 128; n <= 200; n += 8) {
    for (int t = 0; t < 10; ++t) {
      const auto a = random_trace(gen, 12, n, 20);
      const double exact = to_double(prob_ratio_exact(pair, a, n));
      ASSERT_NEAR(prob_ratio_lgamma(pair, a, n), exact, 1e-9 * exact) << n;
    }
  }
}

TEST(ProbRatio, RotationInvariance) {
  const auto pair = paper_pair();
  std::mt19937_64 gen(55);
  const auto a = random_trace(gen, 12, 80, 8);
  const Rational base = prob_ratio_exact(pair, a, 80);
  for (long long c = 1; c < 12; ++c) EXPECT_EQ(prob_ratio_exact(pair, rotate_left(a, c), 80), base);
}

TEST(ProbRatio, Errors) {
  const auto pair = paper_pair();
  std::vector<Gap> a(12, 10);
  a[3] = 64 + 4;  // beyond n + x*
  EXPECT_EQ(error_name([&] { prob_ratio(pair, a, 64, 0.5); }), "ZeroDenominator");
  EXPECT_EQ(error_name([&] { prob_ratio(pair, std::vector<Gap>(3, 1), 64, 0.5); }), "LengthMismatch");
  EXPECT_EQ(error_name([&] { prob_ratio(pair, std::vector<Gap>(12, 1), 64, 1.5); }), "InvalidProbability");
  const auto nonperm = make_lower_bound_pair(GapSequence{0, 0, 1}, GapSequence{0, 1, 1});
  EXPECT_EQ(error_name([&] { prob_ratio(nonperm, std::vector<Gap>(3, 1), 10, 0.5); }), "InvalidArgument");
}

TEST(Hellinger, Examples) {
  EXPECT_EQ(hellinger_sample_bound(0.5, std::exp(-1.0)), 0);
  EXPECT_EQ(hellinger_sample_bound(0.01, 0.1), 25);
  EXPECT_EQ(error_name([] { hellinger_sample_bound(0.6, 0.1); }), "DomainError");
  EXPECT_EQ(error_name([] { hellinger_sample_bound(0.0, 0.1); }), "DomainError");
  EXPECT_EQ(error_name([] { hellinger_sample_bound(0.1, 1.0); }), "DomainError");
}

TEST(Hellinger, Monotone) {
  std::int64_t prev = hellinger_sample_bound(0.001, 0.01);
  for (double d = 0.002; d <= 0.5; d += 0.001) {
    const auto t = hellinger_sample_bound(d, 0.01);
    ASSERT_LE(t, prev);
    prev = t;
  }
  prev = hellinger_sample_bound(0.01, 0.9);
  for (double e = 0.8; e > 1e-6; e /= 2) {
    const auto t = hellinger_sample_bound(0.01, e);
    ASSERT_GE(t, prev);
    prev = t;
  }
}

TEST(SearchPairs, SmallSearchResultsRevalidate) {
  const auto pairs = search_matching_pairs(3, 3, 2);
  for (const auto& p : pairs) {
    EXPECT_TRUE(p.is_permutation);
    EXPECT_EQ(p.matched_order, 2);
    EXPECT_FALSE(cyclically_equal(p.x, p.y));
    EXPECT_TRUE(stats_equal_up_to(p.x.gaps(), p.y.gaps(), 2, 1));
    EXPECT_FALSE(stats_equal_up_to(p.x.gaps(), p.y.gaps(), 3, 1));
  }
  EXPECT_TRUE(search_matching_pairs(3, 3, 3).empty());
  EXPECT_EQ(pairs_csv({}), "x,y,matched_order\n");
}

TEST(SearchPairs, NoDuplicatesUnderSymmetries) {
  const auto pairs = search_matching_pairs(6, 2, 2);
  std::set<std::pair<GapSequence, GapSequence>> classes;
  for (const auto& p : pairs) {
    auto cx = canonical_rotation(p.x), cy = canonical_rotation(p.y);
    std::vector<Gap> rx(p.x.values().rbegin(), p.x.values().rend());
    std::vector<Gap> ry(p.y.values().rbegin(), p.y.values().rend());
    auto crx = canonical_rotation(GapSequence(rx)), cry = canonical_rotation(GapSequence(ry));
    const auto key = std::min({std::pair{cx, cy}, std::pair{cy, cx}, std::pair{crx, cry}, std::pair{cry, crx}});
    EXPECT_TRUE(classes.insert(key).second);
  }
}

TEST(SearchPairs, ComplementSearchRecoversMatchedPair) {
  const auto pairs = search_matching_pairs(12, 3, 4, {true});
  const auto pp = paper_pair();
  const auto rev = [](const GapSequence& g) { return GapSequence(std::vector<Gap>(g.values().rbegin(), g.values().rend())); };
  const auto same = [](const GapSequence& a, const GapSequence& b, const GapSequence& c, const GapSequence& d) {
    return cyclically_equal(a, c) && cyclically_equal(b, d);
  };
  const bool found = std::any_of(pairs.begin(), pairs.end(), [&](const LowerBoundPair& p) {
    return same(p.x, p.y, pp.x, pp.y) || same(p.y, p.x, pp.x, pp.y) || same(p.x, p.y, rev(pp.x), rev(pp.y)) ||
           same(p.y, p.x, rev(pp.x), rev(pp.y));
  });
  EXPECT_TRUE(found);
}

TEST(Sweep, CyclicallyEqualPairHasNoDeviation) {
  const LowerBoundPair toy{GapSequence{0, 1, 3}, GapSequence{1, 3, 0}, kDefaultOrderCap, true};
  const std::vector<std::int64_t> ns{32, 64};
  const auto table = ratio_deviation_sweep(toy, 0.5, ns, 200, 3.0, 1);
  for (const auto& row : table.rows) EXPECT_EQ(row.max_dev, 0.0);
  EXPECT_TRUE(std::isnan(table.slope));
}

TEST(Sweep, DeterministicAcrossThreads) {
  const auto pair = paper_pair();
  const std::vector<std::int64_t> ns{64, 128};
  const auto a = ratio_deviation_sweep(pair, 0.5, ns, 300, 3.0, 17, 1);
  const auto b = ratio_deviation_sweep(pair, 0.5, ns, 300, 3.0, 17, 4);
  EXPECT_EQ(sweep_csv(a), sweep_csv(b));
  EXPECT_EQ(a.rows[0].samples_kept, 300);
  EXPECT_GE(a.rows[0].samples_drawn, 300);
  EXPECT_LE(a.rows[0].q99_dev, a.rows[0].max_dev);
}

TEST(Sweep, SteeperDecayForHigherMatchedOrder) {
  const std::vector<std::int64_t> ns{64, 128, 256, 512};
  const auto z1 = search_matching_pairs(6, 1, 1);
  ASSERT_FALSE(z1.empty());
  const auto shallow = ratio_deviation_sweep(z1.front(), 0.5, ns, 2000, 3.0, 3, 4);
  const auto steep = ratio_deviation_sweep(paper_pair(), 0.5, ns, 2000, 3.0, 3, 4);
  EXPECT_NEAR(shallow.slope, -1.0, 0.6);
  EXPECT_LT(steep.slope, shallow.slope - 0.8);
}

TEST(Sweep, Validation) {
  const auto pair = paper_pair();
  const std::vector<std::int64_t> bad{128, 64};
  EXPECT_EQ(error_name([&] { ratio_deviation_sweep(pair, 0.5, bad, 10, 3.0, 1); }), "InvalidArgument");
}
