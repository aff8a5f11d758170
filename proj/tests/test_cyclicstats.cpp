#include <gtest/gtest.h>

#include <random>

#include "ctrace/cyclicstats.hpp"
#include "ctrace/error.hpp"

using namespace ctrace;

namespace {

const std::vector<Gap> kMatchedX{0, 2, 3, 2, 1, 1, 1, 1, 2, 3, 2, 0};
const std::vector<Gap> kMatchedY{3, 1, 0, 1, 2, 2, 2, 2, 1, 0, 1, 3};

// Direct evaluation straight from the definition, with the full (not
// nondecreasing) tuple space; the oracle for the optimized paths.
BigInt naive_stat(const std::vector<Gap>& x, const std::vector<int>& idx, int ell) {
  const int k = static_cast<int>(x.size());
  BigInt total = 0;
  for (int j = 1; j <= k / ell; ++j) {
    BigInt term = 1;
    for (int i : idx) term *= x[static_cast<std::size_t>(((i - 1 + j * ell) % k + k) % k)];
    total += term;
  }
  return total;
}

// Every full tuple in [1,k]^m, lexicographic order.
bool naive_all_equal(const std::vector<Gap>& x, const std::vector<Gap>& y, int m, int ell,
                     std::vector<int>* first_diff) {
  const int k = static_cast<int>(x.size());
  std::vector<int> t(static_cast<std::size_t>(m), 1);
  while (true) {
    if (naive_stat(x, t, ell) != naive_stat(y, t, ell)) {
      if (first_diff) *first_diff = t;
      return false;
    }
    int r = m - 1;
    while (r >= 0 && t[static_cast<std::size_t>(r)] == k) t[static_cast<std::size_t>(r--)] = 1;
    if (r < 0) return true;
    ++t[static_cast<std::size_t>(r)];
  }
}

std::vector<Gap> random_seq(std::mt19937_64& gen, int k, int max_v) {
  std::uniform_int_distribution<int> vd(0, max_v);
  std::vector<Gap> v(static_cast<std::size_t>(k));
  for (auto& e : v) e = vd(gen);
  return v;
}

std::vector<int> divisors_of(int k) {
  std::vector<int> d;
  for (int i = 1; i <= k; ++i) {
    if (k % i == 0) d.push_back(i);
  }
  return d;
}

}  // namespace

TEST(StatIndex, ParseAndFormat) {
  const auto idx = StatIndex::parse("1,3;2");
  EXPECT_EQ(idx.indices, (std::vector<int>{1, 3}));
  EXPECT_EQ(idx.modulus, 2);
  EXPECT_EQ(idx.str(), "1,3;2");
  EXPECT_EQ(StatIndex::parse("2").modulus, 1);
  EXPECT_THROW(StatIndex::parse("1,x;2"), Error);
}

TEST(Stat, Examples) {
  EXPECT_EQ(stat(std::vector<Gap>{4, 5, 6}, StatIndex{{1}, 1}), 15);
  EXPECT_EQ(stat(kMatchedX, StatIndex{{1}, 1}), 18);
  EXPECT_EQ(stat(kMatchedX, StatIndex{{1, 1}, 1}), 38);
  EXPECT_EQ(stat(kMatchedY, StatIndex{{1, 1}, 1}), 38);
}

TEST(Stat, Errors) {
  try {
    stat(std::vector<Gap>{1, 2, 3}, StatIndex{{1}, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.name(), "ModulusMismatch");
  }
  try {
    stat(std::vector<Gap>{1, 2, 3}, StatIndex{{4}, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.name(), "InvalidStatIndex");
  }
}

TEST(ShiftedStat, Examples) {
  const std::vector<Gap> x{2, 4};
  const StatIndex idx{{1}, 1};
  EXPECT_DOUBLE_EQ(shifted_stat(x, std::vector<double>{1, 1}, idx), 4.0);
  EXPECT_DOUBLE_EQ(shifted_stat(x, std::vector<double>{2, 4}, StatIndex{{1, 2}, 1}), 0.0);
  EXPECT_DOUBLE_EQ(shifted_stat(kMatchedX, std::vector<double>(12, 0.0), StatIndex{{1, 1, 3}, 1}),
                   static_cast<double>(stat(kMatchedX, StatIndex{{1, 1, 3}, 1})));
  const std::vector<Rational> half(2, Rational(1, 2));
  EXPECT_EQ(shifted_stat(x, half, StatIndex{{1, 2}, 1}), Rational(2 * (3 * 7), 4));
}

TEST(StatsEqual, Examples) {
  EXPECT_TRUE(stats_equal_up_to(kMatchedX, kMatchedX, 6, 1));
  EXPECT_TRUE(stats_equal_up_to(kMatchedX, kMatchedY, 4, 1));
  EXPECT_FALSE(stats_equal_up_to(kMatchedX, kMatchedY, 5, 1));
  EXPECT_FALSE(stats_equal_up_to(kMatchedX, kMatchedY, 6, 1));
  EXPECT_EQ(matched_order(kMatchedX, kMatchedY, 1), 4);
}

TEST(StatsEqual, MatchedPairOrderFiveAgainstFullTupleOracle) {
  EXPECT_TRUE(naive_all_equal(kMatchedX, kMatchedY, 4, 1, nullptr));
  std::vector<int> first;
  EXPECT_FALSE(naive_all_equal(kMatchedX, kMatchedY, 5, 1, &first));
  const auto idx = min_distinguishing_stat(kMatchedX, kMatchedY, 1);
  ASSERT_TRUE(idx.has_value());
  EXPECT_EQ(idx->order(), 5);
  EXPECT_EQ(idx->indices, first);
}

TEST(MinDistinguishingStat, Examples) {
  const auto a = min_distinguishing_stat(std::vector<Gap>{0, 0, 1}, std::vector<Gap>{0, 1, 1}, 1);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->indices, std::vector<int>{1});
  EXPECT_EQ(a->modulus, 1);
  EXPECT_FALSE(min_distinguishing_stat(std::vector<Gap>{1, 2}, std::vector<Gap>{2, 1}, 1));
}

TEST(MinDistinguishingStat, MatchesFullTupleOracle) {
  std::mt19937_64 gen(21);
  for (int t = 0; t < 300; ++t) {
    const int k = 2 + static_cast<int>(gen() % 5);
    const auto x = random_seq(gen, k, 3), y = random_seq(gen, k, 3);
    const auto divs = divisors_of(k);
    const int ell = divs[gen() % divs.size()];
    const auto idx = min_distinguishing_stat(x, y, ell, 3);
    std::optional<std::vector<int>> oracle;
    for (int m = 1; m <= 3 && !oracle; ++m) {
      std::vector<int> first;
      if (!naive_all_equal(x, y, m, ell, &first)) oracle = first;
    }
    ASSERT_EQ(idx.has_value(), oracle.has_value());
    if (idx) {
      ASSERT_EQ(idx->indices, *oracle);
      ASSERT_EQ(idx->modulus, ell);
    }
  }
}

TEST(SymmetryPeriod, Examples) {
  EXPECT_EQ(symmetry_period<Gap>(std::vector<Gap>{5, 5, 5}), 1);
  EXPECT_EQ(symmetry_period<Gap>(std::vector<Gap>{1, 2, 1, 2}), 2);
  EXPECT_EQ(symmetry_period<Gap>(std::vector<Gap>{1, 2, 3}), 3);
  EXPECT_EQ(symmetry_period<Gap>(std::vector<Gap>{1, 2, 1, 3, 1, 2, 1, 3}), 4);
}

TEST(VerifyCharacterization, Examples) {
  EXPECT_TRUE(verify_characterization(2, 2, 6).empty());
  EXPECT_TRUE(verify_characterization(4, 3, 6, 4).empty());
  const auto low = verify_characterization(4, 3, 1);
  EXPECT_FALSE(low.empty());
  const bool has_example = std::any_of(low.begin(), low.end(), [](const CounterexamplePair& p) {
    const GapSequence a(p.x), b(p.y);
    return (cyclically_equal(a, GapSequence{0, 3, 1, 2}) && cyclically_equal(b, GapSequence{0, 3, 2, 1})) ||
           (cyclically_equal(b, GapSequence{0, 3, 1, 2}) && cyclically_equal(a, GapSequence{0, 3, 2, 1}));
  });
  EXPECT_TRUE(has_example);
  EXPECT_EQ(counterexamples_csv({}), "x,y,cap\n");
}

TEST(VerifyCharacterization, ThreadCountDoesNotChangeResult) {
  const auto one = verify_characterization(4, 2, 2, 1);
  const auto many = verify_characterization(4, 2, 2, 5);
  ASSERT_EQ(one.size(), many.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].x, many[i].x);
    EXPECT_EQ(one[i].y, many[i].y);
  }
}

TEST(VerifyCharacterization, LowCapAgreesWithBruteForcePairs) {
  // k = 3 over {0,1,2}, cap 2: every pair of distinct rotation classes with
  // equal order <= 2 statistics, found by the naive oracle.
  std::vector<GapSequence> reps;
  std::vector<Gap> v(3, 0);
  for (int a = 0; a < 27; ++a) {
    v = {a % 3, a / 3 % 3, a / 9};
    if (is_canonical_rotation(v)) reps.emplace_back(v);
  }
  std::size_t expected = 0;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    for (std::size_t j = i + 1; j < reps.size(); ++j) {
      if (naive_all_equal(reps[i].values(), reps[j].values(), 1, 1, nullptr) &&
          naive_all_equal(reps[i].values(), reps[j].values(), 2, 1, nullptr)) {
        ++expected;
      }
    }
  }
  EXPECT_EQ(verify_characterization(3, 2, 2).size(), expected);
}

TEST(CyclicStatsProperty, RotationIndexShiftAndDecomposition) {
  std::mt19937_64 gen(22);
  for (int t = 0; t < 400; ++t) {
    const int k = 1 + static_cast<int>(gen() % 8);
    const auto x = random_seq(gen, k, 9);
    const int m = 1 + static_cast<int>(gen() % 4);
    std::vector<int> idx(static_cast<std::size_t>(m));
    for (auto& i : idx) i = 1 + static_cast<int>(gen() % static_cast<unsigned>(k));

    const BigInt base = stat(x, StatIndex{idx, 1});
    ASSERT_EQ(base, naive_stat(x, idx, 1));
    const long long c = static_cast<long long>(gen() % 20) - 10;
    ASSERT_EQ(stat(cyclic_shift(GapSequence(x), c), StatIndex{idx, 1}), base);

    for (int ell : divisors_of(k)) {
      std::vector<int> moved = idx;
      for (auto& i : moved) i = (i - 1 + ell) % k + 1;
      ASSERT_EQ(stat(x, StatIndex{moved, ell}), stat(x, StatIndex{idx, ell}));
      BigInt sum = 0;
      for (int j = 1; j <= ell; ++j) {
        std::vector<int> s = idx;
        for (auto& i : s) i = (i - 1 + j) % k + 1;
        sum += stat(x, StatIndex{s, ell});
      }
      ASSERT_EQ(sum, base);
    }
  }
}

TEST(CyclicStatsProperty, ShiftCancellationForSymmetricShift) {
  std::mt19937_64 gen(23);
  int checked = 0;
  while (checked < 300) {
    const int k = 2 + static_cast<int>(gen() % 7);
    const auto x = random_seq(gen, k, 5), y = random_seq(gen, k, 5);
    if (cyclically_equal(x, y)) continue;
    const auto divs = divisors_of(k);
    const int ell = divs[gen() % divs.size()];
    std::vector<double> block(static_cast<std::size_t>(ell));
    for (auto& b : block) b = static_cast<double>(gen() % 1000) / 37.0;
    std::vector<double> s(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) s[static_cast<std::size_t>(j)] = block[static_cast<std::size_t>(j % ell)];
    const auto idx = min_distinguishing_stat(x, y, ell);
    ASSERT_TRUE(idx) << "no statistic separates cyclically distinct sequences";
    const double plain = static_cast<double>(stat(x, *idx) - stat(y, *idx));
    const double shifted = shifted_stat(x, s, *idx) - shifted_stat(y, s, *idx);
    ASSERT_GE(std::abs(plain), 1.0);
    ASSERT_NEAR(std::abs(shifted), std::abs(plain), kShiftedStatTolerance * (1 + std::abs(plain)));
    ++checked;
  }
}

TEST(NondecreasingTuples, CountsAndEarlyStop) {
  int count = 0;
  for_each_nondecreasing_tuple(5, 3, 5, [&](std::span<const int>) {
    ++count;
    return true;
  });
  EXPECT_EQ(count, 35);  // C(5+3-1, 3)
  count = 0;
  for_each_nondecreasing_tuple(5, 3, 5, [&](std::span<const int>) { return ++count < 4; });
  EXPECT_EQ(count, 4);
}
