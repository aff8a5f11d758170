#include "ctrace/cyclicstats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "ctrace/error.hpp"

namespace ctrace {

namespace {

std::size_t wrap(long long i, std::size_t k) {
  const auto kk = static_cast<long long>(k);
  return static_cast<std::size_t>(((i % kk) + kk) % kk);
}

// Position (0-based) of x_{i + j*ell} for 1-based i.
std::size_t position(int i, std::size_t j, int ell, std::size_t k) {
  return wrap(static_cast<long long>(i) - 1 + static_cast<long long>(j) * ell, k);
}

template <class T, class Value>
T evaluate(std::span<const Gap> x, std::span<const int> indices, int ell, Value&& value_at) {
  const std::size_t k = x.size();
  const std::size_t blocks = k / static_cast<std::size_t>(ell);
  T total = 0;
  for (std::size_t j = 1; j <= blocks; ++j) {
    T term = 1;
    for (int i : indices) term *= value_at(position(i, j, ell, k));
    total += term;
  }
  return total;
}

void check_lengths(std::span<const Gap> x, std::span<const Gap> y) {
  if (x.size() != y.size() || x.empty()) {
    throw Error("LengthMismatch", "sequences must have equal nonzero length");
  }
}

void check_modulus(int ell, std::size_t k) {
  if (ell < 1 || k % static_cast<std::size_t>(ell) != 0) {
    throw Error("ModulusMismatch",
                "modulus " + std::to_string(ell) + " does not divide k = " + std::to_string(k));
  }
}

// Does any statistic of exactly order m (mod ell) differ?  Returns the
// lexicographically first differing nondecreasing tuple when `first` is set.
bool order_differs(std::span<const Gap> x, std::span<const Gap> y, int m, int ell,
                   int first_max, std::vector<int>* first) {
  bool differs = false;
  const int k = static_cast<int>(x.size());
  for_each_nondecreasing_tuple(k, m, first_max, [&](std::span<const int> t) {
    const BigInt sx = evaluate<BigInt>(x, t, ell, [&](std::size_t p) { return BigInt(x[p]); });
    const BigInt sy = evaluate<BigInt>(y, t, ell, [&](std::size_t p) { return BigInt(y[p]); });
    if (sx != sy) {
      differs = true;
      if (first) first->assign(t.begin(), t.end());
      return false;
    }
    return true;
  });
  return differs;
}

}  // namespace

StatIndex StatIndex::parse(std::string_view text) {
  StatIndex idx;
  std::string_view tuple = text;
  if (const auto semi = text.find(';'); semi != std::string_view::npos) {
    tuple = text.substr(0, semi);
    const auto mod = text.substr(semi + 1);
    const auto [end, ec] = std::from_chars(mod.data(), mod.data() + mod.size(), idx.modulus);
    if (ec != std::errc{} || end != mod.data() + mod.size()) {
      throw Error("InvalidStatIndex", "cannot parse modulus in '" + std::string(text) + "'");
    }
  }
  std::size_t pos = 0;
  while (pos <= tuple.size()) {
    const auto comma = tuple.find(',', pos);
    const auto token = tuple.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                                         : comma - pos);
    int value = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc{} || end != token.data() + token.size()) {
      throw Error("InvalidStatIndex", "cannot parse '" + std::string(text) + "'");
    }
    idx.indices.push_back(value);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return idx;
}

std::string StatIndex::str() const {
  std::string out;
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (r) out.push_back(',');
    out += std::to_string(indices[r]);
  }
  return out + ";" + std::to_string(modulus);
}

void validate(const StatIndex& idx, std::size_t k) {
  check_modulus(idx.modulus, k);
  if (idx.indices.empty()) throw Error("InvalidStatIndex", "statistic order must be >= 1");
  for (int i : idx.indices) {
    if (i < 1 || static_cast<std::size_t>(i) > k) {
      throw Error("InvalidStatIndex",
                  "index " + std::to_string(i) + " outside [1, " + std::to_string(k) + "]");
    }
  }
}

BigInt stat(std::span<const Gap> x, const StatIndex& idx) {
  validate(idx, x.size());
  return evaluate<BigInt>(x, idx.indices, idx.modulus,
                          [&](std::size_t p) { return BigInt(x[p]); });
}

double shifted_stat(std::span<const Gap> x, std::span<const double> s, const StatIndex& idx) {
  validate(idx, x.size());
  if (s.size() != x.size()) throw Error("LengthMismatch", "shift length differs from k");
  return evaluate<double>(x, idx.indices, idx.modulus, [&](std::size_t p) {
    return static_cast<double>(x[p]) - s[p];
  });
}

Rational shifted_stat(std::span<const Gap> x, std::span<const Rational> s, const StatIndex& idx) {
  validate(idx, x.size());
  if (s.size() != x.size()) throw Error("LengthMismatch", "shift length differs from k");
  return evaluate<Rational>(x, idx.indices, idx.modulus,
                            [&](std::size_t p) { return Rational(x[p]) - s[p]; });
}

void for_each_nondecreasing_tuple(int k, int m, int first_max,
                                  const std::function<bool(std::span<const int>)>& fn) {
  if (m < 1 || k < 1) return;
  std::vector<int> t(static_cast<std::size_t>(m), 1);
  while (true) {
    if (!fn(t)) return;
    // Advance to the next nondecreasing tuple in lexicographic order.
    int r = m - 1;
    while (r >= 0 && t[static_cast<std::size_t>(r)] == k) --r;
    if (r < 0) return;
    if (r == 0 && t[0] >= first_max) return;
    const int next = t[static_cast<std::size_t>(r)] + 1;
    for (int s = r; s < m; ++s) t[static_cast<std::size_t>(s)] = next;
  }
}

bool stats_equal_up_to(std::span<const Gap> x, std::span<const Gap> y, int m_max, int ell) {
  check_lengths(x, y);
  check_modulus(ell, x.size());
  // Statistics are symmetric in their factors and invariant under shifting
  // every index by ell, so nondecreasing tuples starting in [1, ell] suffice.
  for (int m = 1; m <= m_max; ++m) {
    if (order_differs(x, y, m, ell, ell, nullptr)) return false;
  }
  return true;
}

int matched_order(std::span<const Gap> x, std::span<const Gap> y, int ell, int cap) {
  check_lengths(x, y);
  check_modulus(ell, x.size());
  for (int m = 1; m <= cap; ++m) {
    if (order_differs(x, y, m, ell, ell, nullptr)) return m - 1;
  }
  return cap;
}

std::optional<StatIndex> min_distinguishing_stat(std::span<const Gap> x, std::span<const Gap> y,
                                                 int ell, int cap) {
  check_lengths(x, y);
  check_modulus(ell, x.size());
  const int k = static_cast<int>(x.size());
  for (int m = 1; m <= cap; ++m) {
    // Sorting a full tuple never increases it lexicographically, so the first
    // differing nondecreasing tuple is the first differing full tuple.
    std::vector<int> first;
    if (order_differs(x, y, m, ell, k, &first)) return StatIndex{std::move(first), ell};
  }
  return std::nullopt;
}

namespace detail {

std::int64_t stat_i64(std::span<const Gap> x, std::span<const int> indices, int ell) {
  return evaluate<std::int64_t>(x, indices, ell, [&](std::size_t p) { return x[p]; });
}

}  // namespace detail

namespace {

using Signature = std::vector<std::string>;

// Enumerates canonical rotation representatives of {0..max_value}^k.
std::vector<std::vector<Gap>> canonical_sequences(int k, int max_value) {
  std::vector<std::vector<Gap>> out;
  std::vector<Gap> v(static_cast<std::size_t>(k), 0);
  while (true) {
    if (is_canonical_rotation(v)) out.push_back(v);
    int r = k - 1;
    while (r >= 0 && v[static_cast<std::size_t>(r)] == max_value) {
      v[static_cast<std::size_t>(r)] = 0;
      --r;
    }
    if (r < 0) break;
    ++v[static_cast<std::size_t>(r)];
  }
  return out;
}

std::vector<BigInt> signature(std::span<const Gap> x, int cap) {
  std::vector<BigInt> sig;
  const int k = static_cast<int>(x.size());
  for (int m = 1; m <= cap; ++m) {
    for_each_nondecreasing_tuple(k, m, 1, [&](std::span<const int> t) {
      sig.push_back(evaluate<BigInt>(x, t, 1, [&](std::size_t p) { return BigInt(x[p]); }));
      return true;
    });
  }
  return sig;
}

}  // namespace

std::vector<CounterexamplePair> verify_characterization(int k, int max_value, int cap,
                                                        int threads) {
  if (k < 1 || max_value < 0 || cap < 1) {
    throw Error("InvalidArgument", "verify_characterization needs k >= 1, max_value >= 0, cap >= 1");
  }
  const auto seqs = canonical_sequences(k, max_value);
  std::vector<std::vector<BigInt>> sigs(seqs.size());
  const int workers = std::max(1, threads);
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = static_cast<std::size_t>(w); i < seqs.size();
             i += static_cast<std::size_t>(workers)) {
          sigs[i] = signature(seqs[i], cap);
        }
      });
    }
  }
  std::map<std::vector<BigInt>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < seqs.size(); ++i) groups[sigs[i]].push_back(i);

  std::vector<CounterexamplePair> out;
  for (const auto& [sig, members] : groups) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        out.push_back({seqs[members[a]], seqs[members[b]], cap});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    return std::tie(l.x, l.y) < std::tie(r.x, r.y);
  });
  return out;
}

std::string counterexamples_csv(const std::vector<CounterexamplePair>& pairs) {
  std::ostringstream os;
  os << "x,y,cap\n";
  for (const auto& p : pairs) {
    os << '"' << format_gaps(p.x) << "\",\"" << format_gaps(p.y) << "\"," << p.cap << '\n';
  }
  return os.str();
}

}  // namespace ctrace
