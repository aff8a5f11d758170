#include "ctrace/numfourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ctrace/error.hpp"

namespace ctrace {

namespace {

std::int64_t mod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

bool coprime_to_prime(std::int64_t value, std::int64_t p) { return mod(value, p) != 0; }

// Modular inverse of a mod m (gcd(a, m) = 1) via extended Euclid.
std::int64_t inverse(std::int64_t a, std::int64_t m) {
  std::int64_t old_r = mod(a, m), r = m, old_s = 1, s = 0;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    old_r = std::exchange(r, old_r - q * r);
    old_s = std::exchange(s, old_s - q * s);
  }
  return mod(old_s, m);
}

// Per-prime-power summands for j mod p^a. Of the two candidate expressions
// for an odd prime, the one built around j - 1 (or j - 2) is taken first.
std::vector<std::int64_t> prime_power_summands(std::int64_t j, std::int64_t p, std::int64_t pa,
                                               bool triple) {
  if (p == 2) {
    if (triple) return {mod(j - 2, pa), 1 % pa, 1 % pa};
    return {mod(j - 1, pa), 1 % pa};
  }
  if (triple) {
    if (coprime_to_prime(j - 2, p)) return {mod(j - 2, pa), 1 % pa, 1 % pa};
    return {mod(j + 2, pa), pa - 1, pa - 1};
  }
  if (coprime_to_prime(j - 1, p)) return {mod(j - 1, pa), 1 % pa};
  return {mod(j + 1, pa), pa - 1};
}

}  // namespace

const char* to_string(ZeroClass z) {
  switch (z) {
    case ZeroClass::AllZero: return "AllZero";
    case ZeroClass::AllNonzero: return "AllNonzero";
    case ZeroClass::Mixed: return "Mixed";
  }
  return "?";
}

Spectrum dft(std::span<const Gap> x) {
  if (x.empty()) throw Error("InvalidArgument", "dft of an empty sequence");
  const std::size_t k = x.size();
  Spectrum out;
  out.source_length = k;
  out.coeffs.resize(k);
  for (Gap v : x) out.input_l1 += std::abs(static_cast<double>(v));
  for (std::size_t j = 0; j < k; ++j) {
    std::complex<double> acc = 0.0;
    for (std::size_t l = 0; l < k; ++l) {
      // Reduce j*l mod k first so the angle stays in [0, 2*pi).
      const double angle = 2.0 * std::numbers::pi * static_cast<double>((j * l) % k) /
                           static_cast<double>(k);
      acc += static_cast<double>(x[l]) * std::polar(1.0, angle);
    }
    out.coeffs[j] = acc;
  }
  return out;
}

std::vector<std::int64_t> divisors(std::int64_t k) {
  std::vector<std::int64_t> out;
  for (std::int64_t d = 1; d <= k; ++d) {
    if (k % d == 0) out.push_back(d);
  }
  return out;
}

GcdClass gcd_class(std::int64_t k, std::int64_t alpha) {
  if (k < 1 || alpha < 1 || k % alpha != 0) {
    throw Error("NotADivisor", std::to_string(alpha) + " does not divide " + std::to_string(k));
  }
  GcdClass out{alpha, {}};
  for (std::int64_t j = 1; j <= k; ++j) {
    if (std::gcd(j, k) == alpha) out.members.push_back(j);
  }
  return out;
}

double default_zero_tolerance(const Spectrum& spec) { return 1e-6 * (1.0 + spec.input_l1); }

std::map<std::int64_t, ZeroClass> zero_pattern(const Spectrum& spec, double tol) {
  const auto k = static_cast<std::int64_t>(spec.source_length);
  std::map<std::int64_t, ZeroClass> out;
  for (std::int64_t alpha : divisors(k)) {
    bool any_zero = false, any_nonzero = false;
    for (std::int64_t j : gcd_class(k, alpha).members) {
      (std::abs(spec.at(static_cast<std::size_t>(j))) < tol ? any_zero : any_nonzero) = true;
    }
    out[alpha] = any_zero && any_nonzero ? ZeroClass::Mixed
                 : any_zero              ? ZeroClass::AllZero
                                         : ZeroClass::AllNonzero;
  }
  return out;
}

bool product_identity_check(std::span<const Gap> x, std::span<const Gap> y, int m, double tol) {
  if (x.size() != y.size() || x.empty()) throw Error("LengthMismatch", "x and y differ in length");
  if (m < 1) throw Error("InvalidArgument", "order must be >= 1");
  const Spectrum sx = dft(x), sy = dft(y);
  const std::size_t k = x.size();
  std::vector<std::size_t> t(static_cast<std::size_t>(m - 1), 0);
  while (true) {
    std::size_t partial = 0;
    std::complex<double> px = 1.0, py = 1.0;
    for (std::size_t i : t) {
      partial += i;
      px *= sx.coeffs[i];
      py *= sy.coeffs[i];
    }
    const std::size_t last = (k - partial % k) % k;
    px *= sx.coeffs[last];
    py *= sy.coeffs[last];
    const double scale = std::max({1.0, std::abs(px), std::abs(py)});
    if (std::abs(px - py) > tol * scale) return false;

    std::size_t r = 0;
    while (r < t.size() && t[r] == k - 1) t[r++] = 0;
    if (r == t.size()) break;
    ++t[r];
  }
  return true;
}

std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n) {
  std::vector<std::pair<std::int64_t, int>> out;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

std::int64_t crt(std::span<const std::int64_t> residues, std::span<const std::int64_t> moduli) {
  std::int64_t result = 0, modulus = 1;
  for (std::size_t i = 0; i < residues.size(); ++i) {
    const std::int64_t m = moduli[i];
    // result + modulus * t = residues[i] (mod m)
    const std::int64_t t = mod((residues[i] - result) % m * inverse(modulus % m, m), m);
    result += modulus * t;
    modulus *= m;
    result = mod(result, modulus);
  }
  return result;
}

std::vector<std::int64_t> coprime_sum_repr(std::int64_t d, std::int64_t j) {
  if (d < 1) throw Error("InvalidArgument", "modulus must be >= 1");
  j = mod(j, d);
  const bool triple = d % 2 == 0 && j % 2 == 1;
  const std::size_t parts = triple ? 3 : 2;
  if (d == 1) return std::vector<std::int64_t>(parts, 1);

  std::vector<std::int64_t> moduli;
  std::vector<std::vector<std::int64_t>> per_part(parts);
  for (const auto& [p, a] : factorize(d)) {
    std::int64_t pa = 1;
    for (int e = 0; e < a; ++e) pa *= p;
    moduli.push_back(pa);
    const auto summands = prime_power_summands(mod(j, pa), p, pa, triple);
    for (std::size_t r = 0; r < parts; ++r) per_part[r].push_back(summands[r]);
  }
  std::vector<std::int64_t> out;
  for (const auto& residues : per_part) {
    const std::int64_t b = crt(residues, moduli);
    out.push_back(b == 0 ? d : b);
  }
  return out;
}

int p_adic_valuation(std::int64_t a, std::int64_t p) {
  if (a < 1 || p < 2) throw Error("InvalidArgument", "p-adic valuation needs a >= 1 and prime p");
  int v = 0;
  while (a % p == 0) {
    a /= p;
    ++v;
  }
  return v;
}

std::optional<std::int64_t> consistent_shift_constant(
    std::int64_t k, const std::map<std::int64_t, std::int64_t>& assignments) {
  if (k < 1) throw Error("InvalidArgument", "k must be >= 1");
  for (std::int64_t c = 0; c < k; ++c) {
    const bool ok = std::all_of(assignments.begin(), assignments.end(), [&](const auto& entry) {
      return mod((c - entry.second) % k * (entry.first % k), k) == 0;
    });
    if (ok) return c;
  }
  return std::nullopt;
}

}  // namespace ctrace
