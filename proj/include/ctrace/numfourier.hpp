#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ctrace/gapseq.hpp"

namespace ctrace {

// coeffs[j] = sum_{l=0}^{k-1} x_l exp(2*pi*i*j*l/k), j = 0..k-1.
struct Spectrum {
  std::vector<std::complex<double>> coeffs;
  std::size_t source_length = 0;
  // L1 norm of the input; scales the "is zero" tolerance.
  double input_l1 = 0.0;

  // Coefficient for j in [1, k]; j = k addresses coeffs[0].
  std::complex<double> at(std::size_t j) const { return coeffs[j % source_length]; }
};

struct GcdClass {
  std::int64_t alpha = 0;
  std::vector<std::int64_t> members;  // j in [1, k] with gcd(j, k) = alpha
};

enum class ZeroClass { AllZero, AllNonzero, Mixed };
const char* to_string(ZeroClass z);

Spectrum dft(std::span<const Gap> x);

std::vector<std::int64_t> divisors(std::int64_t k);

// Throws Error("NotADivisor").
GcdClass gcd_class(std::int64_t k, std::int64_t alpha);

std::map<std::int64_t, ZeroClass> zero_pattern(const Spectrum& spec, double tol);
// 1e-6 * (1 + sum |x_l|).
double default_zero_tolerance(const Spectrum& spec);

// For every m-tuple with i_1 + ... + i_m = 0 mod k, compares the m-way
// products of Fourier coefficients of x and y (relative tolerance above
// magnitude 1, absolute below).
bool product_identity_check(std::span<const Gap> x, std::span<const Gap> y, int m, double tol);

// Residues in [1, d], each coprime to d, summing to j mod d: three of them
// when d is even and j odd, two otherwise. Assembled per prime power and
// combined by CRT.
std::vector<std::int64_t> coprime_sum_repr(std::int64_t d, std::int64_t j);

int p_adic_valuation(std::int64_t a, std::int64_t p);

// Some c in [0, k) with (c - c_alpha) * alpha = 0 mod k for every entry.
std::optional<std::int64_t> consistent_shift_constant(
    std::int64_t k, const std::map<std::int64_t, std::int64_t>& assignments);

// Prime factorization as (prime, exponent) pairs, ascending.
std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n);

// Solves r = residues[i] mod moduli[i] for pairwise coprime moduli.
std::int64_t crt(std::span<const std::int64_t> residues, std::span<const std::int64_t> moduli);

}  // namespace ctrace
