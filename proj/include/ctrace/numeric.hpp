#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace ctrace {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Parses "3/8", "0.375", "2" or "1e-3" into an exact rational.
Rational parse_rational(std::string_view text);

// Decimal rendering with `digits` significant digits.
std::string to_decimal(const Rational& value, int digits = 17);

double to_double(const Rational& value);

// Exact C(n, r); zero when r < 0 or r > n.
BigInt binomial(long long n, long long r);

}  // namespace ctrace
