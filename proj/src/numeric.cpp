#include "ctrace/numeric.hpp"

#include <sstream>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "ctrace/error.hpp"

namespace ctrace {

namespace {

BigInt parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty()) {
    throw Error("InvalidNumber", "cannot parse '" + std::string(whole) + "'");
  }
  for (char c : digits) {
    if (c < '0' || c > '9') {
      throw Error("InvalidNumber", "cannot parse '" + std::string(whole) + "'");
    }
  }
  return BigInt(std::string(digits));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  Rational value;
  if (const auto slash = body.find('/'); slash != std::string_view::npos) {
    const BigInt num = parse_integer(body.substr(0, slash), text);
    const BigInt den = parse_integer(body.substr(slash + 1), text);
    if (den == 0) throw Error("InvalidNumber", "zero denominator in '" + std::string(text) + "'");
    value = Rational(num, den);
  } else {
    long long exponent = 0;
    if (const auto e = body.find_first_of("eE"); e != std::string_view::npos) {
      std::string exp_text(body.substr(e + 1));
      try {
        std::size_t used = 0;
        exponent = std::stoll(exp_text, &used);
        if (used != exp_text.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw Error("InvalidNumber", "cannot parse '" + std::string(text) + "'");
      }
      body = body.substr(0, e);
    }
    std::string digits;
    long long scale = 0;
    if (const auto dot = body.find('.'); dot != std::string_view::npos) {
      digits = std::string(body.substr(0, dot)) + std::string(body.substr(dot + 1));
      scale = static_cast<long long>(body.size() - dot - 1);
    } else {
      digits = std::string(body);
    }
    const BigInt num = parse_integer(digits, text);
    const long long power = exponent - scale;
    const BigInt ten_pow = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(power < 0 ? -power : power));
    value = power < 0 ? Rational(num, ten_pow) : Rational(num * ten_pow);
  }
  return negative ? Rational(-value) : value;
}

std::string to_decimal(const Rational& value, int digits) {
  using Dec = boost::multiprecision::cpp_dec_float_50;
  const Dec approx = Dec(boost::multiprecision::numerator(value)) /
                     Dec(boost::multiprecision::denominator(value));
  std::ostringstream os;
  os.precision(digits);
  os << approx;
  return os.str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

BigInt binomial(long long n, long long r) {
  if (r < 0 || n < 0 || r > n) return 0;
  if (r > n - r) r = n - r;
  BigInt out = 1;
  for (long long i = 1; i <= r; ++i) {
    out *= (n - r + i);
    out /= i;
  }
  return out;
}

}  // namespace ctrace
