#include "core/bigint.hpp"

#include "core/error.hpp"

#include <cmath>
#include <limits>

namespace quasispec {

double log_abs(const BigInt& x) {
  if (x == 0) return -std::numeric_limits<double>::infinity();
  long exponent = 0;
  const double mantissa = mpz_get_d_2exp(&exponent, x.backend().data());
  return std::log(std::fabs(mantissa)) + static_cast<double>(exponent) * std::log(2.0);
}

std::size_t bit_length(const BigInt& x) {
  if (x == 0) return 0;
  return mpz_sizeinbase(x.backend().data(), 2);
}

double ratio_to_double(const BigInt& num, const BigInt& den) {
  if (num == 0) return 0.0;
  long en = 0;
  long ed = 0;
  const double mn = mpz_get_d_2exp(&en, num.backend().data());
  const double md = mpz_get_d_2exp(&ed, den.backend().data());
  return std::ldexp(mn / md, static_cast<int>(en - ed));
}

double to_double(const Rational& x) {
  return ratio_to_double(numerator(x), denominator(x));
}

Rational exact_rational(double x) {
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::invalid_argument, "non-finite value has no rational form");
  }
  Rational r;
  mpq_set_d(r.backend().data(), x);
  return r;
}

BigInt floor_of(const Rational& x) {
  BigInt q;
  mpz_fdiv_q(q.backend().data(), mpq_numref(x.backend().data()),
             mpq_denref(x.backend().data()));
  return q;
}

Rational frac(const Rational& x) { return x - Rational(floor_of(x)); }

Rational torus_norm(const Rational& x) {
  Rational f = frac(x);
  Rational g = Rational(1) - f;
  return f < g ? f : g;
}

BigInt isqrt(const BigInt& x) {
  if (x < 0) throw Error(ErrorCode::invalid_argument, "isqrt of negative value");
  BigInt r;
  mpz_sqrt(r.backend().data(), x.backend().data());
  return r;
}

BigInt parse_bigint(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw Error(ErrorCode::invalid_argument, "empty integer literal");
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (!(c >= '0' && c <= '9') && !(i == 0 && (c == '-' || c == '+'))) {
      throw Error(ErrorCode::invalid_argument, "malformed integer literal: " + s);
    }
  }
  if (s[0] == '+') s.erase(0, 1);
  if (s.empty() || s == "-") throw Error(ErrorCode::invalid_argument, "malformed integer literal: " + std::string(text));
  BigInt out;
  // explicit base 10: a leading zero would otherwise select octal
  if (mpz_set_str(out.backend().data(), s.c_str(), 10) != 0) {
    throw Error(ErrorCode::invalid_argument, "malformed integer literal: " + s);
  }
  return out;
}

std::string to_decimal(const BigInt& x) { return x.str(); }

}  // namespace quasispec
