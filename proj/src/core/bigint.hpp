#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>

namespace quasispec {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

/// Natural log of |x| from bit length and the top mantissa bits; relative
/// error below 2^-50 for any size. Returns -inf for zero.
double log_abs(const BigInt& x);

std::size_t bit_length(const BigInt& x);

/// num/den as a double for 0 <= num < den of arbitrary size.
double ratio_to_double(const BigInt& num, const BigInt& den);

double to_double(const Rational& x);

/// Exact value of a finite double.
Rational exact_rational(double x);

/// Fractional part in [0, 1).
Rational frac(const Rational& x);

/// Exact distance to the nearest integer, in [0, 1/2].
Rational torus_norm(const Rational& x);

BigInt floor_of(const Rational& x);

BigInt isqrt(const BigInt& x);

BigInt parse_bigint(std::string_view text);

std::string to_decimal(const BigInt& x);

}  // namespace quasispec
