#include <doctest.h>

#include "core/diophantine.hpp"
#include "core/error.hpp"
#include "core/orbit.hpp"

#include <cmath>
#include <random>

using namespace quasispec;

TEST_CASE("orbit points agree with direct rational evaluation") {
  auto fm = cf_expand(RealInterval::parse("golden", 256), 30);
  Rational theta(12345, 65536);
  Orbit orbit(fm, theta, 20);
  Rational alpha = fm.convergent_value(20);
  for (std::int64_t j : {0, 1, -1, 7, 1000, -12345, 6765}) {
    Rational direct = frac(theta + Rational(BigInt(j)) * alpha);
    CHECK(orbit.point(j) == doctest::Approx(to_double(direct)).epsilon(1e-15));
  }
}

TEST_CASE("cursor walks match random access") {
  auto fm = liouville_frequency(1.0, 4, 1u << 22);
  Orbit orbit(fm, Rational(3, 7), 3);
  auto cur = orbit.cursor(-50);
  for (int k = 0; k < 200; ++k) {
    CHECK(cur.index() == -50 + k);
    CHECK(cur.value() == orbit.point(cur.index()));
    CHECK(cur.torus_distance() == doctest::Approx(torus_norm(orbit.point(cur.index()))));
    cur.advance();
  }
  for (int k = 0; k < 300; ++k) cur.retreat();
  CHECK(cur.index() == -150);
  CHECK(cur.value() == orbit.point(-150));
}

TEST_CASE("nearer_to_integer_than is exact") {
  auto fm = cf_expand(RealInterval::parse("golden", 256), 25);
  Orbit orbit(fm, Rational(0), 20);
  auto a = orbit.cursor(fm.q(10).convert_to<std::int64_t>());
  auto b = orbit.cursor(fm.q(9).convert_to<std::int64_t>());
  CHECK(a.nearer_to_integer_than(b));
  CHECK_FALSE(b.nearer_to_integer_than(a));
  CHECK_FALSE(a.nearer_to_integer_than(a));
}

TEST_CASE("certified orbit and error bound") {
  auto fm = cf_expand(RealInterval::parse("golden", 256), 60);
  auto orbit = Orbit::certified(fm, Rational(1, 3), 1000);
  CHECK(fm.q(orbit.convergent_index()) >= 1000);
  CHECK(orbit.error_bound(0) == 0.0);
  CHECK(orbit.error_bound(1000) < std::ldexp(1.0, -62));

  auto shallow = FrequencyModel::from_coefficients({BigInt(2), BigInt(3)});
  CHECK_THROWS_AS(Orbit::certified(shallow, Rational(0), 100), Error);
}

TEST_CASE("signed shift has alternating sign and the sandwich size") {
  auto fm = cf_expand(RealInterval::parse("sqrt2-1", 256), 40);
  Orbit orbit(fm, Rational(0), 40);
  for (std::size_t n = 1; n < 30; ++n) {
    double s = orbit.signed_shift(n);
    CHECK((s > 0) == (n % 2 == 0));
    double qn1 = std::exp(fm.log_q(n + 1));
    CHECK(std::abs(s) <= 1.0 / qn1 * (1 + 1e-12));
    CHECK(std::abs(s) >= 0.5 / qn1 * (1 - 1e-12));
  }
}

TEST_CASE("large modulus path") {
  auto fm = liouville_frequency(2.0, 4, 1u << 22);  // q_3 ~ 1.2e6, q_4 astronomically large
  std::mt19937_64 rng(7);
  Rational theta(BigInt(rng() >> 11), BigInt(1) << 53);
  Orbit orbit(fm, theta, 4);
  CHECK(bit_length(orbit.modulus()) > 128);
  auto cur = orbit.cursor(0);
  for (int k = 0; k < 50; ++k) {
    CHECK(cur.value() == orbit.point(k));
    cur.advance();
  }
}
