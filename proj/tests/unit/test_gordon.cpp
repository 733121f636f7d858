#include <doctest.h>

#include "core/cocycle.hpp"
#include "core/error.hpp"
#include "core/experiment.hpp"
#include "core/gordon.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace quasispec;

namespace {

FrequencyModel golden(std::size_t depth = 40) { return cf_expand(RealInterval::parse("golden", 256), depth); }

PotentialSpec single_zero(double theta1, double tau) {
  PotentialSpec s;
  s.name = "single-zero";
  s.factors = {{theta1, tau}};
  s.smooth = catalog_function("one");
  s.g = catalog_function("one");
  return s;
}

// Brute-force argmin of ||theta - theta1 + j p/q|| over 0 <= j < q_n with exact rationals.
std::pair<long, Rational> brute_closest(const Rational& shift, const Rational& alpha, long qn) {
  long best = 0;
  Rational best_d = torus_norm(shift);
  for (long j = 1; j < qn; ++j) {
    Rational d = torus_norm(shift + Rational(BigInt(j)) * alpha);
    if (d < best_d) { best_d = d; best = j; }
  }
  return {best, best_d};
}

}  // namespace

TEST_CASE("delta index reduces to the single-zero index") {
  auto fm = golden(30);
  auto spec = single_zero(0.0, 1.0);
  Rational theta(1, 4);
  auto d = delta_index(fm, theta, spec, 20, 0.05);
  REQUIRE(d.per_n.size() == 20);
  for (auto [n, value] : d.per_n) {
    // ln||q_n theta|| + ln q_{n+1}, over q_n
    Rational x = torus_norm(Rational(fm.q(n)) * theta);
    if (x == 0) {
      CHECK(std::isinf(value));
      continue;
    }
    double expect = (std::log(to_double(x)) + fm.log_q(n + 1)) / std::exp(fm.log_q(n));
    CHECK(value == doctest::Approx(expect).epsilon(1e-13));
  }
  // positive at finite depth, of order ln q_n / q_n
  auto last = d.per_n.back().second;
  CHECK(std::fabs(last) < 1e-3);
  CHECK_FALSE(d.selected_subsequence.empty());
  for (auto n : d.selected_subsequence) CHECK(*d.value_at(n) > d.running_sup_tail - d.eps / 4);
}

TEST_CASE("delta index degenerate and tube cases") {
  auto fm = golden(20);
  auto spec = single_zero(0.0, 1.0);
  // theta = 1/2: q_n theta is an integer whenever q_n is even
  auto d = delta_index(fm, Rational(1, 2), spec, 10, 0.05);
  CHECK_FALSE(d.degenerate.empty());
  for (auto n : d.degenerate) {
    CHECK(fm.q(n) % 2 == 0);
    CHECK(std::isinf(*d.value_at(n)));
  }
  CHECK_THROWS_AS(delta_index(fm, Rational(0), spec, 10, 0.05), Error);
  CHECK_THROWS_AS(delta_index(fm, Rational(1, 3), spec, 20, 0.05), Error);
  try {
    delta_index(fm, Rational(0), spec, 10, 0.05);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::theta_in_singular_tube);
  }
}

TEST_CASE("delta tracks tau_min beta for a Liouville frequency") {
  auto fm = liouville_frequency(1.0, 5, 1u << 22);
  auto spec = builtin_spec("maryland-like");
  auto top = deepest_honest_scale(fm);
  int within = 0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    auto d = delta_index(fm, random_theta(s), spec, top, 0.05, std::size_t{top});
    auto b = beta_estimate(fm, top, top);
    if (std::fabs(d.running_sup_tail - b.running_sup_tail) <= 0.15 * b.running_sup_tail) ++within;
  }
  CHECK(within >= 7);
}

TEST_CASE("closest returns agree with a brute-force scan") {
  auto fm = golden(30);
  Rational alpha = fm.convergent_value(30);

  auto on = closest_returns(fm, Rational(1, 2), builtin_spec("maryland-like"), 6);
  REQUIRE(on.size() == 1);
  CHECK(on[0].j == 0);
  CHECK(on[0].sin_value == 0.0);

  // theta - theta1 = alpha, q_n = 5
  auto spec = single_zero(0.0, 1.0);
  auto r = closest_returns(fm, alpha, spec, 4);
  REQUIRE(fm.q(4) == 5);
  auto [bj, bd] = brute_closest(alpha, alpha, 5);
  CHECK(r[0].j == bj);
  CHECK(r[0].distance == doctest::Approx(to_double(bd)));

  PotentialSpec two;
  two.factors = {{0.1, 1.0}, {0.7, 0.5}};
  two.smooth = catalog_function("one");
  two.g = catalog_function("one");
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    Rational th = random_theta(rng());
    for (std::size_t n : {8u, 12u, 15u}) {
      auto cr = closest_returns(fm, th, two, n);
      REQUIRE(cr.size() == 2);
      long qn = fm.q(n).convert_to<long>();
      for (int l = 0; l < 2; ++l) {
        Rational shift = th - exact_rational(two.factors[l].theta);
        auto [j, dist] = brute_closest(shift, alpha, qn);
        CHECK(cr[l].j == j);
        CHECK(cr[l].distance == doctest::Approx(to_double(dist)).epsilon(1e-12));
        CHECK(cr[l].sin_value == doctest::Approx(std::sin(std::numbers::pi * to_double(dist))).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("AJ09 diagnostic on golden scales") {
  auto fm = golden(40);
  for (std::size_t n = 1; n <= 12; ++n) {
    auto a = aj09_diagnostic(fm, Rational(1, 4), n);
    CHECK(a.C_hat <= 10.0);
    // direct sum over the orbit
    long qn = fm.q(n).convert_to<long>();
    if (qn > 1) {
      Orbit orbit(fm, Rational(1, 4), 30);
      double sum = 0;
      for (long j = 0; j < qn; ++j) {
        if (j == a.j0) continue;
        sum += std::log(std::fabs(std::sin(std::numbers::pi * orbit.point(j))));
      }
      sum += (qn - 1) * std::log(2.0);
      CHECK(a.sum == doctest::Approx(sum).epsilon(1e-7).scale(1.0));
    }
  }
}

TEST_CASE("key inequalities") {
  auto fm = liouville_frequency(1.0, 5, 1u << 22);
  auto spec = normalize_pair(builtin_spec("maryland-like"));
  auto top = deepest_honest_scale(fm);
  int passes = 0, runs = 0;
  for (std::uint64_t s = 1; s <= 6; ++s) {
    Rational th = random_theta(s);
    auto d = delta_index(fm, th, spec, top, 0.05, std::size_t{1});
    for (auto n : d.selected_subsequence) {
      auto k = key_inequalities(fm, th, spec, n, 0.05, d);
      CHECK(k.applicable);
      CHECK(k.in_subsequence);
      ++runs;
      if (k.pass_jy1) {
        ++passes;
        CHECK(k.margin_jy1 > 0);
      }
      CHECK(k.jy1_rhs <= k.key1_rhs);
    }
  }
  CHECK(runs > 0);
  CHECK(passes * 2 >= runs);

  auto g = golden(40);
  auto dg = delta_index(g, Rational(1, 4), spec, 30, 0.05);
  auto kg = key_inequalities(g, Rational(1, 4), spec, dg.selected_subsequence.front(), 0.05, dg);
  CHECK_FALSE(kg.applicable);

  CHECK_THROWS_AS(key_inequalities(g, Rational(1, 4), spec, 3, 0.05, DeltaEstimate{}), Error);
}

TEST_CASE("repetition defect") {
  auto free = builtin_spec("free");
  auto fm = golden(30);
  auto rf = repetition_defect(free, 1.0, fm, 10, 1024);
  CHECK(rf.defect_F == 0.0);
  CHECK(rf.defect_f == 0.0);

  auto md = builtin_spec("maryland-like");
  auto r = repetition_defect(md, 1.0, fm, 10, 1024);
  CHECK(std::exp(fm.log_q(10)) == doctest::Approx(89));
  // direct grid oracle for the f defect: |f(x + s) - f(x)| <= pi |s| for |sin|
  double s = std::fabs(r.shift);
  double direct = 0;
  for (int i = 0; i < 1024; ++i) {
    double x = i / 1024.0;
    direct = std::max(direct, std::fabs(md.f(x + r.shift) - md.f(x)));
  }
  CHECK(r.defect_f >= direct * (1 - 1e-12));
  CHECK(r.defect_f <= std::numbers::pi * s * (1 + 1e-9));
  CHECK(r.within_prediction);

  // defect(n+1)/defect(n) tracks (q_{n+1}/q_{n+2})^tau0 within a factor 10
  for (std::size_t n = 8; n < 13; ++n) {
    auto a = repetition_defect(md, 1.0, fm, n, 1024);
    auto b = repetition_defect(md, 1.0, fm, n + 1, 1024);
    double ratio = b.defect_F / a.defect_F;
    double model = std::exp(fm.log_q(n + 1) - fm.log_q(n + 2));
    CHECK(ratio / model < 10.0);
    CHECK(model / ratio < 10.0);
  }
}

TEST_CASE("gordon check on the free elliptic case") {
  auto fm = golden(30);
  auto r = gordon_check(builtin_spec("free"), 0.0, fm, Rational(1, 7), 6, 0.05, 0.0);
  CHECK(r.conclusion_max >= 1.0 / std::sqrt(2.0));
  CHECK(r.pass.conclusion);
  CHECK(r.pass.implication);
  CHECK(r.conclusion_max >= r.conclusion_floor);
  // the free cocycle repeats exactly
  CHECK(r.hyp_A1_log == -INFINITY);
  CHECK(r.pass.A1);
  CHECK_THROWS_AS(gordon_check(builtin_spec("free"), 0.0, fm, Rational(1, 7), 6, 0.05, std::nullopt), Error);
  CHECK_THROWS_AS(gordon_check(builtin_spec("free"), 0.0, fm, Rational(1, 7), 6, 0.05, 0.0, Vec2{2.0, 0.0}), Error);
}

TEST_CASE("gordon hypotheses hold for a Liouville frequency at weak coupling") {
  auto fm = liouville_frequency(2.0, 5, 1u << 22);
  auto raw = builtin_spec("maryland-like", 0.25);
  auto spec = normalize_pair(raw);
  double L = lyapunov(spec, 0.0, 20000, fm, LyapunovMethod::phase_average, 16).value;
  auto r = gordon_check(raw, 0.0, fm, random_theta(1), 1, 0.05, L);
  CHECK(r.qn == 7);
  CHECK(L + 0.2 < r.delta_n);
  CHECK(r.pass.A1);
  CHECK(r.pass.A2);
  CHECK(r.pass.hypotheses);
  CHECK(r.c > 0);
  CHECK(r.conclusion_max >= 0.25);
  CHECK(r.pass.implication);
}

TEST_CASE("implication holds regardless of hypothesis outcome") {
  auto fm = liouville_frequency(2.0, 5, 1u << 22);
  std::mt19937_64 rng(23);
  for (int i = 0; i < 12; ++i) {
    double lam = i % 2 ? 1.0 : 0.25;
    auto raw = builtin_spec("maryland-like", lam);
    double E = std::uniform_real_distribution<double>(-2.5, 2.5)(rng);
    double ang = std::uniform_real_distribution<double>(0, std::numbers::pi)(rng);
    auto r = gordon_check(raw, E, fm, random_theta(rng()), 1, 0.05, 0.3, Vec2{std::cos(ang), std::sin(ang)});
    CHECK(r.pass.implication);
    CHECK(r.conclusion_max > 0);
    CHECK(r.conclusion_max >= r.conclusion_floor - 1e-12);
  }
}
