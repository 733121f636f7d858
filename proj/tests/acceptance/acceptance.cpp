// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "core/cocycle.hpp"
#include "core/diophantine.hpp"
#include "core/error.hpp"
#include "core/experiment.hpp"
#include "core/gordon.hpp"
#include "core/potential.hpp"
#include "core/spectral.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace quasispec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Rational rand_theta(std::mt19937_64& rng) { return Rational(BigInt(rng() >> 11), BigInt(1) << 53); }

FrequencyModel golden(std::size_t depth) { return cf_expand(RealInterval::parse("golden", 512), depth); }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// 1. recurrence, determinant and exhaustive best approximation
Outcome diophantine_exactness() {
  const auto t0 = Clock::now();
  long checked_k = 0;
  int bad = 0;
  for (const char* name : {"golden", "sqrt2-1"}) {
    const RealInterval x = RealInterval::parse(name, 512);
    const FrequencyModel fm = cf_expand(x, 40);
    if (fm.depth() != 40) return {false, std::string(name) + " did not reach depth 40"};
    for (std::size_t n = 1; n <= 40; ++n) {
      const BigInt& a = fm.coefficients()[n - 1];
      const BigInt pm = n >= 2 ? fm.p(n - 2) : BigInt(1);
      const BigInt qm = n >= 2 ? fm.q(n - 2) : BigInt(0);
      if (fm.p(n) != a * fm.p(n - 1) + pm || fm.q(n) != a * fm.q(n - 1) + qm) ++bad;
      const BigInt det = fm.p(n) * fm.q(n - 1) - fm.p(n - 1) * fm.q(n);
      if (det != ((n % 2 == 1) ? 1 : -1)) ++bad;
    }
    // both ends of the certified interval, so the check covers the real number itself
    for (std::size_t n = 0; n + 1 <= 40 && fm.q(n + 1) <= 10000; ++n) {
      const long qn1 = fm.q(n + 1).convert_to<long>();
      for (const Rational& alpha : {x.lo, x.hi}) {
        const Rational best = torus_norm(Rational(fm.q(n)) * alpha);
        for (long k = 1; k < qn1; ++k) {
          ++checked_k;
          if (torus_norm(Rational(BigInt(k)) * alpha) < best) ++bad;
        }
      }
    }
  }
  const double dt = seconds_since(t0);
  std::ostringstream os;
  os << bad << " violations, " << checked_k << " best-approximation comparisons, " << fmt("%.2f s", dt);
  return {bad == 0 && dt < 5.0, os.str()};
}

// 2. 1/(2 q_{n+1}) <= ||q_n alpha|| <= 1/q_{n+1} for n = 1..15
Outcome sandwich() {
  std::vector<std::pair<std::string, FrequencyModel>> models;
  models.emplace_back("golden", golden(20));
  models.emplace_back("sqrt2-1", cf_expand(RealInterval::parse("sqrt2-1", 512), 20));
  models.emplace_back("(sqrt7-1)/3", cf_expand(RealInterval::parse("quadratic:-1,1,7,3", 512), 20));
  std::vector<BigInt> e_coeffs;  // e - 2 = [0; 1, 2, 1, 1, 4, 1, 1, 6, ...]
  for (int k = 1; e_coeffs.size() < 20; ++k) {
    e_coeffs.emplace_back(1);
    e_coeffs.emplace_back(2 * k);
    e_coeffs.emplace_back(1);
  }
  e_coeffs.resize(20);
  models.emplace_back("e-2", FrequencyModel::from_coefficients(e_coeffs));
  models.emplace_back("liouville(0.5)", liouville_frequency(0.5, 20, 4096));
  int failures = 0, checks = 0;
  for (const auto& [name, fm] : models) {
    if (fm.depth() < 17) return {false, name + " too shallow"};
    const std::size_t N = fm.depth();
    const Rational alpha(fm.p(N), fm.q(N));
    for (std::size_t n = 1; n <= 15; ++n) {
      const Rational d = torus_norm(Rational(fm.q(n)) * alpha);
      ++checks;
      if (d < Rational(BigInt(1), 2 * fm.q(n + 1)) || d > Rational(BigInt(1), fm.q(n + 1))) ++failures;
    }
  }
  return {failures == 0, std::to_string(failures) + " failures in " + std::to_string(checks) + " exact checks"};
}

// 3. mean of ln|sin pi theta| and idempotent normalization
Outcome mean_log() {
  PotentialSpec s;
  s.name = "abs-sin";
  s.factors = {{0.0, 1.0}};
  s.smooth = catalog_function("one");
  s.g = catalog_function("one");
  const double m = mean_log_f(s);
  const double err = std::fabs(m + std::log(2.0));
  // independent raw quadrature across the zeros, for the oracle only
  boost::math::quadrature::tanh_sinh<double> ts;
  const double raw = ts.integrate([](double t) { return std::log(std::sin(std::numbers::pi * t)); }, 0.0, 1.0);
  const double raw_err = std::fabs(raw + std::log(2.0));
  double worst_idem = 0.0, worst_zero = 0.0;
  std::vector<PotentialSpec> specs{s};
  for (const auto& [name, spec] : builtin_specs()) specs.push_back(spec);
  for (const auto& spec : specs) {
    const PotentialSpec n1 = normalize_pair(spec);
    const PotentialSpec n2 = normalize_pair(n1);
    worst_idem = std::max(worst_idem, std::fabs(n2.scale - n1.scale) / n1.scale);
    worst_zero = std::max(worst_zero, std::fabs(mean_log_f(n1)));
  }
  std::ostringstream os;
  os << "|mean + ln 2| = " << fmt("%.2e", err) << ", raw quadrature " << fmt("%.2e", raw_err) << ", idempotence " << fmt("%.2e", worst_idem)
     << ", normalized mean " << fmt("%.2e", worst_zero);
  return {err <= 1e-6 && raw_err <= 1e-6 && worst_idem <= 1e-8 && worst_zero <= 1e-8, os.str()};
}

// 4. free Lyapunov exponent against the closed form
Outcome free_lyapunov() {
  const auto t0 = Clock::now();
  const FrequencyModel fm = golden(40);
  const PotentialSpec free = builtin_spec("free");
  double worst = 0.0;
  for (double E : {2.5, 3.0, 5.0}) {
    const double expect = std::log((std::fabs(E) + std::sqrt(E * E - 4.0)) / 2.0);
    const double L = lyapunov(free, E, 100000, fm, LyapunovMethod::phase_average, 4).value;
    worst = std::max(worst, std::fabs(L - expect));
  }
  const double L0 = std::fabs(lyapunov(free, 0.0, 100000, fm, LyapunovMethod::phase_average, 4).value);
  const double dt = seconds_since(t0);
  std::ostringstream os;
  os << "worst error " << fmt("%.2e", worst) << ", |L(0)| = " << fmt("%.2e", L0) << ", " << fmt("%.2f s", dt);
  return {worst <= 1e-3 && L0 < 1e-3 && dt < 30.0, os.str()};
}

// 5. composition, inverse, unimodularity and A-vs-D scaling on random instances
Outcome cocycle_algebra() {
  const FrequencyModel fm = golden(40);
  const PotentialSpec spec = normalize_pair(builtin_spec("maryland-like"));
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> energy(-3.0, 3.0);
  int bad_comp = 0, bad_inv = 0, bad_det = 0, bad_scale = 0;
  for (int i = 0; i < 100; ++i) {
    const Rational th = rand_theta(rng);
    const long n = 1 + static_cast<long>(rng() % 500), m = 1 + static_cast<long>(rng() % 500);
    const double E = energy(rng);
    const Orbit orbit = orbit_for(fm, th, n + m);
    const Mat2 whole = iterate(spec, E, orbit, n + m, MatrixKind::singular_a).unnormalized();
    const Mat2 first = iterate(spec, E, orbit, m, MatrixKind::singular_a).unnormalized();
    IterateOptions shifted;
    shifted.offset = m;
    const Mat2 second = iterate(spec, E, orbit, n, MatrixKind::singular_a, shifted).unnormalized();
    if ((whole - second * first).norm() > 1e-10 * second.norm() * first.norm()) ++bad_comp;
  }
  for (int i = 0; i < 100; ++i) {
    const Rational th = rand_theta(rng);
    const long n = 1 + static_cast<long>(rng() % 1000);
    const double E = energy(rng);
    IterateOptions inv;
    inv.inverse = true;
    IterateOptions back;
    back.offset = -n;
    const Orbit orbit = orbit_for(fm, th, n, back);
    const CocycleState minus = iterate(spec, E, orbit, n, MatrixKind::singular_a, inv);
    const CocycleState plus = iterate(spec, E, orbit, n, MatrixKind::singular_a, back);
    const Mat2 prod = minus.mat() * plus.mat();
    const double log_expected = -(minus.log_scale() + plus.log_scale());
    if ((prod - Mat2::identity().scaled(std::exp(log_expected))).norm() > 1e-9) ++bad_inv;
  }
  for (int i = 0; i < 100; ++i) {
    const Rational th = rand_theta(rng);
    const long n = 1 + static_cast<long>(rng() % 1000);
    const double E = energy(rng);
    const CocycleState a = iterate(spec, E, th, n, fm, MatrixKind::singular_a);
    if (std::fabs(a.log_abs_det()) > n * 1e-12) ++bad_det;
    const CocycleState d = iterate(spec, E, th, n, fm, MatrixKind::regular_d);
    const Orbit orbit = orbit_for(fm, th, n);
    double sum = 0.0;
    for (long j = 0; j < n; ++j) sum += std::log(std::fabs(spec.f(orbit.point(j))));
    // A_n = D_n / prod f
    const bool norms = std::fabs(a.log_scale() - (d.log_scale() - sum)) <= 1e-10 * (1.0 + std::fabs(sum));
    const bool dets = std::fabs(d.log_abs_det() - 2.0 * sum) <= 1e-10 * (1.0 + std::fabs(sum));
    if (!norms || !dets) ++bad_scale;
  }
  std::ostringstream os;
  os << "failures: composition " << bad_comp << "/100, inverse " << bad_inv << "/100, unimodularity " << bad_det
     << "/100, A-vs-D " << bad_scale << "/100";
  return {bad_comp + bad_inv + bad_det + bad_scale == 0, os.str()};
}

// 6. implied constant of the orbit-sum lemma on golden scales
Outcome aj09() {
  const FrequencyModel fm = golden(40);
  std::vector<double> worst_per_n(13, 0.0);
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const Rational th = random_theta(s);
    for (std::size_t n = 1; n <= 12; ++n) {
      worst_per_n[n] = std::max(worst_per_n[n], aj09_diagnostic(fm, th, n).C_hat);
    }
  }
  const double worst = *std::max_element(worst_per_n.begin(), worst_per_n.end());
  // trend: least-squares slope of the per-scale worst value against n
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int n = 1; n <= 12; ++n) {
    sx += n;
    sy += worst_per_n[n];
    sxx += n * n;
    sxy += n * worst_per_n[n];
  }
  const double slope = (12 * sxy - sx * sy) / (12 * sxx - sx * sx);
  const double late = (worst_per_n[10] + worst_per_n[11] + worst_per_n[12]) / 3.0;
  const double early = (worst_per_n[4] + worst_per_n[5] + worst_per_n[6]) / 3.0;
  std::ostringstream os;
  os << "max C_hat " << fmt("%.3f", worst) << ", slope " << fmt("%.4f", slope) << " per scale, late/mid "
     << fmt("%.3f", late / early);
  return {worst <= 10.0 && slope <= 0.1 && late <= 1.5 * early, os.str()};
}

// 7. delta against tau_min beta for Liouville models
Outcome delta_beta() {
  std::ostringstream os;
  bool all = true;
  for (double c : {0.5, 1.0, 2.0}) {
    const FrequencyModel fm = liouville_frequency(c, 6, 1u << 22);
    const std::size_t top = deepest_honest_scale(fm);
    const double beta = beta_estimate(fm, top, top).running_sup_tail;
    for (double tau : {0.5, 1.0}) {
      PotentialSpec spec = builtin_spec("maryland-like");
      spec.factors[0].tau = tau;
      int within = 0;
      for (std::uint64_t s = 1; s <= 20; ++s) {
        const DeltaEstimate d = delta_index(fm, random_theta(s), spec, top, 0.05, top);
        if (std::fabs(d.running_sup_tail - tau * beta) <= 0.15 * tau * beta) ++within;
      }
      all = all && within >= 18;
      os << "c=" << c << ",tau=" << tau << ":" << within << "/20 ";
    }
  }
  return {all, os.str()};
}

// 8. Gordon end to end, then the randomized implication sweep
Outcome gordon() {
  const FrequencyModel fm = liouville_frequency(2.0, 5, 1u << 22);
  const double lambda = 0.25;
  const PotentialSpec raw = builtin_spec("maryland-like", lambda);
  const PotentialSpec spec = normalize_pair(raw);
  std::ostringstream os;
  bool found = false;
  GordonReport hit;
  for (int e = 0; e <= 10 && !found; ++e) {
    const double E = -2.0 + 0.5 * e;
    const double L = lyapunov(spec, E, 20000, fm, LyapunovMethod::phase_average, 16).value;
    for (std::uint64_t s = 1; s <= 10 && !found; ++s) {
      for (std::size_t n = 1; n <= 2; ++n) {
        if (fm.q(n) > 233) break;
        const GordonReport r = gordon_check(raw, E, fm, random_theta(s), n, 0.05, L);
        if (L + 0.2 < r.delta_n && r.pass.hypotheses) {
          hit = r;
          found = true;
          break;
        }
      }
    }
  }
  bool main_ok = false;
  if (found) {
    main_ok = hit.pass.A1 && hit.pass.A2 && hit.conclusion_max >= 0.25;
    os << "E=" << hit.E << " q_n=" << hit.qn.str() << " L=" << fmt("%.3f", hit.L) << " delta_n="
       << fmt("%.3f", hit.delta_n) << " conclusion_max=" << fmt("%.3f", hit.conclusion_max);
  } else {
    os << "no energy with L + 0.2 < delta_n and both hypotheses";
  }
  std::mt19937_64 rng(77);
  int implication_failures = 0, with_hypotheses = 0;
  for (int i = 0; i < 50; ++i) {
    const double lam = (i % 2) ? 1.0 : 0.25;
    const PotentialSpec r = builtin_spec("maryland-like", lam);
    const double E = std::uniform_real_distribution<double>(-2.5, 2.5)(rng);
    const double ang = std::uniform_real_distribution<double>(0.0, std::numbers::pi)(rng);
    const double L = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const GordonReport g = gordon_check(r, E, fm, random_theta(rng()), 1, 0.05, L, Vec2{std::cos(ang), std::sin(ang)});
    with_hypotheses += g.pass.hypotheses;
    if (!g.pass.implication) ++implication_failures;
    if (g.pass.hypotheses && g.conclusion_max < 0.25 - 1e-6) ++implication_failures;
  }
  os << "; sweep: " << implication_failures << "/50 implication failures (" << with_hypotheses
     << " with hypotheses)";
  return {main_ok && implication_failures == 0, os.str()};
}

SpectralProbe cantor_measure(int levels) {
  std::vector<double> pts{0.0};
  double len = 1.0;
  for (int level = 0; level < levels; ++level) {
    len /= 4.0;
    std::vector<double> next;
    next.reserve(pts.size() * 2);
    for (double p : pts) {
      next.push_back(p);
      next.push_back(p + 3.0 * len);
    }
    pts.swap(next);
  }
  for (double& p : pts) p += len / 2;
  return probe_from_measure(pts, std::vector<double>(pts.size(), 1.0));
}

// 9. calibration of the spectral probe
Outcome spectral_calibration() {
  std::ostringstream os;
  bool ok = true;
  const FrequencyModel fm = golden(40);
  const PotentialSpec free = builtin_spec("free");
  // the spec's weights are the squared first coordinates: site -N of the box
  TruncationOptions first;
  first.site = -1;
  const SpectralProbe p = truncate_and_diagonalize(free, fm, Rational(0), 1, first);
  const double r2 = std::sqrt(2.0);
  const std::vector<double> ev{-r2, 0.0, r2}, wt{0.25, 0.5, 0.25};
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    worst = std::max(worst, std::fabs(p.eigenvalues[i] - ev[i]));
    worst = std::max(worst, std::fabs(p.weights[i] - wt[i]));
  }
  ok = ok && worst <= 1e-12;
  os << "3x3 error " << fmt("%.1e", worst);
  const SpectralProbe centre = truncate_and_diagonalize(free, fm, Rational(0), 1);
  os << " (centre weights " << fmt("%.3f", centre.weights[0]) << "," << fmt("%.3f", centre.weights[1]) << ","
     << fmt("%.3f", centre.weights[2]) << ")";

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int herglotz_bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 60);
    std::vector<double> x(k), w(k);
    for (int i = 0; i < k; ++i) {
      x[i] = u(rng);
      w[i] = std::uniform_real_distribution<double>(0.0, 1.0)(rng) + 1e-6;
    }
    const SpectralProbe probe = probe_from_measure(x, w);
    const double E = u(rng);
    const double eps = std::exp(std::uniform_real_distribution<double>(-10.0, 2.0)(rng));
    const auto M = borel_transform(probe, E, eps);
    if (!(M.imag() > 0.0) || eps * std::abs(M) > 1.0 + 1e-12) ++herglotz_bad;
  }
  ok = ok && herglotz_bad == 0;
  os << "; Herglotz failures " << herglotz_bad << "/1000";

  const auto grid = default_gamma_grid();
  const auto ladder = geometric_ladder(1e-1, std::sqrt(0.5), 12);
  const double g_point = spectral_continuity_probe(probe_from_measure({0.0}, {1.0}), 0.0, grid, ladder).gamma_star;
  std::vector<double> x, w;
  for (int i = 0; i < 200000; ++i) {
    x.push_back(-1.0 + (i + 0.5) * 2.0 / 200000);
    w.push_back(1.0);
  }
  const double g_leb = spectral_continuity_probe(probe_from_measure(x, w), 0.0, grid, ladder).gamma_star;
  const SpectralProbe cantor = cantor_measure(14);
  const double Ec = cantor.eigenvalues[cantor.eigenvalues.size() / 3];
  const double g_cantor =
      spectral_continuity_probe(cantor, Ec, grid, geometric_ladder(1e-2, std::sqrt(0.5), 12)).gamma_star;
  ok = ok && g_point <= 0.05 && g_leb >= 0.9 && std::fabs(g_cantor - 0.5) <= 0.15;
  os << "; gamma_star point " << g_point << ", lebesgue " << g_leb << ", cantor " << g_cantor;
  return {ok, os.str()};
}

// 10. Liouville against golden at N = 1e4
Outcome dimension_comparison() {
  const auto t0 = Clock::now();
  const PotentialSpec spec = builtin_spec("maryland-like");
  const FrequencyModel liou = liouville_frequency(3.0, 4, 1u << 22);
  const FrequencyModel gold = golden(40);
  const double beta_l = beta_estimate(liou, 1, deepest_honest_scale(liou)).running_sup_tail;
  const double beta_g = beta_estimate(gold, 1, 30).running_sup_tail;
  int wins = 0;
  std::ostringstream os;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const Rational th = random_theta(s);
    const DimensionScan a = dimension_scan(spec, liou, th, -1.0, 1.0, 10000, beta_l, 0.05);
    const DimensionScan b = dimension_scan(spec, gold, th, -1.0, 1.0, 10000, beta_g, 0.05);
    const ScanComparison cmp = compare(a, b);
    wins += cmp.a_strictly_larger;
    os << fmt("%.2f", cmp.median_a) << ">" << fmt("%.2f", cmp.median_b) << (cmp.a_strictly_larger ? " " : "? ");
  }
  os << "(" << wins << "/5, " << fmt("%.0f s", seconds_since(t0)) << ")";
  return {wins >= 4, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"diophantine exactness", diophantine_exactness},
      {"convergent sandwich", sandwich},
      {"mean-log identity", mean_log},
      {"free Lyapunov oracle", free_lyapunov},
      {"cocycle algebra", cocycle_algebra},
      {"orbit-sum constant", aj09},
      {"delta versus tau_min beta", delta_beta},
      {"gordon end to end", gordon},
      {"spectral probe calibration", spectral_calibration},
      {"liouville versus golden dimension", dimension_comparison},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    failed += !out.pass;
    std::printf("%s [%d] %s: %s\n", out.pass ? "PASS" : "FAIL", index, name, out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
