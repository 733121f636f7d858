#include "core/spectral.hpp"

#include "core/cocycle.hpp"
#include "core/error.hpp"
#include "core/orbit.hpp"
#include "core/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace quasispec {

double SpectralProbe::total_weight() const {
  long double s = 0.0L;
  for (double w : weights) s += w;
  return static_cast<double>(s);
}

SpectralProbe truncate_and_diagonalize(const PotentialSpec& spec, const FrequencyModel& fm, const Rational& theta,
                                       long N, TruncationOptions opts) {
  if (N < 0 || N > 100000) throw Error(ErrorCode::invalid_argument, "truncation half-width must be in [0, 1e5]");
  if (opts.site < -N || opts.site > N) throw Error(ErrorCode::invalid_argument, "site outside the truncation");
  const std::size_t dim = static_cast<std::size_t>(2 * N + 1);
  std::vector<double> diag(dim);
  const int attempts = opts.allow_micro_offset ? 9 : 1;
  for (int k = 0; k < attempts; ++k) {
    const double offset = std::ldexp(static_cast<double>(k), -40);
    const Rational th = theta + exact_rational(offset);
    const Orbit orbit = Orbit::certified(fm, th, static_cast<std::uint64_t>(N + 1));
    auto cur = orbit.cursor(-N);
    std::optional<std::int64_t> hit;
    for (std::size_t i = 0; i < dim; ++i) {
      const FGV fgv = eval_fgv(spec, cur.value());
      if (fgv.singular) {
        hit = cur.index();
        break;
      }
      diag[i] = fgv.v;
      cur.advance();
    }
    if (hit) {
      if (k + 1 == attempts) throw Error(ErrorCode::singular_hit, "truncation site hits a zero of f", *hit);
      continue;
    }
    TridiagSpectrum ts = tridiag_spectrum(std::move(diag), std::vector<double>(dim - 1, 1.0),
                                          static_cast<std::size_t>(N + opts.site));
    SpectralProbe p;
    p.N = N;
    p.eigenvalues = std::move(ts.values);
    p.weights = std::move(ts.weights);
    p.theta = to_double(theta);
    p.micro_offset = offset;
    p.site = opts.site;
    p.finite_volume = true;
    p.spec_id = spec.name;
    p.fm_id = fm.label();
    return p;
  }
  throw Error(ErrorCode::singular_hit, "truncation site hits a zero of f");
}

SpectralProbe probe_from_measure(std::vector<double> locations, std::vector<double> weights) {
  if (locations.empty() || locations.size() != weights.size()) {
    throw Error(ErrorCode::invalid_argument, "measure needs matching nonempty locations and weights");
  }
  long double total = 0.0L;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::invalid_argument, "weights must be nonnegative");
    total += w;
  }
  if (total <= 0.0L) throw Error(ErrorCode::invalid_argument, "measure has zero mass");
  std::vector<std::size_t> order(locations.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return locations[a] < locations[b]; });
  SpectralProbe p;
  p.finite_volume = false;
  p.boundary = "none";
  for (std::size_t k : order) {
    p.eigenvalues.push_back(locations[k]);
    p.weights.push_back(static_cast<double>(weights[k] / total));
  }
  return p;
}

double epsilon_floor(const SpectralProbe& probe, double E) {
  const auto& ev = probe.eigenvalues;
  if (!probe.finite_volume || ev.size() < 2) return 0.0;
  const long n = static_cast<long>(ev.size());
  const long idx = std::lower_bound(ev.begin(), ev.end(), E) - ev.begin();
  const long span = std::min(20L, n - 1);
  long lo = std::max(0L, idx - span / 2);
  const long hi = std::min(n - 1, lo + span);
  lo = hi - span;
  return 10.0 * (ev[hi] - ev[lo]) / static_cast<double>(span);
}

std::complex<double> borel_transform(const SpectralProbe& probe, double E, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::invalid_argument, "eps must be positive");
  if (eps < epsilon_floor(probe, E) * (1.0 - 1e-12)) {
    throw Error(ErrorCode::epsilon_below_resolution, "eps below the finite-volume resolution floor");
  }
  long double re = 0.0L, im = 0.0L;
  const double e2 = eps * eps;
  for (std::size_t k = 0; k < probe.eigenvalues.size(); ++k) {
    const double x = probe.eigenvalues[k] - E;
    const double den = x * x + e2;
    re += probe.weights[k] * x / den;
    im += probe.weights[k] * eps / den;
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

double mu_interval(const SpectralProbe& probe, double E, double eps) {
  const auto& ev = probe.eigenvalues;
  const auto lo = std::lower_bound(ev.begin(), ev.end(), E - eps) - ev.begin();
  const auto hi = std::upper_bound(ev.begin(), ev.end(), E + eps) - ev.begin();
  long double s = 0.0L;
  for (auto k = lo; k < hi; ++k) s += probe.weights[static_cast<std::size_t>(k)];
  return static_cast<double>(s);
}

std::vector<double> geometric_ladder(double eps_hi, double ratio, int rungs) {
  if (!(eps_hi > 0.0) || !(ratio > 0.0 && ratio < 1.0) || rungs < 1) {
    throw Error(ErrorCode::invalid_argument, "ladder needs eps_hi > 0, ratio in (0, 1), rungs >= 1");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(rungs));
  for (int k = 0; k < rungs; ++k) out.push_back(eps_hi * std::pow(ratio, k));
  return out;
}

std::vector<double> default_gamma_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 99; ++k) g.push_back(k / 100.0);
  return g;
}

DimensionEstimate spectral_continuity_probe(const SpectralProbe& probe, double E,
                                            const std::vector<double>& gamma_grid,
                                            const std::vector<double>& ladder) {
  constexpr std::size_t kRungs = 5;
  if (ladder.size() < 8) throw Error(ErrorCode::ladder_too_shallow, "the eps ladder needs at least 8 rungs");
  if (gamma_grid.empty()) throw Error(ErrorCode::invalid_argument, "empty gamma grid");
  DimensionEstimate est;
  est.E = E;
  est.gamma_grid = gamma_grid;
  est.ladder = ladder;
  std::sort(est.ladder.begin(), est.ladder.end(), std::greater<>());
  const std::size_t R = est.ladder.size();
  std::vector<double> absM(R);
  for (std::size_t r = 0; r < R; ++r) absM[r] = std::abs(borel_transform(probe, E, est.ladder[r]));

  est.gamma_star = 0.0;
  for (double g : gamma_grid) {
    if (!(g > 0.0 && g < 1.0)) throw Error(ErrorCode::invalid_argument, "gamma must lie in (0, 1)");
    double deep = std::numeric_limits<double>::infinity();
    double shallow = deep;
    for (std::size_t r = 0; r < R; ++r) {
      const double val = std::pow(est.ladder[r], 1.0 - g) * absM[r];
      if (r < kRungs) shallow = std::min(shallow, val);
      if (r >= R - kRungs) deep = std::min(deep, val);
    }
    est.probe_values.push_back(deep);
    est.shallow_values.push_back(shallow);
    if (deep <= shallow) est.gamma_star = std::max(est.gamma_star, g);
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (double eps : est.ladder) {
    const double mu = mu_interval(probe, E, eps);
    if (mu <= 0.0) continue;
    const double x = std::log(eps), y = std::log(mu);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  est.packing_points = n;
  const double den = n * sxx - sx * sx;
  est.packing_proxy = n >= 2 && den > 0 ? (n * sxy - sx * sy) / den : std::numeric_limits<double>::quiet_NaN();
  return est;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

namespace {

std::vector<double> scan_energies(const SpectralProbe& probe, double lo, double hi, const ScanOptions& opts) {
  std::vector<double> out;
  const int K = opts.energies;
  const auto& ev = probe.eigenvalues;
  if (opts.sampling == EnergySampling::measure_quantile) {
    const auto b = std::lower_bound(ev.begin(), ev.end(), lo) - ev.begin();
    const auto e = std::upper_bound(ev.begin(), ev.end(), hi) - ev.begin();
    std::vector<double> cum;
    long double s = 0.0L;
    for (auto k = b; k < e; ++k) {
      s += probe.weights[static_cast<std::size_t>(k)];
      cum.push_back(static_cast<double>(s));
    }
    if (s > 0.0L && e - b >= 2) {
      for (int k = 0; k < K; ++k) {
        const double t = (k + 0.5) / K * static_cast<double>(s);
        auto i = static_cast<long>(std::lower_bound(cum.begin(), cum.end(), t) - cum.begin()) + b;
        i = std::min<long>(i, e - 2);
        // midway to the next level, off the atom itself
        out.push_back(0.5 * (ev[static_cast<std::size_t>(i)] + ev[static_cast<std::size_t>(i + 1)]));
      }
      return out;
    }
  }
  for (int k = 0; k < K; ++k) out.push_back(lo + (k + 0.5) * (hi - lo) / K);
  return out;
}

}  // namespace

DimensionScan dimension_scan(const SpectralProbe& probe, const PotentialSpec& spec, const FrequencyModel& fm,
                             double E_lo, double E_hi, double beta, double eps, const ScanOptions& opts) {
  if (!(E_hi > E_lo)) throw Error(ErrorCode::invalid_argument, "energy window must have E_hi > E_lo");
  if (opts.energies < 1) throw Error(ErrorCode::invalid_argument, "scan needs at least one energy");
  const PotentialSpec normalized =
      spec.mean_log_f && std::fabs(*spec.mean_log_f) <= 1e-8 ? spec : normalize_pair(spec);
  DimensionScan scan;
  scan.tau_min = spec.tau_min();
  scan.eps = eps;
  scan.micro_offset = probe.micro_offset;
  const auto grid = default_gamma_grid();
  for (double E : scan_energies(probe, E_lo, E_hi, opts)) {
    const double fl = epsilon_floor(probe, E);
    const double top = (fl > 0 ? fl : 1e-3) * std::pow(opts.ratio, -(opts.rungs - 1)) * (1.0 + 1e-9);
    const DimensionEstimate est =
        spectral_continuity_probe(probe, E, grid, geometric_ladder(top, opts.ratio, opts.rungs));
    ScanRow row;
    row.E = E;
    row.gamma_star = est.gamma_star;
    row.packing_slope = est.packing_proxy;
    row.N = probe.N;
    row.beta = beta;
    row.L_E = lyapunov(normalized, E, opts.lyapunov_n, fm, LyapunovMethod::phase_average, opts.lyapunov_phases,
                       MatrixKind::regular_d)
                  .value;
    row.Lambda = row.L_E + 2.0 * eps;
    row.denominator = scan.tau_min * beta - eps / 4.0;
    scan.rows.push_back(row);
  }
  std::vector<double> gs;
  for (const auto& r : scan.rows) gs.push_back(r.gamma_star);
  scan.median_gamma_star = median(gs);
  return scan;
}

DimensionScan dimension_scan(const PotentialSpec& spec, const FrequencyModel& fm, const Rational& theta,
                             double E_lo, double E_hi, long N, double beta, double eps, ScanOptions opts) {
  const SpectralProbe probe = truncate_and_diagonalize(spec, fm, theta, N, opts.truncation);
  return dimension_scan(probe, spec, fm, E_lo, E_hi, beta, eps, opts);
}

ScanComparison compare(const DimensionScan& a, const DimensionScan& b) {
  ScanComparison c;
  c.median_a = a.median_gamma_star;
  c.median_b = b.median_gamma_star;
  c.a_strictly_larger = c.median_a > c.median_b;
  const std::size_t n = std::min(a.rows.size(), b.rows.size());
  int above = 0;
  for (std::size_t k = 0; k < n; ++k) above += a.rows[k].gamma_star > b.rows[k].gamma_star;
  c.fraction_a_above_b = n ? static_cast<double>(above) / static_cast<double>(n) : 0.0;
  return c;
}

C1Fit fit_c1(const std::vector<ScanRow>& rows) {
  double sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    if (!(r.denominator > 0.0)) continue;
    const double x = r.Lambda / r.denominator;
    const double y = 1.0 - r.gamma_star;
    pts.emplace_back(x, y);
    sxx += x * x;
    sxy += x * y;
  }
  if (pts.empty() || sxx == 0.0) throw Error(ErrorCode::invalid_argument, "no rows with a positive denominator");
  C1Fit fit;
  fit.points = static_cast<int>(pts.size());
  fit.C1 = sxy / sxx;
  if (pts.size() > 1) {
    double ss = 0;
    for (const auto& [x, y] : pts) ss += (y - fit.C1 * x) * (y - fit.C1 * x);
    fit.stderr_ = std::sqrt(ss / static_cast<double>(pts.size() - 1) / sxx);
  }
  fit.lo = fit.C1 - 1.96 * fit.stderr_;
  fit.hi = fit.C1 + 1.96 * fit.stderr_;
  return fit;
}

}  // namespace quasispec
