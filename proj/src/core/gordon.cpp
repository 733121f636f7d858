#include "core/gordon.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace quasispec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_rational(const Rational& r) { return log_abs(numerator(r)) - log_abs(denominator(r)); }

void check_tube(const Rational& theta, const PotentialSpec& spec) {
  for (const auto& z : spec.factors) {
    const Rational d = torus_norm(theta - exact_rational(z.theta));
    if (to_double(d) < kSingularGuard) {
      throw Error(ErrorCode::theta_in_singular_tube, "theta lies in the guard tube around a zero of f");
    }
  }
}

// [sum_l tau_l ln||q_n(theta - theta_l)|| + tau_min ln q_{n+1}] / q_n; nullopt when a norm vanishes.
std::optional<double> delta_value(const FrequencyModel& fm, const Rational& theta, const PotentialSpec& spec,
                                  std::size_t n) {
  double x = spec.tau_min() * fm.log_q(n + 1);
  const Rational qn(fm.q(n));
  for (const auto& z : spec.factors) {
    const Rational r = torus_norm(qn * (theta - exact_rational(z.theta)));
    if (r == 0) return std::nullopt;
    x += z.tau * log_rational(r);
  }
  if (x == 0.0) return 0.0;
  const double mag = std::exp(std::log(std::fabs(x)) - fm.log_q(n));
  return x < 0 ? -mag : mag;
}

std::int64_t small_q(const FrequencyModel& fm, std::size_t n, long limit) {
  if (n > fm.depth()) throw Error(ErrorCode::insufficient_depth, "scale beyond model depth");
  if (fm.q(n) > BigInt(limit)) throw Error(ErrorCode::scale_uncertified, "q_n too large for an orbit scan");
  return static_cast<std::int64_t>(fm.q(n));
}

Orbit make_orbit(const FrequencyModel& fm, const Rational& theta, std::uint64_t reach,
                 std::optional<std::size_t> index) {
  if (index) return Orbit(fm, theta, *index);
  return Orbit::certified(fm, theta, reach);
}

}  // namespace

std::optional<double> DeltaEstimate::value_at(std::size_t n) const {
  for (const auto& [k, v] : per_n) {
    if (k == n) return v;
  }
  return std::nullopt;
}

DeltaEstimate delta_index(const FrequencyModel& fm, const Rational& theta, const PotentialSpec& spec,
                          std::size_t depth, double eps, std::optional<std::size_t> tail_from) {
  if (depth < 1) throw Error(ErrorCode::invalid_argument, "delta_index needs depth >= 1");
  if (fm.depth() < depth + 1) throw Error(ErrorCode::insufficient_depth, "delta_index needs q_{depth+1}");
  check_tube(theta, spec);
  DeltaEstimate out;
  out.eps = eps;
  out.tau_min = spec.tau_min();
  out.tail_from = tail_from ? std::clamp<std::size_t>(*tail_from, 1, depth) : std::max<std::size_t>(1, depth / 2);
  out.running_sup_tail = -kInf;
  for (std::size_t n = 1; n <= depth; ++n) {
    const auto v = delta_value(fm, theta, spec, n);
    if (!v) {
      out.per_n.emplace_back(n, -kInf);
      out.degenerate.push_back(n);
      continue;
    }
    out.per_n.emplace_back(n, *v);
    if (n >= out.tail_from) out.running_sup_tail = std::max(out.running_sup_tail, *v);
  }
  for (const auto& [n, v] : out.per_n) {
    if (n >= out.tail_from && std::isfinite(v) && v > out.running_sup_tail - eps / 4.0) {
      out.selected_subsequence.push_back(n);
    }
  }
  return out;
}

std::vector<ClosestReturn> closest_returns(const FrequencyModel& fm, const Rational& theta,
                                           const PotentialSpec& spec, std::size_t scale_n) {
  const std::int64_t q = small_q(fm, scale_n, 100'000'000);
  std::vector<ClosestReturn> out;
  for (const auto& z : spec.factors) {
    const Orbit orbit = Orbit::certified(fm, theta - exact_rational(z.theta), static_cast<std::uint64_t>(q));
    auto cur = orbit.cursor(0);
    auto best = cur;
    for (std::int64_t j = 1; j < q; ++j) {
      cur.advance();
      if (cur.nearer_to_integer_than(best)) best = cur;
    }
    ClosestReturn r;
    r.j = best.index();
    r.distance = best.torus_distance();
    r.sin_value = std::sin(std::numbers::pi * r.distance);
    out.push_back(r);
  }
  return out;
}

AJ09Diagnostic aj09_diagnostic(const FrequencyModel& fm, const Rational& theta, std::size_t scale_n,
                               std::optional<std::size_t> orbit_index) {
  const std::int64_t q = small_q(fm, scale_n, 100'000'000);
  const Orbit orbit = make_orbit(fm, theta, static_cast<std::uint64_t>(q), orbit_index);
  auto cur = orbit.cursor(0);
  auto best = cur;
  long double rest = 0.0L;
  auto log_sin = [](const Orbit::Cursor& c) { return std::log(std::sin(std::numbers::pi * c.torus_distance())); };
  for (std::int64_t j = 1; j < q; ++j) {
    cur.advance();
    if (cur.nearer_to_integer_than(best)) {
      rest += log_sin(best);
      best = cur;
    } else {
      rest += log_sin(cur);
    }
  }
  AJ09Diagnostic d;
  d.j0 = best.index();
  d.sum = static_cast<double>(rest + static_cast<long double>(q - 1) * std::numbers::ln2_v<long double>);
  d.C_hat = q > 1 ? std::fabs(d.sum) / std::log(static_cast<double>(q)) : 0.0;
  return d;
}

KeyInequalities key_inequalities(const FrequencyModel& fm, const Rational& theta, const PotentialSpec& spec,
                                 std::size_t scale_n, double eps, const DeltaEstimate& delta, KeyOptions opts) {
  if (!spec.mean_log_f || std::fabs(*spec.mean_log_f) > 1e-8) {
    throw Error(ErrorCode::invalid_argument, "key inequalities need a normalized spec");
  }
  if (delta.selected_subsequence.empty()) throw Error(ErrorCode::subsequence_empty, "no scale met the selection rule");
  if (scale_n + 1 > fm.depth()) throw Error(ErrorCode::insufficient_depth, "key inequalities need q_{n+1}");
  const std::int64_t q = small_q(fm, scale_n, 10'000'000);
  KeyInequalities k;
  k.scale_n = scale_n;
  k.q_n = static_cast<double>(q);
  k.log_q_next = fm.log_q(scale_n + 1);
  k.delta = delta.running_sup_tail;
  k.eps = eps;
  // below eps/4 the selection threshold sup - eps/4 admits nonpositive scales
  k.applicable = k.delta > eps / 4.0;
  const auto& sel = delta.selected_subsequence;
  k.in_subsequence = std::find(sel.begin(), sel.end(), scale_n) != sel.end();
  const double tau_min = spec.tau_min();

  const auto returns = closest_returns(fm, theta, spec, scale_n);
  k.key1_lhs = 0.0;
  for (std::size_t l = 0; l < returns.size(); ++l) k.key1_lhs += spec.factors[l].tau * std::log(returns[l].sin_value);
  k.key1_rhs = k.q_n * (k.delta - eps / 2.0) - tau_min * k.log_q_next;
  k.jy1_rhs = k.q_n * (k.delta - eps) - tau_min * k.log_q_next;

  const double lim = eps * k.q_n / 10.0;
  k.m_range = lim < std::log(static_cast<double>(opts.m_max)) ? static_cast<std::int64_t>(std::floor(std::exp(lim)))
                                                              : opts.m_max;
  const std::int64_t M = k.m_range;
  const Orbit orbit = make_orbit(fm, theta, static_cast<std::uint64_t>(M + q), opts.orbit_index);
  // prefix[i] = sum of ln|f| over j in [-M, -M + i)
  std::vector<long double> prefix(static_cast<std::size_t>(2 * M + q + 1), 0.0L);
  auto cur = orbit.cursor(-M);
  for (std::size_t i = 0; i + 1 < prefix.size(); ++i) {
    const FGV fgv = eval_fgv(spec, cur.value());
    if (fgv.singular) throw Error(ErrorCode::singular_hit, "orbit hit a zero of f", cur.index());
    prefix[i + 1] = prefix[i] + std::log(std::fabs(fgv.f));
    cur.advance();
  }
  auto window = [&](std::int64_t m) {
    const auto i = static_cast<std::size_t>(m + M);
    return static_cast<double>(prefix[i + static_cast<std::size_t>(q)] - prefix[i]);
  };
  k.jy1_lhs = window(0);
  k.shifted_min = kInf;
  for (std::int64_t m = -M; m <= M; ++m) {
    const double s = window(m);
    if (s < k.shifted_min) {
      k.shifted_min = s;
      k.shifted_argmin = m;
    }
  }
  k.shifted_rhs = -eps * k.q_n;

  for (const auto& z : spec.factors) {
    k.aj09.push_back(aj09_diagnostic(fm, theta - exact_rational(z.theta), scale_n, opts.orbit_index));
  }
  k.margin_key1 = k.key1_lhs - k.key1_rhs;
  k.margin_jy1 = k.jy1_lhs - k.jy1_rhs;
  k.margin_shifted = k.shifted_min - k.shifted_rhs;
  if (k.applicable) {
    k.pass_key1 = k.margin_key1 >= 0.0;
    k.pass_jy1 = k.margin_jy1 >= 0.0;
    k.pass_shifted = k.margin_shifted > 0.0;
  }
  return k;
}

RepetitionDefect repetition_defect(const PotentialSpec& spec, double E, const FrequencyModel& fm,
                                   std::size_t scale_n, int grid) {
  if (grid < 1) throw Error(ErrorCode::invalid_argument, "grid must be positive");
  if (scale_n + 1 > fm.depth()) throw Error(ErrorCode::insufficient_depth, "repetition defect needs q_{n+1}");
  const std::size_t D = fm.depth();
  RepetitionDefect r;
  r.scale_n = scale_n;
  r.log_q_next = fm.log_q(scale_n + 1);
  r.shift = to_double(Rational(fm.q(scale_n) * fm.p(D) - fm.p(scale_n) * fm.q(D), fm.q(D)));
  const double s = r.shift - std::floor(r.shift);
  for (int i = 0; i < grid; ++i) {
    const double x = static_cast<double>(i) / grid;
    double y = x + s;
    if (y >= 1.0) y -= 1.0;
    const double dfv = spec.f(y) - spec.f(x);
    const double dg = spec.g_value(y) - spec.g_value(x);
    const Mat2 dF{0.0, dfv, -dfv, E * dfv - dg};
    r.defect_F = std::max(r.defect_F, dF.norm());
    r.defect_f = std::max(r.defect_f, std::fabs(dfv));
  }
  r.log_C_fitted = std::log(r.defect_F) + spec.tau0 * r.log_q_next;
  const HolderEstimate hf = holder_estimate([&](double x) { return spec.f(x); }, spec.tau0, 1024);
  const HolderEstimate hg = holder_estimate([&](double x) { return spec.g_value(x); }, spec.tau0, 1024);
  r.holder_diverging = hf.diverging || hg.diverging;
  r.C_predicted = r.holder_diverging ? kInf : (std::numbers::sqrt2 + std::fabs(E)) * hf.value + hg.value;
  const double allowed = r.C_predicted * std::pow(std::fabs(r.shift), spec.tau0);
  r.within_prediction = r.defect_F <= allowed * (1.0 + 1e-9);
  return r;
}

namespace {

Mat2 step_a(double E, double v) { return {E - v, -1.0, 1.0, 0.0}; }
Mat2 step_a_inv(double E, double v) { return {0.0, 1.0, -1.0, E - v}; }

bool finite(const Mat2& m) {
  return std::isfinite(m.a) && std::isfinite(m.b) && std::isfinite(m.c) && std::isfinite(m.d);
}

}  // namespace

GordonReport gordon_check(const PotentialSpec& spec, double E, const FrequencyModel& fm, const Rational& theta,
                          std::size_t scale_n, double eps, std::optional<double> L, Vec2 phi_init,
                          GordonOptions opts) {
  if (!L) throw Error(ErrorCode::lyapunov_missing, "gordon_check needs a Lyapunov estimate");
  const double pn = norm(phi_init);
  if (std::fabs(pn - 1.0) > 1e-12) throw Error(ErrorCode::invalid_argument, "phi_init must be a unit vector");
  if (scale_n + 1 > fm.depth()) throw Error(ErrorCode::insufficient_depth, "gordon_check needs q_{n+1}");
  const std::int64_t q = small_q(fm, scale_n, 1'000'000);
  check_tube(theta, spec);

  GordonReport rep;
  rep.scale_n = scale_n;
  rep.qn = fm.q(scale_n);
  rep.qn1_log = fm.log_q(scale_n + 1);
  rep.E = E;
  rep.L = *L;
  rep.eps = eps;
  if (opts.delta) {
    rep.delta_n = *opts.delta;
  } else {
    const auto v = delta_value(fm, theta, spec, scale_n);
    rep.delta_n = v ? *v : -kInf;
  }

  // v_j for j in [-q, 2q)
  const Orbit orbit = Orbit::certified(fm, theta, static_cast<std::uint64_t>(2 * q));
  std::vector<double> v(static_cast<std::size_t>(3 * q));
  long double log_f = 0.0L;
  {
    auto cur = orbit.cursor(-q);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const FGV fgv = eval_fgv(spec, cur.value());
      if (fgv.singular) throw Error(ErrorCode::singular_hit, "solution orbit hit a zero of f", cur.index());
      v[i] = fgv.v;
      if (cur.index() >= 0 && cur.index() < q) log_f += std::log(std::fabs(fgv.f));
      cur.advance();
    }
  }
  auto vj = [&](std::int64_t j) { return v[static_cast<std::size_t>(j + q)]; };
  rep.orbit_product_lower = static_cast<double>(log_f);

  // A_q(theta) - A_q(theta + shift * alpha), telescoped so that no large
  // products are subtracted.
  auto telescoped = [&](std::int64_t shift) {
    Mat2 acc{0.0, 0.0, 0.0, 0.0};
    Mat2 prefix = Mat2::identity();
    for (std::int64_t j = 0; j < q; ++j) {
      const double dv = vj(j + shift) - vj(j);
      const Mat2 delta_prefix{dv * prefix.a, dv * prefix.b, 0.0, 0.0};
      acc = step_a(E, vj(j + shift)) * acc + delta_prefix;
      prefix = step_a(E, vj(j)) * prefix;
    }
    if (!finite(acc)) throw Error(ErrorCode::precision_exhausted, "transfer matrices overflow at this scale");
    return acc;
  };
  const Mat2 D2 = telescoped(q);
  const Mat2 D1 = telescoped(-q);
  // A_q^{-1} is the adjugate, and the adjugate is linear
  const Mat2 D1_inv = D1.adjugate();

  const double qd = static_cast<double>(q);
  rep.bound_log = qd * (rep.L - rep.delta_n + 4.0 * eps);
  rep.c = -(rep.L - rep.delta_n + 4.0 * eps);

  struct Shot {
    double e1, e2, conclusion;
  };
  auto shoot = [&](const Vec2& phi) {
    Vec2 w = phi;
    Vec2 at_q{}, at_2q{};
    for (std::int64_t j = 0; j < 2 * q; ++j) {
      w = step_a(E, vj(j)) * w;
      if (j + 1 == q) at_q = w;
    }
    at_2q = w;
    Vec2 u = phi;
    for (std::int64_t j = -1; j >= -q; --j) u = step_a_inv(E, vj(j)) * u;
    Shot s;
    s.e1 = norm(D1_inv * phi);
    s.e2 = norm(D2 * at_q);
    s.conclusion = std::max({norm(at_q), norm(u), norm(at_2q)});
    return s;
  };
  auto hyp = [&](const Shot& s) {
    return rep.c > 0.0 && std::log(s.e1) <= rep.bound_log && std::log(s.e2) <= rep.bound_log;
  };

  const Shot main = shoot(phi_init);
  rep.hyp_A1_log = std::log(main.e1);
  rep.hyp_A2_log = std::log(main.e2);
  rep.conclusion_max = main.conclusion;
  rep.conclusion_floor = (1.0 - std::max(main.e1, main.e2)) / 2.0;
  rep.pass.A1 = rep.hyp_A1_log <= rep.bound_log;
  rep.pass.A2 = rep.hyp_A2_log <= rep.bound_log;
  rep.pass.hypotheses = hyp(main);
  rep.pass.conclusion = main.conclusion >= 0.25;
  bool implication = !hyp(main) || main.conclusion >= 0.25 - 1e-6;
  rep.sweep_worst_conclusion = main.conclusion;
  rep.sweep_worst_A1_log = rep.hyp_A1_log;
  rep.sweep_worst_A2_log = rep.hyp_A2_log;
  for (int k = 0; k < opts.sweep; ++k) {
    const double a = std::numbers::pi * k / opts.sweep;
    const Shot s = shoot({std::cos(a), std::sin(a)});
    rep.sweep_worst_conclusion = std::min(rep.sweep_worst_conclusion, s.conclusion);
    rep.sweep_worst_A1_log = std::max(rep.sweep_worst_A1_log, std::log(s.e1));
    rep.sweep_worst_A2_log = std::max(rep.sweep_worst_A2_log, std::log(s.e2));
    implication = implication && (!hyp(s) || s.conclusion >= 0.25 - 1e-6);
  }
  rep.pass.implication = implication;

  const RepetitionDefect rd = repetition_defect(spec, E, fm, scale_n, opts.defect_grid);
  rep.repetition_defect_F = rd.defect_F;
  rep.repetition_defect_f = rd.defect_f;
  return rep;
}

}  // namespace quasispec
