#include "core/cocycle.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace quasispec {

namespace {

struct Step {
  Mat2 m;
  double det;
  bool singular;
};

Step step_matrix(const PotentialSpec& spec, double E, double x, MatrixKind kind, bool inverse, std::int64_t j) {
  const FGV fgv = eval_fgv(spec, x);
  Mat2 m;
  switch (kind) {
    case MatrixKind::singular_a:
      if (fgv.singular) throw Error(ErrorCode::singular_hit, "transfer matrix undefined at a zero of f", j);
      m = {E - fgv.v, -1.0, 1.0, 0.0};
      break;
    case MatrixKind::regular_d:
      m = {E * fgv.f - fgv.g, -fgv.f, fgv.f, 0.0};
      break;
    case MatrixKind::inverse_regular_f:
      m = {0.0, fgv.f, -fgv.f, E * fgv.f - fgv.g};
      break;
  }
  double det = m.det();
  if (inverse) {
    if (det == 0.0) throw Error(ErrorCode::singular_hit, "cannot invert a degenerate step matrix", j);
    m = m.adjugate().scaled(1.0 / det);
    det = 1.0 / det;
  }
  return {m, det, fgv.singular};
}

}  // namespace

TransferMatrix transfer_at(const PotentialSpec& spec, double E, double theta) {
  return {step_matrix(spec, E, theta, MatrixKind::singular_a, false, 0).m, MatrixKind::singular_a};
}

TransferMatrix regular_at(const PotentialSpec& spec, double E, double theta) {
  return {step_matrix(spec, E, theta, MatrixKind::regular_d, false, 0).m, MatrixKind::regular_d};
}

TransferMatrix inverse_regular_at(const PotentialSpec& spec, double E, double theta) {
  return {step_matrix(spec, E, theta, MatrixKind::inverse_regular_f, false, 0).m, MatrixKind::inverse_regular_f};
}

void CocycleState::left_multiply(const Mat2& m, double det_m) {
  const Mat2 B = m * q_;
  const double r11 = std::hypot(B.a, B.c);
  double R11, R12, R22;
  Mat2 q_next;
  if (r11 > 0.0) {
    const double c = B.a / r11;
    const double s = B.c / r11;
    q_next = {c, -s, s, c};
    R11 = r11;
    R12 = c * B.b + s * B.d;
    // det(B) = det(m) det(Q) and Q is a rotation
    R22 = det_m / r11;
  } else {
    q_next = Mat2::identity();
    R11 = 0.0;
    R12 = B.b;
    R22 = B.d;
  }
  const double a = R11 * ra_;
  const double b = R11 * rb_ + R12 * rd_;
  const double d = R22 * rd_;
  const double mx = std::max({std::fabs(a), std::fabs(b), std::fabs(d)});
  if (mx > 0.0) {
    ra_ = a / mx;
    rb_ = b / mx;
    rd_ = d / mx;
    s_ += std::log(mx);
  } else {
    ra_ = rb_ = rd_ = 0.0;
    s_ = -std::numeric_limits<double>::infinity();
  }
  log_r11_ += std::log(std::fabs(R11));
  log_r22_ += std::log(std::fabs(R22));
  q_ = q_next;
  ++steps_;
}

Mat2 CocycleState::mat() const {
  const Mat2 r{ra_, rb_, 0.0, rd_};
  const double n = r.norm();
  if (n == 0.0) return {0.0, 0.0, 0.0, 0.0};
  return (q_ * r).scaled(1.0 / n);
}

double CocycleState::log_scale() const {
  const Mat2 r{ra_, rb_, 0.0, rd_};
  return s_ + std::log(r.norm());
}

std::pair<Vec2, double> CocycleState::apply(const Vec2& v) const {
  const Vec2 rv{ra_ * v[0] + rb_ * v[1], rd_ * v[1]};
  const Vec2 w = q_ * rv;
  const double nw = norm(w);
  if (nw == 0.0) return {{0.0, 0.0}, -std::numeric_limits<double>::infinity()};
  return {{w[0] / nw, w[1] / nw}, s_ + std::log(nw)};
}

Orbit orbit_for(const FrequencyModel& fm, const Rational& theta, long n, IterateOptions opts) {
  const std::int64_t lo = opts.inverse ? opts.offset - n : opts.offset;
  const std::int64_t hi = opts.inverse ? opts.offset - 1 : opts.offset + n - 1;
  const std::uint64_t reach = static_cast<std::uint64_t>(std::max(std::llabs(lo), std::llabs(hi))) + 1;
  return Orbit::certified(fm, theta, reach);
}

CocycleState iterate(const PotentialSpec& spec, double E, const Orbit& orbit, long n, MatrixKind kind,
                     IterateOptions opts) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "iterate needs n >= 1");
  CocycleState state;
  if (!opts.inverse) {
    auto cur = orbit.cursor(opts.offset);
    for (long k = 0; k < n; ++k) {
      const Step s = step_matrix(spec, E, cur.value(), kind, false, cur.index());
      if (s.singular) state.record_singular(cur.index());
      state.left_multiply(s.m, s.det);
      cur.advance();
    }
  } else {
    // M_n(x - n alpha)^{-1} = M(x - n alpha)^{-1} ... M(x - alpha)^{-1}
    auto cur = orbit.cursor(opts.offset - 1);
    for (long k = 0; k < n; ++k) {
      const Step s = step_matrix(spec, E, cur.value(), kind, true, cur.index());
      if (s.singular) state.record_singular(cur.index());
      state.left_multiply(s.m, s.det);
      cur.retreat();
    }
  }
  return state;
}

CocycleState iterate(const PotentialSpec& spec, double E, const Rational& theta, long n, const FrequencyModel& fm,
                     MatrixKind kind, IterateOptions opts) {
  const Orbit orbit = orbit_for(fm, theta, n, opts);
  return iterate(spec, E, orbit, n, kind, opts);
}

LyapunovEstimate lyapunov(const PotentialSpec& spec, double E, long n, const FrequencyModel& fm,
                          LyapunovMethod method, int phases, MatrixKind kind, double birkhoff_theta) {
  if (n < 100) throw Error(ErrorCode::invalid_argument, "lyapunov needs n >= 100");
  if (kind != MatrixKind::singular_a) {
    const double m = spec.mean_log_f ? *spec.mean_log_f : mean_log_f(spec);
    if (std::fabs(m) > 1e-8) {
      throw Error(ErrorCode::invalid_argument, "regular-part Lyapunov exponent needs a normalized spec");
    }
  }
  LyapunovEstimate out;
  out.E = E;
  out.n = n;
  out.method = method;
  out.kind = kind;
  if (method == LyapunovMethod::phase_average) {
    if (phases < 1) throw Error(ErrorCode::invalid_argument, "phase average needs phases >= 1");
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(phases));
    for (int k = 0; k < phases; ++k) {
      const Rational theta(BigInt(2 * k + 1), BigInt(2 * phases));
      try {
        const CocycleState st = iterate(spec, E, theta, n, fm, kind);
        values.push_back(st.log_scale() / static_cast<double>(n));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::singular_hit) throw;
        ++out.phases_skipped;
      }
    }
    if (values.empty()) throw Error(ErrorCode::singular_hit, "every phase orbit hit a zero of f");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double k = static_cast<double>(values.size());
    out.value = mean;
    out.stderr_ = values.size() > 1 ? std::sqrt(var / (k - 1.0) / k) : 0.0;
    out.phases_used = static_cast<int>(values.size());
  } else {
    const Rational theta = exact_rational(birkhoff_theta);
    const Orbit orbit = orbit_for(fm, theta, n);
    CocycleState st;
    auto cur = orbit.cursor(0);
    double half = 0.0;
    const long n_half = n / 2;
    for (long k = 0; k < n; ++k) {
      const FGV fgv = eval_fgv(spec, cur.value());
      Mat2 m;
      if (kind == MatrixKind::singular_a) {
        if (fgv.singular) throw Error(ErrorCode::singular_hit, "Birkhoff orbit hit a zero of f", cur.index());
        m = {E - fgv.v, -1.0, 1.0, 0.0};
      } else if (kind == MatrixKind::regular_d) {
        m = {E * fgv.f - fgv.g, -fgv.f, fgv.f, 0.0};
      } else {
        m = {0.0, fgv.f, -fgv.f, E * fgv.f - fgv.g};
      }
      st.left_multiply(m);
      cur.advance();
      if (k + 1 == n_half) half = st.log_scale() / static_cast<double>(n_half);
    }
    out.value = st.log_scale() / static_cast<double>(n);
    out.stderr_ = std::fabs(out.value - half);
    out.phases_used = 1;
  }
  return out;
}

GrowthEnvelopeReport growth_envelope_check(const PotentialSpec& spec, double E, const FrequencyModel& fm,
                                           const Rational& theta, std::size_t scale_n, double eps, double L,
                                           GrowthEnvelopeOptions opts) {
  if (!(eps > 0)) throw Error(ErrorCode::invalid_argument, "eps must be positive");
  if (scale_n > fm.depth()) throw Error(ErrorCode::insufficient_depth, "scale beyond model depth");
  if (fm.q(scale_n) > BigInt(10'000'000)) {
    throw Error(ErrorCode::scale_uncertified, "scale too large for direct products");
  }
  const long qn = static_cast<long>(fm.q(scale_n));
  GrowthEnvelopeReport rep;
  rep.q_n = static_cast<double>(qn);
  rep.eps = eps;
  rep.L = L;
  rep.Lambda = L + 2.0 * eps;
  const double lim = eps * static_cast<double>(qn) / 10.0;
  std::int64_t M = opts.m_max;
  if (lim < std::log(static_cast<double>(opts.m_max))) M = static_cast<std::int64_t>(std::floor(std::exp(lim)));
  rep.m_range = M;
  std::vector<std::int64_t> shifts;
  if (2 * M + 1 <= opts.m_samples) {
    for (std::int64_t m = -M; m <= M; ++m) shifts.push_back(m);
  } else {
    const int k = std::max(opts.m_samples, 3);
    for (int i = 0; i < k; ++i) {
      shifts.push_back(-M + static_cast<std::int64_t>(std::llround(static_cast<double>(i) * 2.0 * static_cast<double>(M) /
                                                                     static_cast<double>(k - 1))));
    }
    shifts.push_back(0);
    std::sort(shifts.begin(), shifts.end());
    shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());
  }
  const Orbit orbit = Orbit::certified(fm, theta, static_cast<std::uint64_t>(M + qn + 1));
  const long r_min = std::max(1L, (qn + 1) / 2);
  rep.max_A_rate = -std::numeric_limits<double>::infinity();
  rep.max_D_rate = -std::numeric_limits<double>::infinity();
  rep.log_C_empirical = -std::numeric_limits<double>::infinity();
  for (std::int64_t m : shifts) {
    double a_rate = -std::numeric_limits<double>::infinity();
    bool hit = false;
    {
      CocycleState st;
      auto cur = orbit.cursor(m);
      for (long r = 1; r <= qn; ++r) {
        const FGV fgv = eval_fgv(spec, cur.value());
        if (fgv.singular) {
          hit = true;
          break;
        }
        st.left_multiply({E - fgv.v, -1.0, 1.0, 0.0}, 1.0);
        a_rate = std::max(a_rate, st.log_scale() / static_cast<double>(qn));
        cur.advance();
      }
    }
    if (hit) {
      ++rep.singular_excluded;
      continue;
    }
    ++rep.m_sampled;
    rep.max_A_rate = std::max(rep.max_A_rate, a_rate);
    CocycleState st;
    auto cur = orbit.cursor(m);
    for (long r = 1; r <= qn; ++r) {
      const FGV fgv = eval_fgv(spec, cur.value());
      st.left_multiply({E * fgv.f - fgv.g, -fgv.f, fgv.f, 0.0});
      const double ls = st.log_scale();
      rep.log_C_empirical = std::max(rep.log_C_empirical, ls - static_cast<double>(r) * (L + eps));
      if (r >= r_min) rep.max_D_rate = std::max(rep.max_D_rate, ls / static_cast<double>(r));
      cur.advance();
    }
  }
  rep.margin_A = rep.Lambda - rep.max_A_rate;
  rep.margin_D = (L + eps) - rep.max_D_rate;
  rep.pass_A = rep.m_sampled > 0 && rep.margin_A > 0.0;
  rep.pass_D = rep.m_sampled > 0 && rep.margin_D >= 0.0;
  return rep;
}

}  // namespace quasispec
