#include "core/diophantine.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace quasispec {

namespace {

Rational pow2_rational(int exponent) {
  BigInt one = 1;
  if (exponent >= 0) return Rational(one << exponent);
  return Rational(one, BigInt(1) << (-exponent));
}

long parse_long(std::string_view s) {
  std::string t(s);
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(t, &pos);
  } catch (const std::exception&) {
    throw Error(ErrorCode::invalid_argument, "malformed integer in quadratic form: " + t);
  }
  if (pos != t.size()) throw Error(ErrorCode::invalid_argument, "malformed integer in quadratic form: " + t);
  return v;
}

}  // namespace

RealInterval RealInterval::from_double(double x, int precision_bits) {
  Rational center = exact_rational(x);
  int exp2 = 0;
  std::frexp(x, &exp2);
  // half ulp of a double with binary exponent exp2
  int radius_exp = exp2 - 54;
  radius_exp = std::max(radius_exp, -precision_bits);
  Rational r = pow2_rational(radius_exp);
  return {center - r, center + r};
}

RealInterval RealInterval::from_decimal(std::string_view text, int precision_bits) {
  std::string s(text);
  const auto dot = s.find('.');
  std::string digits = s;
  std::size_t frac_digits = 0;
  if (dot != std::string::npos) {
    frac_digits = s.size() - dot - 1;
    digits = s.substr(0, dot) + s.substr(dot + 1);
  }
  if (digits.empty()) throw Error(ErrorCode::invalid_argument, "empty decimal literal");
  BigInt mant = parse_bigint(digits);
  BigInt scale = 1;
  for (std::size_t i = 0; i < frac_digits; ++i) scale *= 10;
  Rational center(mant, scale);
  Rational r(BigInt(1), scale * 2);
  Rational floor_r = pow2_rational(-precision_bits);
  if (floor_r > r) r = floor_r;
  return {center - r, center + r};
}

RealInterval RealInterval::from_quadratic(long a, long b, long c, long d, int precision_bits) {
  if (c < 0 || d == 0) throw Error(ErrorCode::invalid_argument, "quadratic form needs c >= 0, d != 0");
  if (precision_bits < 8) throw Error(ErrorCode::invalid_argument, "precision_bits too small");
  BigInt scaled = BigInt(c) << (2 * precision_bits);
  BigInt s = isqrt(scaled);
  Rational denom = Rational(BigInt(1) << precision_bits);
  Rational root_lo = Rational(s) / denom;
  Rational root_hi = (s * s == scaled) ? root_lo : Rational(s + 1) / denom;
  Rational t1 = (Rational(a) + Rational(b) * root_lo) / Rational(d);
  Rational t2 = (Rational(a) + Rational(b) * root_hi) / Rational(d);
  if (t1 > t2) std::swap(t1, t2);
  return {t1, t2};
}

RealInterval RealInterval::parse(std::string_view text, int precision_bits) {
  if (text == "golden") return from_quadratic(-1, 1, 5, 2, precision_bits);
  if (text == "sqrt2-1" || text == "silver") return from_quadratic(-1, 1, 2, 1, precision_bits);
  constexpr std::string_view quad = "quadratic:";
  if (text.substr(0, quad.size()) == quad) {
    std::string_view rest = text.substr(quad.size());
    long v[4];
    for (int i = 0; i < 4; ++i) {
      const auto comma = rest.find(',');
      if ((i < 3) == (comma == std::string_view::npos)) {
        throw Error(ErrorCode::invalid_argument, "quadratic form expects four integers a,b,c,d");
      }
      v[i] = parse_long(rest.substr(0, comma));
      if (comma != std::string_view::npos) rest = rest.substr(comma + 1);
    }
    return from_quadratic(v[0], v[1], v[2], v[3], precision_bits);
  }
  return from_decimal(text, precision_bits);
}

std::vector<Convergent> convergents(std::span<const BigInt> coefficients) {
  std::vector<Convergent> out;
  out.reserve(coefficients.size() + 1);
  BigInt p_prev = 1, q_prev = 0;  // (p_{-1}, q_{-1})
  BigInt p = 0, q = 1;            // (p_0, q_0)
  out.push_back({p, q});
  for (const BigInt& a : coefficients) {
    if (a < 1) throw Error(ErrorCode::invalid_argument, "continued-fraction coefficients must be >= 1");
    BigInt p_next = a * p + p_prev;
    BigInt q_next = a * q + q_prev;
    p_prev = std::move(p);
    q_prev = std::move(q);
    p = std::move(p_next);
    q = std::move(q_next);
    out.push_back({p, q});
  }
  return out;
}

FrequencyModel FrequencyModel::from_coefficients(std::vector<BigInt> coefficients, FrequencySource source) {
  auto d = std::make_shared<Data>();
  d->convergents = quasispec::convergents(coefficients);
  d->coefficients = std::move(coefficients);
  d->log_q.reserve(d->convergents.size());
  for (const auto& c : d->convergents) d->log_q.push_back(log_abs(c.q));
  d->source = source;
  return FrequencyModel(std::move(d));
}

Rational FrequencyModel::convergent_value(std::size_t n) const {
  const auto& c = data_->convergents.at(n);
  return Rational(c.p, c.q);
}

double FrequencyModel::alpha() const {
  const auto& c = data_->convergents.back();
  return ratio_to_double(c.p, c.q);
}

FrequencyModel FrequencyModel::with_label(std::string label) const {
  auto d = std::make_shared<Data>(*data_);
  d->label = std::move(label);
  return FrequencyModel(std::move(d));
}

FrequencyModel FrequencyModel::with_truncation(Truncation t) const {
  auto d = std::make_shared<Data>(*data_);
  d->truncation = t;
  return FrequencyModel(std::move(d));
}

FrequencyModel FrequencyModel::with_alpha(RealInterval alpha) const {
  auto d = std::make_shared<Data>(*data_);
  d->alpha = std::move(alpha);
  return FrequencyModel(std::move(d));
}

FrequencyModel FrequencyModel::with_first_capped(std::optional<std::size_t> index) const {
  auto d = std::make_shared<Data>(*data_);
  d->first_capped = index;
  return FrequencyModel(std::move(d));
}

FrequencyModel cf_expand(const RealInterval& x, std::size_t depth) {
  if (depth < 1) throw Error(ErrorCode::invalid_argument, "cf_expand needs depth >= 1");
  if (!(x.lo > 0 && x.hi < 1) || x.lo > x.hi) {
    throw Error(ErrorCode::invalid_argument, "cf_expand expects an interval inside (0, 1)");
  }
  std::vector<BigInt> coeffs;
  coeffs.reserve(depth);
  Rational lo = x.lo, hi = x.hi;
  Truncation stop = Truncation::none;
  while (coeffs.size() < depth) {
    if (lo == 0 && hi == 0) {
      stop = Truncation::rational;
      break;
    }
    if (lo <= 0) {
      stop = Truncation::precision;
      break;
    }
    Rational inv_hi = Rational(1) / hi;
    Rational inv_lo = Rational(1) / lo;
    BigInt a = floor_of(inv_hi);
    if (floor_of(inv_lo) != a) {
      stop = Truncation::precision;
      break;
    }
    coeffs.push_back(a);
    Rational next_lo = inv_hi - Rational(a);
    Rational next_hi = inv_lo - Rational(a);
    lo = std::move(next_lo);
    hi = std::move(next_hi);
  }
  if (coeffs.empty()) {
    throw Error(ErrorCode::precision_exhausted, "interval too wide to certify the first coefficient");
  }
  return FrequencyModel::from_coefficients(std::move(coeffs), FrequencySource::expanded_from_real)
      .with_truncation(stop)
      .with_alpha(x);
}

FrequencyModel cf_expand(double x, std::size_t depth, int precision_bits) {
  return cf_expand(RealInterval::from_double(x, precision_bits), depth);
}

bool convergents_alternate(const FrequencyModel& fm) {
  const auto& alpha = fm.alpha_interval();
  if (!alpha) return false;
  for (std::size_t n = 0; n <= fm.depth(); ++n) {
    Rational v = fm.convergent_value(n);
    if (n % 2 == 0) {
      if (!(v < alpha->lo)) {
        // the last convergent of a rational input may coincide with alpha
        if (!(fm.truncation() == Truncation::rational && n == fm.depth() && alpha->contains(v))) return false;
      }
    } else {
      if (!(v > alpha->hi)) {
        if (!(fm.truncation() == Truncation::rational && n == fm.depth() && alpha->contains(v))) return false;
      }
    }
  }
  return true;
}

double log_ratio_rate(double log_q_next, double log_q_n) {
  if (log_q_next <= 0) return 0.0;
  return std::exp(std::log(log_q_next) - log_q_n);
}

BetaEstimate beta_estimate(const FrequencyModel& fm, std::size_t n_min, std::optional<std::size_t> n_max) {
  if (fm.depth() < n_min + 1) {
    throw Error(ErrorCode::insufficient_depth, "beta_estimate needs at least n_min + 2 convergents");
  }
  std::size_t last = fm.depth() - 1;
  if (n_max) last = std::min(last, *n_max);
  BetaEstimate out;
  out.depth = fm.depth();
  out.running_sup_tail = -std::numeric_limits<double>::infinity();
  for (std::size_t n = n_min; n <= last; ++n) {
    const double v = log_ratio_rate(fm.log_q(n + 1), fm.log_q(n));
    out.per_n.emplace_back(n, v);
    out.running_sup_tail = std::max(out.running_sup_tail, v);
  }
  return out;
}

FrequencyModel liouville_frequency(double c, std::size_t depth, unsigned cap_bits) {
  if (!(c > 0) || !std::isfinite(c)) throw Error(ErrorCode::invalid_argument, "liouville_frequency needs c > 0");
  if (depth < 1) throw Error(ErrorCode::invalid_argument, "liouville_frequency needs depth >= 1");
  if (cap_bits < 1) throw Error(ErrorCode::invalid_argument, "cap_bits must be >= 1");
  const double ln2 = std::log(2.0);
  std::vector<BigInt> coeffs;
  coeffs.reserve(depth);
  BigInt q_prev = 0, q = 1;
  std::optional<std::size_t> first_capped;
  for (std::size_t k = 1; k <= depth; ++k) {
    const double log_q = log_abs(q);
    const double qd = std::exp(log_q);  // inf once q exceeds double range
    const double exponent = c * qd - log_q;  // ln(e^{c q}/q)
    BigInt a;
    if (!std::isfinite(exponent) || exponent / ln2 > static_cast<double>(cap_bits)) {
      a = BigInt(1) << cap_bits;
      if (!first_capped) first_capped = k;
    } else if (exponent < 50.0) {
      const double v = std::round(std::exp(exponent));
      a = BigInt(static_cast<unsigned long long>(std::max(v, 1.0)));
    } else {
      // e^exponent = 2^t; keep 53 significant bits and shift.
      const double t = exponent / ln2;
      const long shift = static_cast<long>(std::floor(t)) - 52;
      const double mant = std::round(std::exp2(t - static_cast<double>(shift)));
      a = BigInt(static_cast<unsigned long long>(mant)) << shift;
    }
    coeffs.push_back(a);
    BigInt q_next = a * q + q_prev;
    q_prev = std::move(q);
    q = std::move(q_next);
  }
  std::ostringstream label;
  label << "liouville(c=" << c << ")";
  return FrequencyModel::from_coefficients(std::move(coeffs))
      .with_first_capped(first_capped)
      .with_label(label.str());
}

std::size_t deepest_honest_scale(const FrequencyModel& fm) {
  std::size_t n = fm.depth() == 0 ? 0 : fm.depth() - 1;
  // a_k capped spoils q_k onwards, so q_{n+1} is honest for n <= k - 2
  if (const auto k = fm.first_capped_index()) n = std::min(n, *k >= 2 ? *k - 2 : std::size_t{0});
  return n;
}

double torus_norm(double x) {
  const double r = x - std::round(x);
  return std::fabs(r);
}

double orbit_point(const FrequencyModel& fm, const Rational& theta, const BigInt& j, std::size_t scale_n) {
  const std::size_t N = scale_n + 1;
  if (fm.depth() < N) throw Error(ErrorCode::scale_uncertified, "frequency model too shallow for requested scale");
  BigInt absj = j < 0 ? BigInt(-j) : j;
  if (absj > fm.q(N)) {
    throw Error(ErrorCode::scale_uncertified, "orbit index exceeds the certified range |j| <= q_{scale+1}");
  }
  Rational x = theta + Rational(j) * fm.convergent_value(N);
  return to_double(frac(x));
}

}  // namespace quasispec
