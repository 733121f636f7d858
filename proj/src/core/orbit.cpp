#include "core/orbit.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cmath>

namespace quasispec {

namespace {

unsigned __int128 to_u128(const BigInt& x) {
  unsigned __int128 out = 0;
  BigInt t = x;
  const BigInt mask = (BigInt(1) << 64) - 1;
  const unsigned long long lo = static_cast<unsigned long long>(BigInt(t & mask));
  t >>= 64;
  const unsigned long long hi = static_cast<unsigned long long>(t);
  out = (static_cast<unsigned __int128>(hi) << 64) | lo;
  return out;
}

BigInt mod_pos(const BigInt& x, const BigInt& m) {
  BigInt r = x % m;
  if (r < 0) r += m;
  return r;
}

}  // namespace

Orbit::Orbit(const FrequencyModel& fm, const Rational& theta, std::size_t convergent_index)
    : fm_(fm), theta_(frac(theta)), index_(convergent_index) {
  if (convergent_index > fm.depth()) {
    throw Error(ErrorCode::scale_uncertified, "orbit convergent index beyond model depth");
  }
  a_ = numerator(theta_);
  b_ = denominator(theta_);
  const BigInt& q = fm.q(index_);
  const BigInt& p = fm.p(index_);
  modulus_ = b_ * q;
  step_ = mod_pos(p * b_, modulus_);
  base_ = mod_pos(a_ * q, modulus_);
}

Orbit Orbit::certified(const FrequencyModel& fm, const Rational& theta, std::uint64_t max_abs_j) {
  const double need = std::log(static_cast<double>(std::max<std::uint64_t>(max_abs_j, 1))) + 62.0 * std::log(2.0);
  const BigInt J(max_abs_j);
  std::optional<std::size_t> covering;
  for (std::size_t N = 1; N <= fm.depth(); ++N) {
    if (fm.q(N) < J) continue;
    covering = N;
    if (N + 1 <= fm.depth() && fm.log_q(N) + fm.log_q(N + 1) >= need) return Orbit(fm, theta, N);
  }
  if (!covering) {
    throw Error(ErrorCode::scale_uncertified, "no stored convergent covers the requested orbit length");
  }
  return Orbit(fm, theta, fm.depth());
}

BigInt Orbit::residue(std::int64_t j) const {
  return mod_pos(base_ + BigInt(j) * step_, modulus_);
}

double Orbit::point(std::int64_t j) const { return ratio_to_double(residue(j), modulus_); }

double Orbit::signed_shift(std::size_t n) const {
  // q_n * p_N / q_N - p_n
  const BigInt num = fm_.q(n) * fm_.p(index_) - fm_.p(n) * fm_.q(index_);
  const BigInt& den = fm_.q(index_);
  if (num == 0) return 0.0;
  const double mag = ratio_to_double(num < 0 ? BigInt(-num) : num, den);
  return num < 0 ? -mag : mag;
}

double Orbit::error_bound(std::int64_t j) const {
  if (index_ + 1 > fm_.depth() || j == 0) return 0.0;
  const double lj = std::log(std::fabs(static_cast<double>(j)));
  return std::exp(lj - fm_.log_q(index_) - fm_.log_q(index_ + 1));
}

Orbit::Cursor::Cursor(const Orbit& orbit, std::int64_t j0) : j_(j0) {
  small_ = orbit.modulus_ < BigInt(1) << 125;
  const BigInt r = orbit.residue(j0);
  if (small_) {
    r_small_ = to_u128(r);
    m_small_ = to_u128(orbit.modulus_);
    step_small_ = to_u128(orbit.step_);
  } else {
    r_big_ = r;
    m_big_ = orbit.modulus_;
    step_big_ = orbit.step_;
  }
}

double Orbit::Cursor::value() const {
  if (small_) return static_cast<double>(r_small_) / static_cast<double>(m_small_);
  return ratio_to_double(r_big_, m_big_);
}

double Orbit::Cursor::torus_distance() const {
  if (small_) {
    const auto d = std::min(r_small_, m_small_ - r_small_);
    return static_cast<double>(d) / static_cast<double>(m_small_);
  }
  const BigInt d = std::min(r_big_, BigInt(m_big_ - r_big_));
  return ratio_to_double(d, m_big_);
}

void Orbit::Cursor::advance() {
  ++j_;
  if (small_) {
    r_small_ += step_small_;
    if (r_small_ >= m_small_) r_small_ -= m_small_;
  } else {
    r_big_ += step_big_;
    if (r_big_ >= m_big_) r_big_ -= m_big_;
  }
}

void Orbit::Cursor::retreat() {
  --j_;
  if (small_) {
    r_small_ = r_small_ >= step_small_ ? r_small_ - step_small_ : r_small_ + m_small_ - step_small_;
  } else {
    r_big_ -= step_big_;
    if (r_big_ < 0) r_big_ += m_big_;
  }
}

bool Orbit::Cursor::nearer_to_integer_than(const Cursor& other) const {
  // distances min(r, M - r); both cursors share the modulus
  if (small_ && other.small_) {
    const auto d1 = std::min(r_small_, m_small_ - r_small_);
    const auto d2 = std::min(other.r_small_, other.m_small_ - other.r_small_);
    if (m_small_ == other.m_small_) return d1 < d2;
    // cross-multiply in big arithmetic when moduli differ
  }
  BigInt r1 = small_ ? BigInt(0) : r_big_;
  BigInt m1 = small_ ? BigInt(0) : m_big_;
  BigInt r2 = other.small_ ? BigInt(0) : other.r_big_;
  BigInt m2 = other.small_ ? BigInt(0) : other.m_big_;
  auto from_u128 = [](unsigned __int128 v) {
    BigInt out = static_cast<unsigned long long>(v >> 64);
    out <<= 64;
    out += static_cast<unsigned long long>(v & ~0ULL);
    return out;
  };
  if (small_) {
    r1 = from_u128(r_small_);
    m1 = from_u128(m_small_);
  }
  if (other.small_) {
    r2 = from_u128(other.r_small_);
    m2 = from_u128(other.m_small_);
  }
  const BigInt d1 = std::min(r1, BigInt(m1 - r1));
  const BigInt d2 = std::min(r2, BigInt(m2 - r2));
  return d1 * m2 < d2 * m1;
}

}  // namespace quasispec
