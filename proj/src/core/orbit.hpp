#pragma once

#include "core/bigint.hpp"
#include "core/diophantine.hpp"

#include <cstdint>

namespace quasispec {

/// Exact rotation orbit theta + j * p_N/q_N (mod 1) at a fixed convergent N.
/// Points are computed from integer residues modulo b*q_N (theta = a/b), so
/// consecutive points never accumulate floating drift.
class Orbit {
 public:
  Orbit(const FrequencyModel& fm, const Rational& theta, std::size_t convergent_index);

  /// Picks the shallowest convergent N with q_N >= max_abs_j whose rounding
  /// error |j|/(q_N q_{N+1}) stays below 2^-62, falling back to the deepest
  /// convergent that still covers max_abs_j.
  static Orbit certified(const FrequencyModel& fm, const Rational& theta, std::uint64_t max_abs_j);

  double point(std::int64_t j) const;
  const Rational& theta() const { return theta_; }
  std::size_t convergent_index() const { return index_; }
  const BigInt& modulus() const { return modulus_; }
  BigInt residue(std::int64_t j) const;
  /// Signed q_n * alpha - p_n evaluated with the orbit's rational alpha.
  double signed_shift(std::size_t n) const;
  /// |j| / (q_N q_{N+1}) when q_{N+1} is stored, else 0 (alpha is the rational itself).
  double error_bound(std::int64_t j) const;

  /// Sequential access; each step costs one modular add.
  class Cursor {
   public:
    Cursor(const Orbit& orbit, std::int64_t j0);
    std::int64_t index() const { return j_; }
    double value() const;
    /// Distance of the current point to the nearest integer.
    double torus_distance() const;
    void advance();
    void retreat();
    /// Exact comparison of distances to the nearest integer.
    bool nearer_to_integer_than(const Cursor& other) const;

   private:
    bool small_;
    std::int64_t j_;
    unsigned __int128 r_small_ = 0, m_small_ = 0, step_small_ = 0;
    BigInt r_big_, m_big_, step_big_;
  };

  Cursor cursor(std::int64_t j0) const { return Cursor(*this, j0); }

 private:
  FrequencyModel fm_;
  Rational theta_;
  std::size_t index_;
  BigInt a_, b_;       // theta = a / b
  BigInt modulus_;     // b * q_N
  BigInt step_;        // p_N * b mod modulus
  BigInt base_;        // a * q_N mod modulus
};

}  // namespace quasispec
