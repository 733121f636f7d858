#pragma once

#include "core/diophantine.hpp"
#include "core/mat2.hpp"
#include "core/orbit.hpp"
#include "core/potential.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace quasispec {

enum class MatrixKind {
  singular_a,         // A = [[E - g/f, -1], [1, 0]], det 1
  regular_d,          // D = f A = [[E f - g, -f], [f, 0]], det f^2
  inverse_regular_f,  // F = f A^{-1} = [[0, f], [-f, E f - g]], det f^2
};

struct TransferMatrix {
  Mat2 m;
  MatrixKind kind;
};

/// Throws singular_hit when theta lies in the guard tube around a zero of f.
TransferMatrix transfer_at(const PotentialSpec& spec, double E, double theta);
TransferMatrix regular_at(const PotentialSpec& spec, double E, double theta);
TransferMatrix inverse_regular_at(const PotentialSpec& spec, double E, double theta);

/// Product of 2x2 matrices kept as Q R with Q orthogonal and R upper
/// triangular, the diagonal of R carried in log form. The determinant is
/// therefore tracked in log scale independently of the norm, and products of
/// any length stay finite.
class CocycleState {
 public:
  CocycleState() = default;

  /// this <- m * this, where det_m is det(m) evaluated from m's own entries.
  void left_multiply(const Mat2& m, double det_m);
  void left_multiply(const Mat2& m) { left_multiply(m, m.det()); }

  /// Product divided by its operator norm.
  Mat2 mat() const;
  /// ln of the operator norm of the product.
  double log_scale() const;
  /// ln |det| of the product.
  double log_abs_det() const { return log_r11_ + log_r22_; }
  /// Product applied to v: returns (unit direction, ln |P v|).
  std::pair<Vec2, double> apply(const Vec2& v) const;
  /// exp(log_scale) * mat(); overflows for long hyperbolic products.
  Mat2 unnormalized() const { return mat().scaled(std::exp(log_scale())); }

  long steps() const { return steps_; }
  const std::vector<std::int64_t>& singular_hits() const { return singular_hits_; }
  void record_singular(std::int64_t j) { singular_hits_.push_back(j); }

 private:
  Mat2 q_ = Mat2::identity();
  double ra_ = 1.0, rb_ = 0.0, rd_ = 1.0;  // R / e^s, max entry magnitude 1
  double s_ = 0.0;
  double log_r11_ = 0.0, log_r22_ = 0.0;
  long steps_ = 0;
  std::vector<std::int64_t> singular_hits_;
};

struct IterateOptions {
  /// Start the orbit at theta + offset * alpha.
  std::int64_t offset = 0;
  /// Produce M_{-n}(x) = M_n(x - n alpha)^{-1} instead of M_n(x).
  bool inverse = false;
};

/// M_n(x) = M(x + (n-1) alpha) ... M(x) over the exact orbit. Kind A aborts
/// with singular_hit (index = orbit step j); kinds D and F pass through zeros.
CocycleState iterate(const PotentialSpec& spec, double E, const Orbit& orbit, long n, MatrixKind kind,
                     IterateOptions opts = {});
CocycleState iterate(const PotentialSpec& spec, double E, const Rational& theta, long n,
                     const FrequencyModel& fm, MatrixKind kind, IterateOptions opts = {});

/// Orbit long enough for iterate(n, opts) without leaving the certified range.
Orbit orbit_for(const FrequencyModel& fm, const Rational& theta, long n, IterateOptions opts = {});

enum class LyapunovMethod { phase_average, birkhoff_single_orbit };

struct LyapunovEstimate {
  double E = 0.0;
  long n = 0;
  double value = 0.0;
  LyapunovMethod method = LyapunovMethod::phase_average;
  double stderr_ = 0.0;  // phase spread / sqrt(phases), or |L_n - L_{n/2}| for Birkhoff
  MatrixKind kind = MatrixKind::regular_d;
  int phases_used = 0;
  int phases_skipped = 0;  // singular A-orbits left out of the average
};

/// Finite-n Lyapunov exponent. For kind D the spec must be normalized
/// (mean ln|f| = 0), so that the value equals L(alpha, A).
LyapunovEstimate lyapunov(const PotentialSpec& spec, double E, long n, const FrequencyModel& fm,
                          LyapunovMethod method, int phases, MatrixKind kind = MatrixKind::regular_d,
                          double birkhoff_theta = 0.5);

struct GrowthEnvelopeOptions {
  std::int64_t m_max = 10000;   // budget cap on the shift range |m|
  int m_samples = 257;          // evenly spaced shifts including m = 0
};

struct GrowthEnvelopeReport {
  double q_n = 0.0;
  double eps = 0.0;
  double L = 0.0;
  double Lambda = 0.0;          // L + 2 eps
  std::int64_t m_range = 0;     // min(e^{eps q_n / 10}, m_max)
  int m_sampled = 0;
  int singular_excluded = 0;
  double max_A_rate = 0.0;      // max_{m, r <= q_n} ln||A_r(theta + m alpha)|| / q_n
  double max_D_rate = 0.0;      // max_{m, q_n/2 <= r <= q_n} ln||D_r|| / r
  double log_C_empirical = 0.0; // max_{m, r} ln||D_r|| - r (L + eps)
  bool pass_A = false;          // max_A_rate < Lambda
  bool pass_D = false;          // max_D_rate <= L + eps
  double margin_A = 0.0;
  double margin_D = 0.0;
};

GrowthEnvelopeReport growth_envelope_check(const PotentialSpec& normalized_spec, double E, const FrequencyModel& fm,
                                           const Rational& theta, std::size_t scale_n, double eps, double L,
                                           GrowthEnvelopeOptions opts = {});

}  // namespace quasispec
