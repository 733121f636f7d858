#pragma once

#include "core/bigint.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace quasispec {

struct Convergent {
  BigInt p;
  BigInt q;
};

/// Closed rational interval [lo, hi] known to contain a real number.
struct RealInterval {
  Rational lo;
  Rational hi;

  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool is_point() const { return lo == hi; }

  /// A double is treated as carrying half an ulp of uncertainty, widened to
  /// 2^-precision_bits when that is coarser.
  static RealInterval from_double(double x, int precision_bits);
  /// Decimal literal such as "0.6180339887"; uncertainty is half a unit in
  /// the last written digit.
  static RealInterval from_decimal(std::string_view text, int precision_bits);
  /// (a + b*sqrt(c)) / d with an outward-rounded integer square root.
  static RealInterval from_quadratic(long a, long b, long c, long d, int precision_bits);
  /// Accepts "golden", "sqrt2-1", "quadratic:a,b,c,d" or a decimal literal.
  static RealInterval parse(std::string_view text, int precision_bits);
};

enum class FrequencySource { expanded_from_real, explicit_coefficients };

enum class Truncation {
  none,
  precision,  // the enclosing interval no longer determines the next coefficient
  rational,   // the remainder vanished: the input is rational
};

/// An irrational frequency in (0, 1) held as its continued-fraction
/// coefficient stream a_1, a_2, ... (a_0 = 0) with exact convergents.
/// p_n q_{n-1} - p_{n-1} q_n = (-1)^{n-1} and q_0 = 1, q_1 = a_1 hold for
/// every stored index. Cheap to copy; immutable after construction.
class FrequencyModel {
 public:
  static FrequencyModel from_coefficients(std::vector<BigInt> coefficients,
                                          FrequencySource source = FrequencySource::explicit_coefficients);

  std::span<const BigInt> coefficients() const { return data_->coefficients; }
  /// Entries n = 0..depth with (p_0, q_0) = (0, 1).
  std::span<const Convergent> convergents() const { return data_->convergents; }
  std::size_t depth() const { return data_->coefficients.size(); }
  const BigInt& p(std::size_t n) const { return data_->convergents.at(n).p; }
  const BigInt& q(std::size_t n) const { return data_->convergents.at(n).q; }
  double log_q(std::size_t n) const { return data_->log_q.at(n); }
  Rational convergent_value(std::size_t n) const;

  FrequencySource source() const { return data_->source; }
  Truncation truncation() const { return data_->truncation; }
  /// 1-based index of the first coefficient clamped by a size cap.
  std::optional<std::size_t> first_capped_index() const { return data_->first_capped; }
  const std::optional<RealInterval>& alpha_interval() const { return data_->alpha; }
  const std::string& label() const { return data_->label; }

  /// p_depth / q_depth rounded to double.
  double alpha() const;

  FrequencyModel with_label(std::string label) const;
  FrequencyModel with_truncation(Truncation t) const;
  FrequencyModel with_alpha(RealInterval alpha) const;
  FrequencyModel with_first_capped(std::optional<std::size_t> index) const;

 private:
  struct Data {
    std::vector<BigInt> coefficients;
    std::vector<Convergent> convergents;
    std::vector<double> log_q;
    FrequencySource source = FrequencySource::explicit_coefficients;
    Truncation truncation = Truncation::none;
    std::optional<std::size_t> first_capped;
    std::optional<RealInterval> alpha;
    std::string label;
  };
  explicit FrequencyModel(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  std::shared_ptr<const Data> data_;
};

/// Convergents (p_n, q_n), n = 0..size, of [0; a_1, ..., a_k].
std::vector<Convergent> convergents(std::span<const BigInt> coefficients);

/// Certified expansion: coefficient k is emitted only when both ends of the
/// remainder interval agree on it. Stops early with a truncation flag.
FrequencyModel cf_expand(const RealInterval& x, std::size_t depth);
FrequencyModel cf_expand(double x, std::size_t depth, int precision_bits);

/// True when p_{2k}/q_{2k} < alpha < p_{2k+1}/q_{2k+1} is certified for all
/// stored n using the model's enclosing interval.
bool convergents_alternate(const FrequencyModel& fm);

struct BetaEstimate {
  std::vector<std::pair<std::size_t, double>> per_n;  // (n, ln q_{n+1} / q_n)
  double running_sup_tail = 0.0;
  std::size_t depth = 0;
};

/// ln q_{n+1} / q_n for n in [n_min, n_max] (n_max defaults to depth - 1).
BetaEstimate beta_estimate(const FrequencyModel& fm, std::size_t n_min,
                           std::optional<std::size_t> n_max = std::nullopt);

/// a_{n+1} = round(e^{c q_n} / q_n), clamped to [1, 2^cap_bits].
FrequencyModel liouville_frequency(double c, std::size_t depth, unsigned cap_bits);

/// Largest n whose q_{n+1} involves no capped coefficient (at most depth - 1);
/// 0 when even q_1 is capped.
std::size_t deepest_honest_scale(const FrequencyModel& fm);

/// ln q_{n+1}/q_n for large q without overflow.
double log_ratio_rate(double log_q_next, double log_q_n);

double torus_norm(double x);

/// theta + j * p_N/q_N mod 1 with N = scale_n + 1, exactly, then rounded.
double orbit_point(const FrequencyModel& fm, const Rational& theta, const BigInt& j,
                   std::size_t scale_n);

}  // namespace quasispec
