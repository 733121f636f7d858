#pragma once

#include "core/bigint.hpp"
#include "core/cocycle.hpp"
#include "core/diophantine.hpp"
#include "core/potential.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace quasispec {

struct DeltaEstimate {
  /// (n, value_n) with value_n = [sum_l tau_l ln||q_n(theta - theta_l)|| + tau_min ln q_{n+1}] / q_n.
  std::vector<std::pair<std::size_t, double>> per_n;
  /// Scales where some ||q_n(theta - theta_l)|| vanished; value_n is -inf there.
  std::vector<std::size_t> degenerate;
  double running_sup_tail = 0.0;
  std::size_t tail_from = 0;  // first n of the trailing window
  double eps = 0.0;
  std::vector<std::size_t> selected_subsequence;
  double tau_min = 0.0;

  /// value_n for a stored scale, or nullopt.
  std::optional<double> value_at(std::size_t n) const;
};

/// Scales n = 1..depth; the trailing window starts at tail_from (default
/// max(1, depth / 2)). Throws theta_in_singular_tube when theta sits within
/// kSingularGuard of a zero, insufficient_depth when q_{depth+1} is missing.
DeltaEstimate delta_index(const FrequencyModel& fm, const Rational& theta, const PotentialSpec& spec,
                          std::size_t depth, double eps, std::optional<std::size_t> tail_from = std::nullopt);

struct ClosestReturn {
  std::int64_t j = 0;
  double distance = 0.0;  // ||theta - theta_l + j alpha||
  double sin_value = 0.0; // |sin pi(theta - theta_l + j alpha)|
};

/// Exhaustive scan of 0 <= j < q_n per zero; ties go to the smallest j.
std::vector<ClosestReturn> closest_returns(const FrequencyModel& fm, const Rational& theta,
                                           const PotentialSpec& spec, std::size_t scale_n);

struct AJ09Diagnostic {
  std::int64_t j0 = 0;
  double sum = 0.0;    // sum_{j != j0} ln|sin pi(theta + j alpha)| + (q_n - 1) ln 2
  double C_hat = 0.0;  // |sum| / ln q_n; 0 when q_n = 1
};

/// orbit_index overrides the certified convergent used for the orbit.
AJ09Diagnostic aj09_diagnostic(const FrequencyModel& fm, const Rational& theta, std::size_t scale_n,
                               std::optional<std::size_t> orbit_index = std::nullopt);

struct KeyOptions {
  std::int64_t m_max = 10000;
  std::optional<std::size_t> orbit_index;
};

struct KeyInequalities {
  std::size_t scale_n = 0;
  double q_n = 0.0;
  double log_q_next = 0.0;
  double delta = 0.0;
  double eps = 0.0;
  bool applicable = false;      // delta > eps / 4
  bool in_subsequence = false;
  // log scale throughout
  double key1_lhs = 0.0, key1_rhs = 0.0;
  double jy1_lhs = 0.0, jy1_rhs = 0.0;
  double shifted_min = 0.0, shifted_rhs = 0.0;
  std::int64_t shifted_argmin = 0;
  std::int64_t m_range = 0;     // every |m| <= m_range was evaluated
  std::vector<AJ09Diagnostic> aj09;  // one per zero
  bool pass_key1 = false, pass_jy1 = false, pass_shifted = false;
  double margin_key1 = 0.0, margin_jy1 = 0.0, margin_shifted = 0.0;
};

/// delta is the running sup of the estimate. The spec must be normalized.
/// Throws subsequence_empty, singular_hit.
KeyInequalities key_inequalities(const FrequencyModel& fm, const Rational& theta, const PotentialSpec& spec,
                                 std::size_t scale_n, double eps, const DeltaEstimate& delta,
                                 KeyOptions opts = {});

struct RepetitionDefect {
  std::size_t scale_n = 0;
  double shift = 0.0;           // signed q_n alpha - p_n
  double log_q_next = 0.0;
  double defect_F = 0.0;        // grid sup ||F(x + q_n alpha) - F(x)||
  double defect_f = 0.0;        // grid sup |f(x + q_n alpha) - f(x)|
  double log_C_fitted = 0.0;    // ln defect_F + tau0 ln q_{n+1}
  double C_predicted = 0.0;     // ((sqrt 2 + |E|) ||f|| + ||g||), Hoelder norms
  bool holder_diverging = false;
  bool within_prediction = false;
};

RepetitionDefect repetition_defect(const PotentialSpec& spec, double E, const FrequencyModel& fm,
                                   std::size_t scale_n, int grid);

struct GordonOptions {
  std::optional<double> delta;  // defaults to value_n of the delta index at scale_n
  int sweep = 8;                // equi-angular initial vectors
  int defect_grid = 1024;
};

struct GordonPass {
  bool A1 = false;
  bool A2 = false;
  bool hypotheses = false;   // both, with c > 0
  bool conclusion = false;   // conclusion_max >= 1/4
  bool implication = false;  // hypotheses => conclusion_max >= 1/4 - 1e-6, over the sweep too
};

struct GordonReport {
  std::size_t scale_n = 0;
  BigInt qn;
  double qn1_log = 0.0;
  double E = 0.0;
  double delta_n = 0.0;
  double L = 0.0;
  double eps = 0.0;
  double repetition_defect_F = 0.0;
  double repetition_defect_f = 0.0;
  double orbit_product_lower = 0.0;  // ln prod_{0 <= j < q_n} |f(theta + j alpha)|
  double hyp_A1_log = 0.0;
  double hyp_A2_log = 0.0;
  double bound_log = 0.0;            // q_n (L - delta + 4 eps)
  double c = 0.0;                    // -(L - delta + 4 eps)
  double conclusion_max = 0.0;
  /// (1 - max(e1, e2)) / 2 from Cayley-Hamilton; conclusion_max never falls below it.
  double conclusion_floor = 0.0;
  double sweep_worst_conclusion = 0.0;
  double sweep_worst_A1_log = 0.0;
  double sweep_worst_A2_log = 0.0;
  GordonPass pass;
};

/// Throws lyapunov_missing without L, singular_hit(step) along the orbit.
GordonReport gordon_check(const PotentialSpec& spec, double E, const FrequencyModel& fm, const Rational& theta,
                          std::size_t scale_n, double eps, std::optional<double> L, Vec2 phi_init = {1.0, 0.0},
                          GordonOptions opts = {});

}  // namespace quasispec
