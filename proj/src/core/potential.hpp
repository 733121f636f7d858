#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace quasispec {

struct SingularFactor {
  double theta = 0.0;  // zero location in [0, 1)
  double tau = 1.0;    // exponent in (0, 1]
};

/// A registered torus function, addressed by an id such as "one",
/// "const:2.5" or "lambda_abs_sin:1.0".
struct CatalogFunction {
  std::string id;
  std::function<double(double)> fn;

  double operator()(double theta) const { return fn(theta); }
};

/// Throws ErrorCode::unknown_name.
CatalogFunction catalog_function(std::string_view id);

enum class TauMinReading {
  zeros_only,  // min over the zero exponents tau_1..tau_m
  inclusive,   // also includes the Hoelder exponent tau_0
};

/// Distance-to-zero-set below which f is treated as vanishing.
inline constexpr double kSingularGuard = 1e-12;

struct FGV {
  double f = 0.0;
  double g = 0.0;
  double v = 0.0;  // g / f; +-inf when singular
  bool singular = false;
};

/// f(theta) = scale * f~(theta) * prod |sin pi(theta - theta_l)|^tau_l and
/// g(theta) = scale * g0(theta); v = g/f is independent of scale.
struct PotentialSpec {
  std::string name;
  std::vector<SingularFactor> factors;
  CatalogFunction smooth;
  CatalogFunction g;
  double tau0 = 1.0;
  double scale = 1.0;
  TauMinReading reading = TauMinReading::inclusive;
  std::optional<double> mean_log_f;  // cached after mean_log_f/normalize_pair

  double tau_sum() const;
  double tau_min_zeros() const;      // 1.0 when there are no zeros
  double tau_min_inclusive() const;  // min(tau0, tau_min_zeros)
  double tau_min() const { return reading == TauMinReading::inclusive ? tau_min_inclusive() : tau_min_zeros(); }

  double f_tilde(double theta) const;
  double f(double theta) const;
  double g_value(double theta) const;
  /// Smallest torus distance from theta to a zero location.
  double distance_to_zeros(double theta) const;

  /// Throws invalid_argument when an invariant fails (tau ranges, smooth part
  /// not bounded away from zero on a certified grid).
  void validate() const;
};

FGV eval_fgv(const PotentialSpec& spec, double theta);

/// Integral of ln|f| over the torus via the ln|f~| - tau_sum ln 2 identity.
/// Refines (doubling) from quad_points until two successive midpoint rules
/// agree within tol. If they never do, falls back to a graded rule split at the
/// factor locations.
double mean_log_f(const PotentialSpec& spec, int quad_points = 1 << 12, double tol = 1e-11);

/// Scales f and g by b = exp(-mean ln|f|), so the result has zero mean log.
PotentialSpec normalize_pair(const PotentialSpec& spec);

struct HolderEstimate {
  double sup_norm = 0.0;
  double quotient = 0.0;  // max |f(x) - f(y)| / |x - y|^tau0 over the grid pairs
  double value = 0.0;     // sup_norm + quotient: a lower bound for the norm
  bool diverging = false; // quotient keeps growing under grid refinement
  std::vector<double> refinements;  // quotient at grid, 4 grid, 16 grid
};

/// Pairs are (i/grid, i/grid + d) for dyadic separations d <= 1/2, not wrapped.
HolderEstimate holder_estimate(const std::function<double(double)>& fn, double tau0, int grid);

/// Names: "example1", "example2" (param = eps, default 0.1),
/// "maryland-like" (param = lambda, default 1), "free".
PotentialSpec builtin_spec(std::string_view name, std::optional<double> param = std::nullopt);
std::vector<std::string> builtin_names();
/// Every builtin with its default parameter, keyed by name.
std::map<std::string, PotentialSpec> builtin_specs();

}  // namespace quasispec
