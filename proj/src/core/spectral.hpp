#pragma once

#include "core/bigint.hpp"
#include "core/diophantine.hpp"
#include "core/potential.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace quasispec {

/// Spectral measure of delta_site for a Dirichlet truncation, or a hand-built
/// discrete measure.
struct SpectralProbe {
  long N = 0;                       // half-width; the matrix has 2N + 1 sites
  std::string boundary = "dirichlet";
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> weights;      // nonnegative, summing to 1
  double theta = 0.0;
  double micro_offset = 0.0;        // shift applied to theta to avoid a zero of f
  long site = 0;
  bool finite_volume = true;        // false for hand-built measures (no resolution floor)
  std::string spec_id;
  std::string fm_id;

  double total_weight() const;
};

struct TruncationOptions {
  long site = 0;
  /// On a singular hit, retry with theta shifted by k * 2^-40, k = 1..8.
  bool allow_micro_offset = true;
};

/// Diagonal v(theta + n alpha), n = -N..N, off-diagonals 1.
/// Throws singular_hit(site n) when no offset clears the zeros.
SpectralProbe truncate_and_diagonalize(const PotentialSpec& spec, const FrequencyModel& fm, const Rational& theta,
                                       long N, TruncationOptions opts = {});

/// Hand-built discrete measure; sorts by location and normalizes the weights.
SpectralProbe probe_from_measure(std::vector<double> locations, std::vector<double> weights);

/// 10 x the mean level spacing of the 21 eigenvalues nearest E; 0 for hand-built probes.
double epsilon_floor(const SpectralProbe& probe, double E);

/// sum_k w_k / (lambda_k - E - i eps). Throws epsilon_below_resolution under the floor.
std::complex<double> borel_transform(const SpectralProbe& probe, double E, double eps);

/// mu([E - eps, E + eps]).
double mu_interval(const SpectralProbe& probe, double E, double eps);

/// eps_hi * ratio^k for k = 0..rungs-1, ratio in (0, 1).
std::vector<double> geometric_ladder(double eps_hi, double ratio, int rungs);

/// 0.01, 0.02, ..., 0.99
std::vector<double> default_gamma_grid();

struct DimensionEstimate {
  double E = 0.0;
  std::vector<double> gamma_grid;
  std::vector<double> ladder;          // descending
  std::vector<double> probe_values;    // per gamma: min over the deepest 5 rungs of eps^{1-gamma}|M|
  std::vector<double> shallow_values;  // per gamma: min over the first 5 rungs
  double gamma_star = 0.0;
  double packing_proxy = 0.0;          // slope of ln mu(E - eps, E + eps) against ln eps
  int packing_points = 0;
};

/// gamma_star is the largest grid gamma whose deep-rung proxy does not exceed
/// its shallow-rung proxy (the cap); 0 when none qualifies.
/// Throws ladder_too_shallow below 8 rungs.
DimensionEstimate spectral_continuity_probe(const SpectralProbe& probe, double E,
                                            const std::vector<double>& gamma_grid,
                                            const std::vector<double>& ladder);

enum class EnergySampling { uniform, measure_quantile };

struct ScanOptions {
  int energies = 32;
  EnergySampling sampling = EnergySampling::measure_quantile;
  int rungs = 12;
  double ratio = 0.7071067811865476;
  long lyapunov_n = 2000;
  int lyapunov_phases = 8;
  TruncationOptions truncation;
};

struct ScanRow {
  double E = 0.0;
  double gamma_star = 0.0;
  double packing_slope = 0.0;
  long N = 0;
  double beta = 0.0;
  double L_E = 0.0;
  double Lambda = 0.0;           // L_E + 2 eps
  double denominator = 0.0;      // tau_min beta - eps / 4
};

struct DimensionScan {
  std::vector<ScanRow> rows;
  double median_gamma_star = 0.0;
  double tau_min = 0.0;
  double eps = 0.0;
  double micro_offset = 0.0;
};

/// Per-energy gamma_star over [E_lo, E_hi]. The Lyapunov exponent comes from
/// the normalized regular-part cocycle.
DimensionScan dimension_scan(const PotentialSpec& spec, const FrequencyModel& fm, const Rational& theta,
                             double E_lo, double E_hi, long N, double beta, double eps, ScanOptions opts = {});

/// Same scan on an existing probe.
DimensionScan dimension_scan(const SpectralProbe& probe, const PotentialSpec& spec, const FrequencyModel& fm,
                             double E_lo, double E_hi, double beta, double eps, const ScanOptions& opts);

struct ScanComparison {
  double median_a = 0.0;
  double median_b = 0.0;
  bool a_strictly_larger = false;
  double fraction_a_above_b = 0.0;  // over paired rows
};

ScanComparison compare(const DimensionScan& a, const DimensionScan& b);

struct C1Fit {
  double C1 = 0.0;
  double stderr_ = 0.0;
  double lo = 0.0, hi = 0.0;  // 95% interval
  int points = 0;
};

/// Least squares through the origin of 1 - gamma_star against
/// Lambda / (tau_min beta - eps / 4), over rows with a positive denominator.
C1Fit fit_c1(const std::vector<ScanRow>& rows);

double median(std::vector<double> values);

}  // namespace quasispec
