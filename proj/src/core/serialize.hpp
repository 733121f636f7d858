#pragma once

#include "core/cocycle.hpp"
#include "core/diophantine.hpp"
#include "core/gordon.hpp"
#include "core/potential.hpp"
#include "core/spectral.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace quasispec {

using nlohmann::json;

/// Finite numbers as JSON numbers; inf, -inf and NaN as sentinel strings.
json json_number(double x);
/// Inverse of json_number; accepts plain numbers and the sentinels.
double number_from_json(const json& j);

json to_json(const FrequencyModel& fm);
/// {"coefficients": [...], "depth": k}; entries may be integers or decimal strings.
FrequencyModel frequency_from_json(const json& j);

json to_json(const PotentialSpec& spec);
/// A builtin name ("maryland-like", optionally "maryland-like:2"), or
/// {"factors": [{"theta", "tau"}], "smooth": id, "g": id, "tau0": x}.
PotentialSpec potential_from_json(const json& j);

json to_json(const DeltaEstimate& d);
json to_json(const GordonReport& r);
json to_json(const KeyInequalities& k);

/// {"header": {N, theta, spec-id, fm-id, ...}, "pairs": [[eigenvalue, weight], ...]}
json probe_to_json(const SpectralProbe& p);
SpectralProbe probe_from_json(const json& j);

struct LyapunovRow {
  double E = 0.0;
  long n = 0;
  double L_A = 0.0;
  double L_D = 0.0;
  double stderr_ = 0.0;
  std::string method;
};

std::string lyapunov_csv(const std::vector<LyapunovRow>& rows);
std::string dimension_scan_csv(const std::vector<ScanRow>& rows);

/// Writes to a sibling temporary file and renames it over path; creates
/// missing parent directories. Throws ErrorCode::io.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace quasispec
