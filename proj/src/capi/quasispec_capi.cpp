#include "quasispec/quasispec.h"

#include "core/cocycle.hpp"
#include "core/diophantine.hpp"
#include "core/error.hpp"
#include "core/experiment.hpp"
#include "core/gordon.hpp"
#include "core/potential.hpp"
#include "core/serialize.hpp"
#include "core/spectral.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

using namespace quasispec;

struct qs_frequency {
  FrequencyModel fm;
};
struct qs_potential {
  PotentialSpec spec;
};
struct qs_probe {
  SpectralProbe probe;
};
struct qs_experiment {
  ExperimentConfig config;
};

namespace {

thread_local std::string t_error;
thread_local std::int64_t t_index = -1;

qs_status status_of(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return QS_ERR_INVALID_ARGUMENT;
    case ErrorCode::insufficient_depth: return QS_ERR_INSUFFICIENT_DEPTH;
    case ErrorCode::precision_exhausted: return QS_ERR_PRECISION_EXHAUSTED;
    case ErrorCode::scale_uncertified: return QS_ERR_SCALE_UNCERTIFIED;
    case ErrorCode::singular_hit: return QS_ERR_SINGULAR_HIT;
    case ErrorCode::theta_in_singular_tube: return QS_ERR_THETA_IN_SINGULAR_TUBE;
    case ErrorCode::quadrature_nonconvergent: return QS_ERR_QUADRATURE_NONCONVERGENT;
    case ErrorCode::unknown_name: return QS_ERR_UNKNOWN_NAME;
    case ErrorCode::epsilon_below_resolution: return QS_ERR_EPSILON_BELOW_RESOLUTION;
    case ErrorCode::ladder_too_shallow: return QS_ERR_LADDER_TOO_SHALLOW;
    case ErrorCode::subsequence_empty: return QS_ERR_SUBSEQUENCE_EMPTY;
    case ErrorCode::lyapunov_missing: return QS_ERR_LYAPUNOV_MISSING;
    case ErrorCode::cap_bound: return QS_ERR_CAP_BOUND;
    case ErrorCode::config: return QS_ERR_CONFIG;
    case ErrorCode::io: return QS_ERR_IO;
  }
  return QS_ERR_INTERNAL;
}

template <class Fn>
qs_status guard(Fn&& fn) {
  t_error.clear();
  t_index = -1;
  try {
    fn();
    return QS_OK;
  } catch (const Error& e) {
    t_error = e.what();
    t_index = e.index();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    t_error = "out of memory";
  } catch (const std::exception& e) {
    t_error = e.what();
  } catch (...) {
    t_error = "unknown failure";
  }
  return QS_ERR_INTERNAL;
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void need(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::invalid_argument, what);
}

}  // namespace

extern "C" {

const char* qs_version(void) { return QUASISPEC_VERSION; }

const char* qs_status_name(qs_status s) {
  switch (s) {
    case QS_OK: return "ok";
    case QS_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case QS_ERR_INSUFFICIENT_DEPTH: return "insufficient-depth";
    case QS_ERR_PRECISION_EXHAUSTED: return "precision-exhausted";
    case QS_ERR_SCALE_UNCERTIFIED: return "scale-uncertified";
    case QS_ERR_SINGULAR_HIT: return "singular-hit";
    case QS_ERR_THETA_IN_SINGULAR_TUBE: return "theta-in-singular-tube";
    case QS_ERR_QUADRATURE_NONCONVERGENT: return "quadrature-nonconvergent";
    case QS_ERR_UNKNOWN_NAME: return "unknown-name";
    case QS_ERR_EPSILON_BELOW_RESOLUTION: return "epsilon-below-resolution";
    case QS_ERR_LADDER_TOO_SHALLOW: return "ladder-too-shallow";
    case QS_ERR_SUBSEQUENCE_EMPTY: return "subsequence-empty";
    case QS_ERR_LYAPUNOV_MISSING: return "lyapunov-missing";
    case QS_ERR_CAP_BOUND: return "cap-bound";
    case QS_ERR_CONFIG: return "config";
    case QS_ERR_IO: return "io";
    case QS_ERR_INTERNAL: return "internal";
  }
  return "internal";
}

const char* qs_last_error(void) { return t_error.c_str(); }
int64_t qs_last_error_index(void) { return t_index; }
void qs_string_free(char* s) { std::free(s); }

qs_status qs_frequency_from_coefficients(const char* const* coefficients, size_t count, qs_frequency** out) {
  return guard([&] {
    need(out && (coefficients || count == 0), "null argument");
    std::vector<BigInt> c;
    for (size_t k = 0; k < count; ++k) {
      need(coefficients[k] != nullptr, "null coefficient");
      c.push_back(parse_bigint(coefficients[k]));
    }
    *out = new qs_frequency{FrequencyModel::from_coefficients(std::move(c))};
  });
}

qs_status qs_frequency_from_real(const char* text, size_t depth, int precision_bits, qs_frequency** out) {
  return guard([&] {
    need(text && out, "null argument");
    *out = new qs_frequency{cf_expand(RealInterval::parse(text, precision_bits), depth).with_label(text)};
  });
}

qs_status qs_frequency_liouville(double c, size_t depth, unsigned cap_bits, qs_frequency** out) {
  return guard([&] {
    need(out, "null argument");
    *out = new qs_frequency{liouville_frequency(c, depth, cap_bits)};
  });
}

void qs_frequency_free(qs_frequency* fm) { delete fm; }

size_t qs_frequency_depth(const qs_frequency* fm) { return fm ? fm->fm.depth() : 0; }

qs_status qs_frequency_log_q(const qs_frequency* fm, size_t n, double* out) {
  return guard([&] {
    need(fm && out, "null argument");
    if (n > fm->fm.depth()) throw Error(ErrorCode::insufficient_depth, "index beyond depth", static_cast<std::int64_t>(n));
    *out = fm->fm.log_q(n);
  });
}

qs_status qs_frequency_q(const qs_frequency* fm, size_t n, char** out) {
  return guard([&] {
    need(fm && out, "null argument");
    if (n > fm->fm.depth()) throw Error(ErrorCode::insufficient_depth, "index beyond depth", static_cast<std::int64_t>(n));
    *out = dup(to_decimal(fm->fm.q(n)));
  });
}

qs_status qs_frequency_p(const qs_frequency* fm, size_t n, char** out) {
  return guard([&] {
    need(fm && out, "null argument");
    if (n > fm->fm.depth()) throw Error(ErrorCode::insufficient_depth, "index beyond depth", static_cast<std::int64_t>(n));
    *out = dup(to_decimal(fm->fm.p(n)));
  });
}

qs_status qs_frequency_to_json(const qs_frequency* fm, char** out) {
  return guard([&] {
    need(fm && out, "null argument");
    *out = dup(to_json(fm->fm).dump());
  });
}

qs_status qs_frequency_beta(const qs_frequency* fm, size_t n_min, size_t n_max, double* out) {
  return guard([&] {
    need(fm && out, "null argument");
    *out = beta_estimate(fm->fm, n_min, n_max).running_sup_tail;
  });
}

qs_status qs_potential_builtin(const char* name, int has_param, double param, qs_potential** out) {
  return guard([&] {
    need(name && out, "null argument");
    std::optional<double> p;
    if (has_param) p = param;
    *out = new qs_potential{builtin_spec(name, p)};
  });
}

qs_status qs_potential_from_json(const char* text, qs_potential** out) {
  return guard([&] {
    need(text && out, "null argument");
    const json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::config, "potential is not valid JSON");
    *out = new qs_potential{potential_from_json(j)};
  });
}

void qs_potential_free(qs_potential* spec) { delete spec; }

qs_status qs_potential_eval(const qs_potential* spec, double theta, double* f, double* g, double* v, int* singular) {
  return guard([&] {
    need(spec != nullptr, "null argument");
    const FGV r = eval_fgv(spec->spec, theta);
    if (f) *f = r.f;
    if (g) *g = r.g;
    if (v) *v = r.v;
    if (singular) *singular = r.singular ? 1 : 0;
  });
}

qs_status qs_potential_mean_log_f(const qs_potential* spec, double* out) {
  return guard([&] {
    need(spec && out, "null argument");
    *out = mean_log_f(spec->spec);
  });
}

qs_status qs_potential_normalize(const qs_potential* spec, qs_potential** out) {
  return guard([&] {
    need(spec && out, "null argument");
    *out = new qs_potential{normalize_pair(spec->spec)};
  });
}

qs_status qs_potential_to_json(const qs_potential* spec, char** out) {
  return guard([&] {
    need(spec && out, "null argument");
    *out = dup(to_json(spec->spec).dump());
  });
}

double qs_random_theta(uint64_t seed) { return to_double(random_theta(seed)); }

qs_status qs_lyapunov(const qs_potential* spec, const qs_frequency* fm, double E, long n, qs_lyapunov_method method,
                      int phases, qs_matrix_kind kind, double* value, double* stderr_out) {
  return guard([&] {
    need(spec && fm && value, "null argument");
    const MatrixKind k = kind == QS_KIND_A   ? MatrixKind::singular_a
                         : kind == QS_KIND_D ? MatrixKind::regular_d
                                             : MatrixKind::inverse_regular_f;
    const auto m = method == QS_BIRKHOFF ? LyapunovMethod::birkhoff_single_orbit : LyapunovMethod::phase_average;
    const LyapunovEstimate est = lyapunov(spec->spec, E, n, fm->fm, m, phases, k);
    *value = est.value;
    if (stderr_out) *stderr_out = est.stderr_;
  });
}

qs_status qs_delta_index(const qs_frequency* fm, const qs_potential* spec, double theta, size_t depth, double eps,
                         char** json_out) {
  return guard([&] {
    need(fm && spec && json_out, "null argument");
    *json_out = dup(to_json(delta_index(fm->fm, exact_rational(theta), spec->spec, depth, eps)).dump());
  });
}

qs_status qs_gordon_check(const qs_potential* spec, const qs_frequency* fm, double theta, double E, size_t scale_n,
                          double eps, double L, const double phi[2], char** json_out) {
  return guard([&] {
    need(spec && fm && json_out, "null argument");
    Vec2 v{1.0, 0.0};
    if (phi) v = {phi[0], phi[1]};
    const GordonReport r = gordon_check(spec->spec, E, fm->fm, exact_rational(theta), scale_n, eps, L, v);
    *json_out = dup(to_json(r).dump());
  });
}

qs_status qs_probe_create(const qs_potential* spec, const qs_frequency* fm, double theta, long N, qs_probe** out) {
  return guard([&] {
    need(spec && fm && out, "null argument");
    *out = new qs_probe{truncate_and_diagonalize(spec->spec, fm->fm, exact_rational(theta), N)};
  });
}

qs_status qs_probe_from_measure(const double* locations, const double* weights, size_t count, qs_probe** out) {
  return guard([&] {
    need(locations && weights && out, "null argument");
    *out = new qs_probe{probe_from_measure(std::vector<double>(locations, locations + count),
                                           std::vector<double>(weights, weights + count))};
  });
}

void qs_probe_free(qs_probe* probe) { delete probe; }

size_t qs_probe_size(const qs_probe* probe) { return probe ? probe->probe.eigenvalues.size() : 0; }

qs_status qs_probe_level(const qs_probe* probe, size_t k, double* eigenvalue, double* weight) {
  return guard([&] {
    need(probe != nullptr, "null argument");
    need(k < probe->probe.eigenvalues.size(), "level index out of range");
    if (eigenvalue) *eigenvalue = probe->probe.eigenvalues[k];
    if (weight) *weight = probe->probe.weights[k];
  });
}

qs_status qs_probe_borel(const qs_probe* probe, double E, double eps, double* re, double* im) {
  return guard([&] {
    need(probe != nullptr, "null argument");
    const auto m = borel_transform(probe->probe, E, eps);
    if (re) *re = m.real();
    if (im) *im = m.imag();
  });
}

qs_status qs_probe_dimension(const qs_probe* probe, double E, double eps_hi, double ratio, int rungs,
                             double* gamma_star, double* packing_slope) {
  return guard([&] {
    need(probe != nullptr, "null argument");
    const DimensionEstimate est =
        spectral_continuity_probe(probe->probe, E, default_gamma_grid(), geometric_ladder(eps_hi, ratio, rungs));
    if (gamma_star) *gamma_star = est.gamma_star;
    if (packing_slope) *packing_slope = est.packing_proxy;
  });
}

qs_status qs_experiment_parse(const char* text, const char* task, qs_experiment** out, char** violations) {
  if (violations) *violations = nullptr;
  return guard([&] {
    need(text && out, "null argument");
    std::optional<std::string> t;
    if (task) t = std::string(task);
    ParseResult res = parse_config(text, t);
    if (!res.ok()) {
      json arr = json::array();
      for (const auto& v : res.violations) arr.push_back({{"kind", v.kind}, {"name", v.name}, {"message", v.message}});
      if (violations) *violations = dup(arr.dump());
      std::string msg;
      for (const auto& v : res.violations) msg += (msg.empty() ? "" : "; ") + v.message;
      throw Error(ErrorCode::config, msg);
    }
    *out = new qs_experiment{std::move(*res.config)};
  });
}

qs_status qs_experiment_run(const qs_experiment* exp, int workers, qs_log_fn log, void* user, int* exit_code,
                            char** report) {
  return guard([&] {
    need(exp && exit_code, "null argument");
    RunOptions opts;
    opts.workers = workers;
    opts.verbose = log != nullptr;
    if (log) opts.log = [log, user](const std::string& line) { log(line.c_str(), user); };
    const RunReport r = run(exp->config, opts);
    *exit_code = r.exit_code;
    if (report) {
      json j{{"exit_code", r.exit_code}, {"message", r.message}, {"outputs", r.outputs}};
      if (r.error) j["error"] = to_string(*r.error);
      *report = dup(j.dump());
    }
  });
}

void qs_experiment_free(qs_experiment* exp) { delete exp; }

}  // extern "C"
