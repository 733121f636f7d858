#include "core/potential.hpp"

#include "core/diophantine.hpp"
#include "core/error.hpp"
#include "core/format.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <functional>
#include <optional>
#include <cmath>
#include <limits>
#include <numbers>

namespace quasispec {

namespace {

using std::numbers::pi;

double reduce(double theta) {
  double t = theta - std::floor(theta);
  if (t >= 1.0) t = 0.0;
  return t;
}

double parse_param(std::string_view id, std::string_view text) {
  std::string s(text);
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw Error(ErrorCode::unknown_name, "bad parameter in catalog id: " + std::string(id));
  }
  if (pos != s.size()) throw Error(ErrorCode::unknown_name, "bad parameter in catalog id: " + std::string(id));
  return v;
}

// theta cos(1/theta) + 2 sqrt(theta) on (0, 1/2], mirrored.
double example1_f(double theta) {
  const double t = torus_norm(theta);
  if (t == 0.0) return 0.0;
  return t * std::cos(1.0 / t) + 2.0 * std::sqrt(t);
}

}  // namespace

CatalogFunction catalog_function(std::string_view id) {
  const auto colon = id.find(':');
  const std::string_view head = id.substr(0, colon);
  const bool has_param = colon != std::string_view::npos;
  const double param = has_param ? parse_param(id, id.substr(colon + 1)) : 1.0;
  const std::string key(id);
  if (head == "one" && !has_param) return {key, [](double) { return 1.0; }};
  if (head == "zero" && !has_param) return {key, [](double) { return 0.0; }};
  if (head == "const" && has_param) return {key, [param](double) { return param; }};
  if (head == "lambda_abs_sin") {
    return {key, [param](double t) { return param * std::fabs(std::sin(pi * t)); }};
  }
  if (head == "cos") {
    return {key, [param](double t) { return param * std::cos(2.0 * pi * t); }};
  }
  if (head == "example1_tilde" && !has_param) {
    return {key, [](double theta) {
              const double t = torus_norm(theta);
              if (t < 1e-300) return 2.0 / std::sqrt(pi);
              return example1_f(theta) / std::sqrt(std::sin(pi * t));
            }};
  }
  if (head == "example1_f" && !has_param) return {key, example1_f};
  if (head == "example2_tilde" && !has_param) {
    return {key, [](double theta) {
              const double t = torus_norm(theta);
              if (t < 1e-300) return 1.0 / pi;
              return t / std::sin(pi * t);
            }};
  }
  if (head == "example2_g" && !has_param) {
    return {key, [](double theta) {
              const double t = torus_norm(theta);
              if (t == 0.0) return 0.0;
              return t * std::log(t);
            }};
  }
  throw Error(ErrorCode::unknown_name, "unknown catalog function: " + key);
}

double PotentialSpec::tau_sum() const {
  double s = 0.0;
  for (const auto& z : factors) s += z.tau;
  return s;
}

double PotentialSpec::tau_min_zeros() const {
  double m = 1.0;
  for (const auto& z : factors) m = std::min(m, z.tau);
  return m;
}

double PotentialSpec::tau_min_inclusive() const { return std::min(tau0, tau_min_zeros()); }

double PotentialSpec::f_tilde(double theta) const { return scale * smooth(reduce(theta)); }

double PotentialSpec::f(double theta) const {
  const double t = reduce(theta);
  double v = scale * smooth(t);
  for (const auto& z : factors) {
    const double s = std::fabs(std::sin(pi * (t - z.theta)));
    v *= z.tau == 1.0 ? s : std::pow(s, z.tau);
  }
  return v;
}

double PotentialSpec::g_value(double theta) const { return scale * g(reduce(theta)); }

double PotentialSpec::distance_to_zeros(double theta) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& z : factors) d = std::min(d, torus_norm(theta - z.theta));
  return d;
}

void PotentialSpec::validate() const {
  if (!(tau0 > 0.0 && tau0 <= 1.0)) throw Error(ErrorCode::invalid_argument, "tau0 must lie in (0, 1]");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(ErrorCode::invalid_argument, "scale must be positive");
  if (!smooth.fn || !g.fn) throw Error(ErrorCode::invalid_argument, "potential needs both smooth part and g");
  for (const auto& z : factors) {
    if (!(z.tau > 0.0 && z.tau <= 1.0)) throw Error(ErrorCode::invalid_argument, "factor exponent must lie in (0, 1]");
    if (!(z.theta >= 0.0 && z.theta < 1.0)) throw Error(ErrorCode::invalid_argument, "factor location must lie in [0, 1)");
  }
  // |f~| minus the largest neighbour jump bounds |f~| from below between nodes.
  constexpr int grid = 1 << 14;
  double min_abs = std::numeric_limits<double>::infinity();
  double max_jump = 0.0;
  double prev = smooth(0.0);
  const double first = prev;
  for (int i = 1; i <= grid; ++i) {
    const double cur = i == grid ? first : smooth(static_cast<double>(i) / grid);
    min_abs = std::min(min_abs, std::fabs(prev));
    max_jump = std::max(max_jump, std::fabs(cur - prev));
    prev = cur;
  }
  if (!(min_abs - max_jump > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "smooth part is not certified to stay away from zero");
  }
}

FGV eval_fgv(const PotentialSpec& spec, double theta) {
  const double t = reduce(theta);
  FGV out;
  out.f = spec.f(t);
  out.g = spec.g_value(t);
  if (spec.distance_to_zeros(t) < kSingularGuard || out.f == 0.0) {
    out.singular = true;
    out.v = out.g >= 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    return out;
  }
  out.v = out.g / out.f;
  return out;
}

namespace {

using LogFn = std::function<double(double)>;

// Composite Gauss-Legendre on [a, b], panel count doubled until two passes agree.
std::optional<double> panels(const LogFn& g, double a, double b, double tol) {
  using GL = boost::math::quadrature::gauss<double, 20>;
  auto pass = [&](long m) {
    long double acc = 0.0L;
    const double w = (b - a) / static_cast<double>(m);
    for (long i = 0; i < m; ++i) acc += GL::integrate(g, a + i * w, a + (i + 1) * w);
    return static_cast<double>(acc);
  };
  long m = 8;
  double prev = pass(m);
  while (m < (1L << 16)) {
    m *= 2;
    const double cur = pass(m);
    if (std::fabs(cur - prev) <= tol) return cur;
    prev = cur;
  }
  return std::nullopt;
}

// Integral of g over (a, a + side * h] with t = a + side / u, u in [1/h, inf).
// The tail beyond U is closed with the continuous limit g(a).
std::optional<double> endpoint_piece(const LogFn& g, double a, double side, double h, double tol) {
  const double limit = g(a);
  if (!std::isfinite(limit)) return std::nullopt;
  auto G = [&](double u) { return g(a + side / u) / (u * u); };
  auto upto = [&](double U) -> std::optional<double> {
    using GL = boost::math::quadrature::gauss<double, 20>;
    long double acc = 0.0L;
    const double lo = 1.0 / h;
    const long m = static_cast<long>(std::ceil((U - lo) / 2.0));
    const double w = (U - lo) / static_cast<double>(m);
    for (long i = 0; i < m; ++i) acc += GL::integrate(G, lo + i * w, lo + (i + 1) * w);
    return static_cast<double>(acc) + limit / U;
  };
  // the tail error oscillates with U, so one lucky agreement is not enough
  double U = 64.0 / h;
  auto prev = upto(U);
  int agreed = 0;
  while (U < 1e7) {
    U *= 2.0;
    auto cur = upto(U);
    agreed = std::fabs(*cur - *prev) <= tol ? agreed + 1 : 0;
    if (agreed == 2) return cur;
    prev = cur;
  }
  return std::nullopt;
}

// Splits the torus at the factor locations, where f~ may oscillate.
std::optional<double> graded_mean(const LogFn& g, std::vector<double> cuts, double tol) {
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  long double total = 0.0L;
  const double piece_tol = tol / (4.0 * static_cast<double>(cuts.size()));
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    const double a = cuts[k];
    const double b = k + 1 < cuts.size() ? cuts[k + 1] : cuts[0] + 1.0;
    const double h = (b - a) / 4.0;
    auto left = endpoint_piece(g, a, 1.0, h, piece_tol);
    auto right = endpoint_piece(g, b, -1.0, h, piece_tol);
    auto mid = panels(g, a + h, b - h, piece_tol);
    if (!left || !right || !mid) return std::nullopt;
    total += *left + *right + *mid;
  }
  return static_cast<double>(total);
}

}  // namespace

double mean_log_f(const PotentialSpec& spec, int quad_points, double tol) {
  if (quad_points < (1 << 10)) throw Error(ErrorCode::invalid_argument, "mean_log_f needs at least 2^10 points");
  const LogFn g = [&](double x) { return std::log(std::fabs(spec.smooth(x))); };
  auto finish = [&](double smooth_mean) {
    return std::log(spec.scale) + smooth_mean - spec.tau_sum() * std::log(2.0);
  };
  auto midpoint = [&](long n) {
    long double acc = 0.0L;
    for (long i = 0; i < n; ++i) acc += g((static_cast<double>(i) + 0.5) / static_cast<double>(n));
    return static_cast<double>(acc / static_cast<long double>(n));
  };
  long n = quad_points;
  double prev = midpoint(n);
  constexpr long kMaxPoints = 1L << 20;
  while (n < kMaxPoints) {
    n *= 2;
    const double cur = midpoint(n);
    if (std::fabs(cur - prev) <= tol) return finish(cur);
    prev = cur;
  }
  std::vector<double> cuts;
  for (const auto& z : spec.factors) cuts.push_back(reduce(z.theta));
  if (cuts.empty()) cuts.push_back(0.0);
  if (auto graded = graded_mean(g, cuts, tol)) return finish(*graded);
  throw Error(ErrorCode::quadrature_nonconvergent, "mean_log_f: refinements still differ by more than tol");
}

PotentialSpec normalize_pair(const PotentialSpec& spec) {
  const double m = spec.mean_log_f ? *spec.mean_log_f : mean_log_f(spec);
  PotentialSpec out = spec;
  out.scale = spec.scale * std::exp(-m);
  out.mean_log_f = 0.0;
  return out;
}

HolderEstimate holder_estimate(const std::function<double(double)>& fn, double tau0, int grid) {
  if (grid < (1 << 8)) throw Error(ErrorCode::invalid_argument, "holder_estimate needs grid >= 2^8");
  if (!(tau0 > 0.0 && tau0 <= 1.0)) throw Error(ErrorCode::invalid_argument, "tau0 must lie in (0, 1]");
  auto scan = [&](long n, double& sup_norm) {
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) vals[static_cast<std::size_t>(i)] = fn(static_cast<double>(i) / static_cast<double>(n));
    sup_norm = 0.0;
    for (double v : vals) sup_norm = std::max(sup_norm, std::fabs(v));
    double best = 0.0;
    for (long step = 1; 2 * step <= n; step *= 2) {
      const double d = static_cast<double>(step) / static_cast<double>(n);
      const double denom = std::pow(d, tau0);
      for (long i = 0; i + step < n; ++i) {
        const double q = std::fabs(vals[static_cast<std::size_t>(i + step)] - vals[static_cast<std::size_t>(i)]) / denom;
        best = std::max(best, q);
      }
    }
    return best;
  };
  HolderEstimate out;
  double sup = 0.0;
  for (int k = 0; k < 3; ++k) {
    double s = 0.0;
    out.refinements.push_back(scan(static_cast<long>(grid) << (2 * k), s));
    if (k == 0) sup = s;
  }
  out.sup_norm = sup;
  out.quotient = out.refinements.front();
  out.value = out.sup_norm + out.quotient;
  const double r1 = out.refinements[1] / std::max(out.refinements[0], 1e-300);
  const double r2 = out.refinements[2] / std::max(out.refinements[1], 1e-300);
  out.diverging = r1 > 1.05 && r2 > 1.05;
  return out;
}

PotentialSpec builtin_spec(std::string_view name, std::optional<double> param) {
  PotentialSpec s;
  s.name = std::string(name);
  if (name == "example1") {
    s.factors = {{0.0, 0.5}};
    s.smooth = catalog_function("example1_tilde");
    s.g = catalog_function("one");
    s.tau0 = 0.5;
  } else if (name == "example2") {
    const double eps = param.value_or(0.1);
    if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::invalid_argument, "example2 needs 0 < eps < 1");
    // f(theta) = ||theta|| has a simple zero; g = theta ln theta is only
    // (1-eps)-Hoelder, which enters through tau0.
    s.factors = {{0.0, 1.0}};
    s.smooth = catalog_function("example2_tilde");
    s.g = catalog_function("example2_g");
    s.tau0 = 1.0 - eps;
  } else if (name == "maryland-like") {
    const double lambda = param.value_or(1.0);
    s.factors = {{0.5, 1.0}};
    s.smooth = catalog_function("one");
    s.g = catalog_function("lambda_abs_sin:" + format_double(lambda));
    s.tau0 = 1.0;
  } else if (name == "free") {
    s.smooth = catalog_function("one");
    s.g = catalog_function("zero");
    s.tau0 = 1.0;
  } else {
    throw Error(ErrorCode::unknown_name, "unknown builtin potential: " + std::string(name));
  }
  return s;
}

std::vector<std::string> builtin_names() { return {"example1", "example2", "maryland-like", "free"}; }

std::map<std::string, PotentialSpec> builtin_specs() {
  std::map<std::string, PotentialSpec> out;
  for (const auto& n : builtin_names()) out.emplace(n, builtin_spec(n));
  return out;
}

}  // namespace quasispec
