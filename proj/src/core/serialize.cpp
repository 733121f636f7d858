#include "core/serialize.hpp"

#include "core/error.hpp"
#include "core/format.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

namespace quasispec {

json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "na") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorCode::config, "expected a number or one of inf, -inf, na");
}

namespace {

const char* truncation_name(Truncation t) {
  switch (t) {
    case Truncation::none: return "none";
    case Truncation::precision: return "precision";
    case Truncation::rational: return "rational";
  }
  return "none";
}

BigInt bigint_from_json(const json& j) {
  if (j.is_number_unsigned()) return BigInt(j.get<std::uint64_t>());
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  if (j.is_string()) return parse_bigint(j.get<std::string>());
  throw Error(ErrorCode::config, "coefficient must be an integer or a decimal string");
}

}  // namespace

json to_json(const FrequencyModel& fm) {
  json coeffs = json::array();
  for (const auto& a : fm.coefficients()) coeffs.push_back(to_decimal(a));
  json out{{"label", fm.label()},
           {"depth", fm.depth()},
           {"coefficients", coeffs},
           {"truncation", truncation_name(fm.truncation())}};
  if (fm.first_capped_index()) out["first_capped"] = *fm.first_capped_index();
  json conv = json::array();
  for (std::size_t n = 0; n <= fm.depth(); ++n) {
    conv.push_back({{"n", n}, {"p", to_decimal(fm.p(n))}, {"q", to_decimal(fm.q(n))}, {"log_q", fm.log_q(n)}});
  }
  out["convergents"] = conv;
  return out;
}

FrequencyModel frequency_from_json(const json& j) {
  if (!j.is_object() || !j.contains("coefficients") || !j["coefficients"].is_array()) {
    throw Error(ErrorCode::config, "frequency needs a coefficients array");
  }
  std::vector<BigInt> coeffs;
  for (const auto& c : j["coefficients"]) coeffs.push_back(bigint_from_json(c));
  if (j.contains("depth")) {
    const auto depth = j["depth"].get<std::size_t>();
    if (depth > coeffs.size()) throw Error(ErrorCode::config, "depth exceeds the number of coefficients");
    coeffs.resize(depth);
  }
  auto fm = FrequencyModel::from_coefficients(std::move(coeffs));
  if (j.contains("label")) fm = fm.with_label(j["label"].get<std::string>());
  return fm;
}

json to_json(const PotentialSpec& spec) {
  json factors = json::array();
  for (const auto& z : spec.factors) factors.push_back({{"theta", z.theta}, {"tau", z.tau}});
  json out{{"name", spec.name},    {"factors", factors}, {"smooth", spec.smooth.id},
           {"g", spec.g.id},       {"tau0", spec.tau0},  {"scale", spec.scale},
           {"tau_min", spec.tau_min()}};
  if (spec.mean_log_f) out["mean_log_f"] = *spec.mean_log_f;
  return out;
}

PotentialSpec potential_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    const auto colon = s.find(':');
    if (colon == std::string::npos) return builtin_spec(s);
    std::optional<double> param;
    try {
      param = std::stod(s.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::config, "bad builtin parameter in " + s);
    }
    return builtin_spec(s.substr(0, colon), param);
  }
  if (!j.is_object()) throw Error(ErrorCode::config, "potential must be a builtin name or an object");
  if (j.contains("builtin")) {
    std::optional<double> param;
    if (j.contains("param")) param = j["param"].get<double>();
    return builtin_spec(j["builtin"].get<std::string>(), param);
  }
  PotentialSpec s;
  s.name = j.value("name", std::string("custom"));
  if (j.contains("factors")) {
    for (const auto& z : j["factors"]) s.factors.push_back({z.at("theta").get<double>(), z.value("tau", 1.0)});
  }
  s.smooth = catalog_function(j.value("smooth", std::string("one")));
  s.g = catalog_function(j.value("g", std::string("zero")));
  s.tau0 = j.value("tau0", 1.0);
  s.scale = j.value("scale", 1.0);
  if (j.contains("tau_min_reading")) {
    const auto r = j["tau_min_reading"].get<std::string>();
    if (r == "zeros_only") {
      s.reading = TauMinReading::zeros_only;
    } else if (r != "inclusive") {
      throw Error(ErrorCode::config, "tau_min_reading must be inclusive or zeros_only");
    }
  }
  s.validate();
  return s;
}

json to_json(const DeltaEstimate& d) {
  json per = json::array();
  for (const auto& [n, v] : d.per_n) per.push_back({{"n", n}, {"value", json_number(v)}});
  return {{"per_n", per},
          {"degenerate", d.degenerate},
          {"running_sup_tail", json_number(d.running_sup_tail)},
          {"tail_from", d.tail_from},
          {"eps", d.eps},
          {"tau_min", d.tau_min},
          {"selected_subsequence", d.selected_subsequence}};
}

json to_json(const GordonReport& r) {
  return {{"scale_n", r.scale_n},
          {"qn", to_decimal(r.qn)},
          {"qn1_log", json_number(r.qn1_log)},
          {"E", r.E},
          {"delta_n", json_number(r.delta_n)},
          {"L", json_number(r.L)},
          {"eps", r.eps},
          {"hyp_A1_log", json_number(r.hyp_A1_log)},
          {"hyp_A2_log", json_number(r.hyp_A2_log)},
          {"bound_log", json_number(r.bound_log)},
          {"c", json_number(r.c)},
          {"conclusion_max", json_number(r.conclusion_max)},
          {"conclusion_floor", json_number(r.conclusion_floor)},
          {"repetition_defect_F", json_number(r.repetition_defect_F)},
          {"repetition_defect_f", json_number(r.repetition_defect_f)},
          {"orbit_product_lower", json_number(r.orbit_product_lower)},
          {"sweep",
           {{"worst_conclusion", json_number(r.sweep_worst_conclusion)},
            {"worst_A1_log", json_number(r.sweep_worst_A1_log)},
            {"worst_A2_log", json_number(r.sweep_worst_A2_log)}}},
          {"pass",
           {{"A1", r.pass.A1},
            {"A2", r.pass.A2},
            {"hypotheses", r.pass.hypotheses},
            {"conclusion", r.pass.conclusion},
            {"implication", r.pass.implication}}}};
}

json to_json(const KeyInequalities& k) {
  json aj = json::array();
  for (const auto& a : k.aj09) aj.push_back({{"j0", a.j0}, {"sum", json_number(a.sum)}, {"C_hat", json_number(a.C_hat)}});
  json out{{"scale_n", k.scale_n},
           {"q_n", k.q_n},
           {"delta", json_number(k.delta)},
           {"eps", k.eps},
           {"applicable", k.applicable},
           {"in_subsequence", k.in_subsequence},
           {"key1", {{"lhs", json_number(k.key1_lhs)}, {"rhs", json_number(k.key1_rhs)}}},
           {"jy1", {{"lhs", json_number(k.jy1_lhs)}, {"rhs", json_number(k.jy1_rhs)}}},
           {"shifted",
            {{"min", json_number(k.shifted_min)},
             {"rhs", json_number(k.shifted_rhs)},
             {"argmin", k.shifted_argmin},
             {"m_range", k.m_range}}},
           {"aj09", aj}};
  if (k.applicable) {
    out["pass"] = {{"key1", k.pass_key1}, {"jy1", k.pass_jy1}, {"shifted", k.pass_shifted}};
  } else {
    out["pass"] = "not-applicable";
  }
  return out;
}

json probe_to_json(const SpectralProbe& p) {
  json pairs = json::array();
  for (std::size_t k = 0; k < p.eigenvalues.size(); ++k) pairs.push_back({p.eigenvalues[k], p.weights[k]});
  return {{"header",
           {{"N", p.N},
            {"theta", p.theta},
            {"micro_offset", p.micro_offset},
            {"site", p.site},
            {"boundary", p.boundary},
            {"spec-id", p.spec_id},
            {"fm-id", p.fm_id}}},
          {"pairs", pairs}};
}

SpectralProbe probe_from_json(const json& j) {
  SpectralProbe p;
  const auto& h = j.at("header");
  p.N = h.at("N").get<long>();
  p.theta = h.value("theta", 0.0);
  p.micro_offset = h.value("micro_offset", 0.0);
  p.site = h.value("site", 0L);
  p.boundary = h.value("boundary", std::string("dirichlet"));
  p.spec_id = h.value("spec-id", std::string());
  p.fm_id = h.value("fm-id", std::string());
  p.finite_volume = p.boundary == "dirichlet";
  for (const auto& pr : j.at("pairs")) {
    p.eigenvalues.push_back(pr.at(0).get<double>());
    p.weights.push_back(pr.at(1).get<double>());
  }
  return p;
}

std::string lyapunov_csv(const std::vector<LyapunovRow>& rows) {
  std::ostringstream os;
  os << "E,n,L_A,L_D,stderr,method\n";
  for (const auto& r : rows) {
    os << format_double(r.E) << ',' << r.n << ',' << format_double(r.L_A) << ',' << format_double(r.L_D) << ','
       << format_double(r.stderr_) << ',' << r.method << '\n';
  }
  return os.str();
}

std::string dimension_scan_csv(const std::vector<ScanRow>& rows) {
  std::ostringstream os;
  os << "E,gamma_star,packing_slope,N,beta,L_E\n";
  for (const auto& r : rows) {
    os << format_double(r.E) << ',' << format_double(r.gamma_star) << ',' << format_double(r.packing_slope) << ','
       << r.N << ',' << format_double(r.beta) << ',' << format_double(r.L_E) << '\n';
  }
  return os.str();
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  if (ec) throw Error(ErrorCode::io, "cannot create directory for " + path + ": " + ec.message());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::io, "write failed for " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorCode::io, "cannot rename onto " + path + ": " + ec.message());
  }
}

}  // namespace quasispec
