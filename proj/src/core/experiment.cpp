#include "core/experiment.hpp"

#include "core/cocycle.hpp"
#include "core/format.hpp"
#include "core/gordon.hpp"
#include "core/potential.hpp"
#include "core/serialize.hpp"
#include "core/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#ifndef QUASISPEC_VERSION
#define QUASISPEC_VERSION "0.0.0"
#endif

namespace quasispec {

namespace {

struct TaskSchema {
  std::set<std::string> required;
  std::set<std::string> optional;
};

const std::map<Task, TaskSchema>& schemas() {
  static const std::map<Task, TaskSchema> s{
      {Task::cf, {{"task", "frequency", "depth", "output"}, {"precision_bits"}}},
      {Task::delta, {{"task", "frequency", "potential", "theta", "depth", "output"}, {"eps", "tail_from", "precision_bits"}}},
      {Task::lyapunov,
       {{"task", "frequency", "potential", "energies", "n", "output"}, {"phases", "method", "theta", "precision_bits"}}},
      {Task::gordon,
       {{"task", "frequency", "potential", "theta", "energy", "scales", "output"},
        {"eps", "L", "lyapunov_n", "phases", "phi", "precision_bits"}}},
      {Task::specdim,
       {{"task", "frequency", "potential", "theta", "N", "window", "output"},
        {"energies", "eps", "sampling", "rungs", "ratio", "beta", "lyapunov_n", "phases", "site", "precision_bits"}}},
      {Task::scan,
       {{"task", "frequency", "potential", "theta", "energies", "output"},
        {"n", "phases", "depth", "eps", "precision_bits"}}},
  };
  return s;
}

using json = nlohmann::json;

bool is_positive_int(const json& j) { return j.is_number_integer() && j.get<std::int64_t>() > 0; }
bool is_nonneg_int(const json& j) { return j.is_number_integer() && j.get<std::int64_t>() >= 0; }
bool is_positive_number(const json& j) { return j.is_number() && j.get<double>() > 0.0; }

std::optional<std::string> check_energies(const json& j) {
  if (j.is_array()) {
    if (j.empty()) return "energy list is empty";
    for (const auto& e : j) {
      if (!e.is_number()) return "energies must be numbers";
    }
    return std::nullopt;
  }
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (k != "lo" && k != "hi" && k != "count") return "unknown energy grid key " + k;
    }
    if (!j.contains("lo") || !j.contains("hi") || !j.contains("count")) return "energy grid needs lo, hi, count";
    if (!j["lo"].is_number() || !j["hi"].is_number() || !is_positive_int(j["count"])) return "bad energy grid";
    if (j["hi"].get<double>() < j["lo"].get<double>()) return "energy grid needs hi >= lo";
    return std::nullopt;
  }
  return "energies must be a list or {lo, hi, count}";
}

std::optional<std::string> check_window(const json& j) {
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    if (j[1].get<double>() <= j[0].get<double>()) return "window needs hi > lo";
    return std::nullopt;
  }
  if (j.is_object() && j.contains("lo") && j.contains("hi") && j.size() == 2 && j["lo"].is_number() &&
      j["hi"].is_number()) {
    if (j["hi"].get<double>() <= j["lo"].get<double>()) return "window needs hi > lo";
    return std::nullopt;
  }
  return "window must be [lo, hi] or {lo, hi}";
}

void check_frequency(const json& j, std::vector<Violation>& out) {
  if (j.is_string()) return;
  if (!j.is_object()) {
    out.push_back({"invalid-value", "frequency", "frequency must be an object or a real literal"});
    return;
  }
  const int forms = j.contains("real") + j.contains("liouville") + j.contains("coefficients");
  if (forms != 1) {
    out.push_back({"invalid-value", "frequency", "frequency needs exactly one of real, liouville, coefficients"});
    return;
  }
  std::set<std::string> allowed;
  if (j.contains("real")) {
    allowed = {"real", "depth"};
    if (!j["real"].is_string()) out.push_back({"invalid-value", "frequency.real", "real must be a string"});
  } else if (j.contains("liouville")) {
    allowed = {"liouville"};
    const auto& l = j["liouville"];
    if (!l.is_object() || !l.contains("c")) {
      out.push_back({"missing-parameter", "frequency.liouville.c", "liouville needs c"});
    } else {
      for (const auto& [k, v] : l.items()) {
        if (k != "c" && k != "depth" && k != "cap_bits") out.push_back({"unknown-key", "frequency.liouville." + k, "unknown key"});
      }
      if (!is_positive_number(l["c"])) out.push_back({"invalid-value", "frequency.liouville.c", "c must be positive"});
      if (l.contains("depth") && !is_positive_int(l["depth"])) {
        out.push_back({"invalid-value", "frequency.liouville.depth", "depth must be a positive integer"});
      }
      if (l.contains("cap_bits") && !is_positive_int(l["cap_bits"])) {
        out.push_back({"invalid-value", "frequency.liouville.cap_bits", "cap_bits must be a positive integer"});
      }
    }
  } else {
    allowed = {"coefficients", "depth", "label"};
    if (!j["coefficients"].is_array() || j["coefficients"].empty()) {
      out.push_back({"invalid-value", "frequency.coefficients", "coefficients must be a nonempty list"});
    }
  }
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) out.push_back({"unknown-key", "frequency." + k, "unknown key"});
  }
  if (j.contains("depth") && !is_positive_int(j["depth"])) {
    out.push_back({"invalid-value", "frequency.depth", "depth must be a positive integer"});
  }
}

void check_value(const std::string& key, const json& v, std::vector<Violation>& out) {
  auto bad = [&](const std::string& msg) { out.push_back({"invalid-value", key, msg}); };
  if (key == "output") {
    if (!v.is_string() || v.get<std::string>().empty()) bad("output must be a nonempty path prefix");
  } else if (key == "frequency") {
    check_frequency(v, out);
  } else if (key == "potential") {
    try {
      potential_from_json(v);
    } catch (const std::exception& e) {
      bad(e.what());
    }
  } else if (key == "theta") {
    try {
      theta_from_json(v);
    } catch (const std::exception& e) {
      bad(e.what());
    }
  } else if (key == "depth" || key == "n" || key == "N" || key == "phases" || key == "rungs" ||
             key == "lyapunov_n" || key == "precision_bits") {
    if (!is_positive_int(v)) bad(key + " must be a positive integer");
  } else if (key == "tail_from") {
    if (!is_positive_int(v)) bad("tail_from must be a positive integer");
  } else if (key == "eps") {
    if (!is_positive_number(v)) bad("eps must be positive");
  } else if (key == "ratio") {
    if (!v.is_number() || !(v.get<double>() > 0.0 && v.get<double>() < 1.0)) bad("ratio must lie in (0, 1)");
  } else if (key == "energies") {
    // specdim takes a count, the other tasks a grid
    if (!is_positive_int(v)) {
      if (auto m = check_energies(v)) bad(*m);
    }
  } else if (key == "energy" || key == "L" || key == "beta") {
    if (!v.is_number()) bad(key + " must be a number");
  } else if (key == "scales") {
    if (!v.is_array() || v.empty()) {
      bad("scales must be a nonempty list of convergent indices");
    } else {
      for (const auto& s : v) {
        if (!is_nonneg_int(s)) bad("scales must be nonnegative integers");
      }
    }
  } else if (key == "window") {
    if (auto m = check_window(v)) bad(*m);
  } else if (key == "method") {
    if (!v.is_string() || (v != "phase_average" && v != "birkhoff")) bad("method must be phase_average or birkhoff");
  } else if (key == "sampling") {
    if (!v.is_string() || (v != "uniform" && v != "quantile")) bad("sampling must be uniform or quantile");
  } else if (key == "phi") {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) bad("phi must be [x, y]");
  } else if (key == "site") {
    if (!v.is_number_integer()) bad("site must be an integer");
  }
}

}  // namespace

std::optional<Task> task_from_string(std::string_view name) {
  if (name == "cf") return Task::cf;
  if (name == "delta") return Task::delta;
  if (name == "lyapunov") return Task::lyapunov;
  if (name == "gordon") return Task::gordon;
  if (name == "specdim") return Task::specdim;
  if (name == "scan") return Task::scan;
  return std::nullopt;
}

const char* to_string(Task task) {
  switch (task) {
    case Task::cf: return "cf";
    case Task::delta: return "delta";
    case Task::lyapunov: return "lyapunov";
    case Task::gordon: return "gordon";
    case Task::specdim: return "specdim";
    case Task::scan: return "scan";
  }
  return "cf";
}

ParseResult parse_config(std::string_view text, std::optional<std::string> task_override) {
  ParseResult res;
  json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) {
    res.violations.push_back({"malformed-json", "", "config is not valid JSON"});
    return res;
  }
  if (!doc.is_object()) {
    res.violations.push_back({"malformed-json", "", "config must be a JSON object"});
    return res;
  }
  std::string task_name;
  if (doc.contains("task")) {
    if (!doc["task"].is_string()) {
      res.violations.push_back({"unknown-task", "task", "task must be a string"});
      return res;
    }
    task_name = doc["task"].get<std::string>();
    if (task_override && *task_override != task_name) {
      res.violations.push_back({"task-mismatch", "task", "command line task " + *task_override +
                                                             " disagrees with config task " + task_name});
    }
  } else if (task_override) {
    task_name = *task_override;
    doc["task"] = task_name;
  } else {
    res.violations.push_back({"missing-parameter", "task", "missing parameter: task"});
    return res;
  }
  const auto task = task_from_string(task_name);
  if (!task) {
    res.violations.push_back({"unknown-task", "task", "unknown task: " + task_name});
    return res;
  }
  const TaskSchema& schema = schemas().at(*task);
  for (const auto& key : schema.required) {
    if (!doc.contains(key)) res.violations.push_back({"missing-parameter", key, "missing parameter: " + key});
  }
  for (const auto& [key, value] : doc.items()) {
    if (!schema.required.count(key) && !schema.optional.count(key)) {
      res.violations.push_back({"unknown-key", key, "unknown key: " + key});
      continue;
    }
    check_value(key, value, res.violations);
  }
  if (*task == Task::specdim && doc.contains("energies") && !is_positive_int(doc["energies"])) {
    res.violations.push_back({"invalid-value", "energies", "specdim takes an energy count"});
  }
  if (!res.violations.empty()) return res;
  ExperimentConfig cfg;
  cfg.task = *task;
  cfg.output = doc["output"].get<std::string>();
  if (doc.contains("theta")) theta_from_json(doc["theta"], &cfg.seed);
  cfg.doc = std::move(doc);
  res.config = std::move(cfg);
  return res;
}

int precision_bits_from_env() {
  if (const char* v = std::getenv("QUASISPEC_PRECISION_BITS")) {
    char* end = nullptr;
    const long bits = std::strtol(v, &end, 10);
    if (end != v && *end == '\0' && bits >= 16 && bits <= 1 << 20) return static_cast<int>(bits);
    throw Error(ErrorCode::config, "QUASISPEC_PRECISION_BITS must be an integer in [16, 2^20]");
  }
  return 256;
}

Rational random_theta(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::uint64_t bits = rng() >> 11;
  return Rational(BigInt(bits), BigInt(1) << 53);
}

Rational theta_from_json(const nlohmann::json& j, std::optional<std::uint64_t>* seed_out) {
  if (j.is_number()) {
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw Error(ErrorCode::config, "theta must be finite");
    return frac(exact_rational(x));
  }
  if (!j.is_string()) throw Error(ErrorCode::config, "theta must be a number or a string");
  const auto s = j.get<std::string>();
  if (s.rfind("random:", 0) == 0) {
    const std::string tail = s.substr(7);
    if (tail.empty() || tail.find_first_not_of("0123456789") != std::string::npos) {
      throw Error(ErrorCode::config, "random theta needs an integer seed: random:<seed>");
    }
    const std::uint64_t seed = std::stoull(tail);
    if (seed_out) *seed_out = seed;
    return random_theta(seed);
  }
  if (s.rfind("random", 0) == 0) throw Error(ErrorCode::config, "random theta needs a seed: random:<seed>");
  // a decimal literal is taken exactly
  const RealInterval iv = RealInterval::from_decimal(s, 64);
  return frac((iv.lo + iv.hi) / 2);
}

FrequencyModel frequency_from_config(const nlohmann::json& j, std::size_t default_depth, int precision_bits) {
  if (j.is_string()) return cf_expand(RealInterval::parse(j.get<std::string>(), precision_bits), default_depth);
  if (j.contains("real")) {
    const std::size_t depth = j.value("depth", default_depth);
    const auto text = j["real"].get<std::string>();
    return cf_expand(RealInterval::parse(text, precision_bits), depth).with_label(text);
  }
  if (j.contains("liouville")) {
    const auto& l = j["liouville"];
    return liouville_frequency(l["c"].get<double>(), l.value("depth", std::size_t{5}), l.value("cap_bits", 1u << 22));
  }
  return frequency_from_json(j);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::vector<double> energy_grid(const json& j) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& e : j) out.push_back(e.get<double>());
    return out;
  }
  const double lo = j["lo"].get<double>(), hi = j["hi"].get<double>();
  const int count = j["count"].get<int>();
  for (int k = 0; k < count; ++k) out.push_back(count == 1 ? lo : lo + (hi - lo) * k / (count - 1));
  return out;
}

std::pair<double, double> window_of(const json& j) {
  if (j.is_array()) return {j[0].get<double>(), j[1].get<double>()};
  return {j["lo"].get<double>(), j["hi"].get<double>()};
}

/// Runs fn(i) for i < n on up to `workers` threads; results stay in index
/// order and the lowest-index failure is rethrown.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, int workers, Fn fn) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < k; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

PotentialSpec normalized(const PotentialSpec& spec) { return normalize_pair(spec); }

class Runner {
 public:
  Runner(const ExperimentConfig& cfg, const RunOptions& opts) : cfg_(cfg), opts_(opts), doc_(cfg.doc) {
    bits_ = doc_.contains("precision_bits") ? doc_["precision_bits"].get<int>() : precision_bits_from_env();
  }

  std::vector<std::string> run() {
    switch (cfg_.task) {
      case Task::cf: task_cf(); break;
      case Task::delta: task_delta(); break;
      case Task::lyapunov: task_lyapunov(); break;
      case Task::gordon: task_gordon(); break;
      case Task::specdim: task_specdim(); break;
      case Task::scan: task_scan(); break;
    }
    return outputs_;
  }

  int bits() const { return bits_; }

 private:
  void log(const std::string& line) const {
    if (opts_.verbose && opts_.log) opts_.log(line);
  }

  void write(const std::string& suffix, const std::string& content) {
    const std::string path = cfg_.output + suffix;
    atomic_write(path, content);
    outputs_.push_back(path);
    log("wrote " + path);
  }

  FrequencyModel frequency(std::size_t depth) const { return frequency_from_config(doc_["frequency"], depth, bits_); }
  double eps() const { return doc_.value("eps", 0.05); }

  void task_cf() {
    const auto depth = doc_["depth"].get<std::size_t>();
    const FrequencyModel fm = frequency(depth);
    json out = to_json(fm);
    if (fm.depth() >= 2) {
      const BetaEstimate b = beta_estimate(fm, 0);
      json per = json::array();
      for (const auto& [n, v] : b.per_n) per.push_back({{"n", n}, {"value", json_number(v)}});
      out["beta"] = {{"per_n", per}, {"running_sup_tail", json_number(b.running_sup_tail)}};
    }
    write(".cf.json", out.dump(2) + "\n");
  }

  void task_delta() {
    const auto depth = doc_["depth"].get<std::size_t>();
    const FrequencyModel fm = frequency(depth + 1);
    const PotentialSpec spec = potential_from_json(doc_["potential"]);
    const Rational theta = theta_from_json(doc_["theta"]);
    std::optional<std::size_t> tail;
    if (doc_.contains("tail_from")) tail = doc_["tail_from"].get<std::size_t>();
    const DeltaEstimate d = delta_index(fm, theta, spec, depth, eps(), tail);
    json out = to_json(d);
    out["frequency"] = fm.label();
    out["potential"] = spec.name;
    write(".delta.json", out.dump(2) + "\n");
  }

  void task_lyapunov() {
    const FrequencyModel fm = frequency(40);
    const PotentialSpec spec = potential_from_json(doc_["potential"]);
    const PotentialSpec norm = normalized(spec);
    const long n = doc_["n"].get<long>();
    const int phases = doc_.value("phases", 16);
    const bool birkhoff = doc_.value("method", std::string("phase_average")) == "birkhoff";
    const double bth = doc_.contains("theta") ? to_double(theta_from_json(doc_["theta"])) : 0.5;
    const auto energies = energy_grid(doc_["energies"]);
    const auto method = birkhoff ? LyapunovMethod::birkhoff_single_orbit : LyapunovMethod::phase_average;
    auto rows = parallel_map<LyapunovRow>(energies.size(), opts_.workers, [&](std::size_t i) {
      LyapunovRow r;
      r.E = energies[i];
      r.n = n;
      r.method = birkhoff ? "birkhoff" : "phase_average";
      const LyapunovEstimate d = lyapunov(norm, r.E, n, fm, method, phases, MatrixKind::regular_d, bth);
      r.L_D = d.value;
      r.stderr_ = d.stderr_;
      try {
        r.L_A = lyapunov(spec, r.E, n, fm, method, phases, MatrixKind::singular_a, bth).value;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::singular_hit) throw;
        r.L_A = std::numeric_limits<double>::quiet_NaN();
      }
      return r;
    });
    write(".lyapunov.csv", lyapunov_csv(rows));
  }

  void task_gordon() {
    std::size_t max_scale = 0;
    for (const auto& s : doc_["scales"]) max_scale = std::max(max_scale, s.get<std::size_t>());
    const FrequencyModel fm = frequency(std::max<std::size_t>(40, max_scale + 2));
    const PotentialSpec spec = potential_from_json(doc_["potential"]);
    const Rational theta = theta_from_json(doc_["theta"]);
    const double E = doc_["energy"].get<double>();
    std::optional<double> L;
    if (doc_.contains("L")) {
      L = doc_["L"].get<double>();
    } else {
      L = lyapunov(normalized(spec), E, doc_.value("lyapunov_n", 5000L), fm, LyapunovMethod::phase_average,
                   doc_.value("phases", 16), MatrixKind::regular_d)
              .value;
    }
    Vec2 phi{1.0, 0.0};
    if (doc_.contains("phi")) {
      phi = {doc_["phi"][0].get<double>(), doc_["phi"][1].get<double>()};
      const double n = norm(phi);
      if (n == 0.0) throw Error(ErrorCode::config, "phi must be nonzero");
      phi = {phi[0] / n, phi[1] / n};
    }
    std::vector<std::size_t> scales;
    for (const auto& s : doc_["scales"]) scales.push_back(s.get<std::size_t>());
    const double e = eps();
    auto reports = parallel_map<json>(scales.size(), opts_.workers, [&](std::size_t i) {
      return to_json(gordon_check(spec, E, fm, theta, scales[i], e, L, phi));
    });
    write(".gordon.json", json(reports).dump(2) + "\n");
  }

  double beta_of(const FrequencyModel& fm) const {
    if (doc_.contains("beta")) return doc_["beta"].get<double>();
    const std::size_t top = deepest_honest_scale(fm);
    if (top < 1) throw Error(ErrorCode::insufficient_depth, "frequency model too shallow for a beta estimate");
    return beta_estimate(fm, std::max<std::size_t>(1, top / 2), top).running_sup_tail;
  }

  void task_specdim() {
    const FrequencyModel fm = frequency(40);
    const PotentialSpec spec = potential_from_json(doc_["potential"]);
    const Rational theta = theta_from_json(doc_["theta"]);
    const long N = doc_["N"].get<long>();
    const auto [lo, hi] = window_of(doc_["window"]);
    ScanOptions so;
    so.energies = doc_.value("energies", 32);
    so.sampling = doc_.value("sampling", std::string("quantile")) == "uniform" ? EnergySampling::uniform
                                                                              : EnergySampling::measure_quantile;
    so.rungs = doc_.value("rungs", 12);
    so.ratio = doc_.value("ratio", 0.7071067811865476);
    so.lyapunov_n = doc_.value("lyapunov_n", 2000L);
    so.lyapunov_phases = doc_.value("phases", 8);
    so.truncation.site = doc_.value("site", 0L);
    const double beta = beta_of(fm);
    log("diagonalizing " + std::to_string(2 * N + 1) + " sites");
    const SpectralProbe probe = truncate_and_diagonalize(spec, fm, theta, N, so.truncation);
    const DimensionScan scan = dimension_scan(probe, spec, fm, lo, hi, beta, eps(), so);
    write(".probe.json", probe_to_json(probe).dump() + "\n");
    write(".specdim.csv", dimension_scan_csv(scan.rows));
    json summary{{"median_gamma_star", json_number(scan.median_gamma_star)},
                 {"beta", json_number(beta)},
                 {"tau_min", scan.tau_min},
                 {"eps", scan.eps},
                 {"micro_offset", scan.micro_offset},
                 {"N", N},
                 {"energies", scan.rows.size()}};
    try {
      const C1Fit fit = fit_c1(scan.rows);
      summary["C1_fit"] = {{"C1", json_number(fit.C1)},
                           {"stderr", json_number(fit.stderr_)},
                           {"ci95", {json_number(fit.lo), json_number(fit.hi)}},
                           {"points", fit.points}};
    } catch (const Error&) {
      summary["C1_fit"] = "na";
    }
    write(".specdim.json", summary.dump(2) + "\n");
  }

  void task_scan() {
    const FrequencyModel fm = frequency(40);
    const PotentialSpec spec = potential_from_json(doc_["potential"]);
    const PotentialSpec norm = normalized(spec);
    const Rational theta = theta_from_json(doc_["theta"]);
    const long n = doc_.value("n", 2000L);
    const int phases = doc_.value("phases", 16);
    std::size_t depth = doc_.contains("depth") ? doc_["depth"].get<std::size_t>() : deepest_honest_scale(fm);
    if (depth < 1) throw Error(ErrorCode::insufficient_depth, "frequency model too shallow for the delta index");
    const DeltaEstimate d = delta_index(fm, theta, spec, depth, eps());
    const double delta = d.running_sup_tail;
    const auto energies = energy_grid(doc_["energies"]);
    const double floor_L = 2.0 * std::log(static_cast<double>(n)) / static_cast<double>(n);
    auto lines = parallel_map<std::string>(energies.size(), opts_.workers, [&](std::size_t i) {
      const double E = energies[i];
      const LyapunovEstimate L =
          lyapunov(norm, E, n, fm, LyapunovMethod::phase_average, phases, MatrixKind::regular_d);
      const bool resolved = L.value > floor_L + 3.0 * L.stderr_;
      std::string cls;
      if (!(delta > 0.0)) {
        cls = "outside:delta-nonpositive";
      } else if (!resolved) {
        cls = "outside:L-unresolved";
      } else if (L.value >= delta) {
        cls = "outside:L-exceeds-delta";
      } else {
        cls = "sc-criterion";
      }
      return format_double(E) + "," + format_double(L.value) + "," + format_double(L.stderr_) + "," +
             format_double(delta) + "," + cls + "\n";
    });
    std::string csv = "E,L,stderr,delta,class\n";
    for (const auto& l : lines) csv += l;
    write(".scan.csv", csv);
  }

  const ExperimentConfig& cfg_;
  const RunOptions& opts_;
  const json& doc_;
  int bits_ = 256;
  std::vector<std::string> outputs_;
};

}  // namespace

RunReport run(const ExperimentConfig& config, const RunOptions& opts) {
  RunReport rep;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Runner runner(config, opts);
    rep.outputs = runner.run();
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char hash[17];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(fnv1a(config.doc.dump())));
    json manifest{{"task", to_string(config.task)},
                  {"version", QUASISPEC_VERSION},
                  {"inputs_hash", hash},
                  {"config", config.doc},
                  {"precision_bits", runner.bits()},
                  {"workers", opts.workers},
                  {"wall_time_s", wall},
                  {"outputs", rep.outputs}};
    manifest["seed"] = config.seed ? json(*config.seed) : json(nullptr);
    const std::string path = config.output + ".manifest.json";
    atomic_write(path, manifest.dump(2) + "\n");
    rep.outputs.push_back(path);
    rep.message = "ok";
  } catch (const Error& e) {
    rep.error = e.code();
    rep.exit_code = is_numerical_domain(e.code()) ? 2 : 1;
    rep.message = std::string(to_string(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    rep.exit_code = 1;
    rep.message = e.what();
  }
  return rep;
}

}  // namespace quasispec
