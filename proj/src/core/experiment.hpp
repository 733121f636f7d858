#pragma once

#include "core/bigint.hpp"
#include "core/diophantine.hpp"
#include "core/error.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace quasispec {

enum class Task { cf, delta, lyapunov, gordon, specdim, scan };

std::optional<Task> task_from_string(std::string_view name);
const char* to_string(Task task);

struct Violation {
  std::string kind;  // malformed-json, unknown-task, missing-parameter, unknown-key, invalid-value, task-mismatch
  std::string name;  // offending key, empty when not applicable
  std::string message;
};

struct ExperimentConfig {
  Task task = Task::cf;
  nlohmann::json doc;
  std::string output;
  std::optional<std::uint64_t> seed;  // set for "random:seed" phases
};

struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<Violation> violations;  // every problem found, not only the first
  bool ok() const { return config.has_value(); }
};

/// task_override comes from the command line; it must agree with a "task" key
/// when both are present.
ParseResult parse_config(std::string_view text, std::optional<std::string> task_override = std::nullopt);

/// Working precision for real-number expansions: QUASISPEC_PRECISION_BITS or 256.
int precision_bits_from_env();

/// A number, decimal string, or "random:<seed>" (a 53-bit dyadic drawn from
/// mt19937_64 seeded with seed).
Rational theta_from_json(const nlohmann::json& j, std::optional<std::uint64_t>* seed_out = nullptr);
Rational random_theta(std::uint64_t seed);

/// {"real": text} | {"liouville": {"c": x, "depth": k, "cap_bits": b}} |
/// {"coefficients": [...], "depth": k} | a bare real literal or name.
FrequencyModel frequency_from_config(const nlohmann::json& j, std::size_t default_depth, int precision_bits);

struct RunOptions {
  int workers = 1;
  bool verbose = false;
  std::function<void(const std::string&)> log;  // receives progress lines when verbose
};

struct RunReport {
  int exit_code = 0;  // 0 ok, 1 configuration or io failure, 2 numerical-domain failure
  std::string message;
  std::optional<ErrorCode> error;
  std::vector<std::string> outputs;
};

RunReport run(const ExperimentConfig& config, const RunOptions& opts = {});

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace quasispec
