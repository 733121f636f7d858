// quasispec <task> --config path.json [--workers k] [--verbose]
#include "quasispec/quasispec.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

void log_line(const char* line, void*) { std::cerr << "quasispec: " << line << '\n'; }

std::string take(char* s) {
  std::string out = s ? s : "";
  qs_string_free(s);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasiperiodic cocycle and spectral-dimension experiments"};
  app.set_version_flag("--version", std::string(qs_version()));
  std::string task, config_path;
  int workers = 1;
  bool verbose = false;
  app.add_option("task", task, "cf, delta, lyapunov, gordon, specdim or scan")
      ->required()
      ->check(CLI::IsMember({"cf", "delta", "lyapunov", "gordon", "specdim", "scan"}));
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--workers", workers, "worker threads")->check(CLI::Range(1, 1024));
  app.add_flag("--verbose", verbose, "progress on stderr");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "quasispec: cannot read " << config_path << '\n';
    return 1;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  qs_experiment* exp = nullptr;
  char* violations = nullptr;
  if (qs_experiment_parse(buf.str().c_str(), task.c_str(), &exp, &violations) != QS_OK) {
    const std::string v = take(violations);
    const auto arr = nlohmann::json::parse(v, nullptr, false);
    if (arr.is_array()) {
      for (const auto& x : arr) {
        std::cerr << "quasispec: " << x.value("kind", "") << ": " << x.value("message", "") << '\n';
      }
    } else {
      std::cerr << "quasispec: " << qs_last_error() << '\n';
    }
    return 1;
  }

  int exit_code = 0;
  char* report = nullptr;
  const qs_status st = qs_experiment_run(exp, workers, verbose ? log_line : nullptr, nullptr, &exit_code, &report);
  qs_experiment_free(exp);
  if (st != QS_OK) {
    std::cerr << "quasispec: " << qs_last_error() << '\n';
    return 1;
  }
  const auto rep = nlohmann::json::parse(take(report), nullptr, false);
  if (exit_code != 0) {
    std::cerr << "quasispec: " << rep.value("message", std::string("failed")) << '\n';
  } else if (verbose) {
    for (const auto& p : rep["outputs"]) std::cerr << "quasispec: output " << p.get<std::string>() << '\n';
  }
  return exit_code;
}
