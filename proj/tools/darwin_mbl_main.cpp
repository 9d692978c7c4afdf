#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "darwin_mbl/darwin_mbl.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitPartial = 3;

int default_threads() {
  if (const char* env = std::getenv("DARWIN_MBL_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid DARWIN_MBL_THREADS='" << env << "'\n";
  }
  return 1;
}

int exit_code_for(dmbl_status status) {
  switch (status) {
    case DMBL_OK: return kExitOk;
    case DMBL_PARTIAL: return kExitPartial;
    case DMBL_ERR_PARSE:
    case DMBL_ERR_VALIDATION: return kExitValidation;
    default: return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum Darwinism in a disordered Heisenberg environment"};
  app.set_version_flag("--version", std::string(dmbl_version()));

  std::string protocol;
  std::string config_path;
  int threads = default_threads();
  std::uint64_t seed = 0;
  bool overwrite = false;

  app.add_option("protocol", protocol, "redundancy-curve | lr-sweep | ee-sweep | collapse | mobility-edge | "
                                       "lambda-sweep | fixed-initial-sweep")
      ->required();
  app.add_option("--config", config_path, "experiment config file")->required();
  app.add_option("--threads", threads, "worker threads (default: DARWIN_MBL_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "override the config's master seed");
  app.add_flag("--overwrite", overwrite, "replace existing output files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  dmbl_config* config = nullptr;
  if (const auto st = dmbl_config_load(config_path.c_str(), &config); st != DMBL_OK) {
    std::cerr << "darwin-mbl: " << dmbl_last_error() << '\n';
    return exit_code_for(st);
  }
  if (protocol != dmbl_config_protocol(config)) {
    std::cerr << "darwin-mbl: validation-error: protocol: command line asks for '" << protocol
              << "' but the config declares '" << dmbl_config_protocol(config) << "'\n";
    dmbl_config_free(config);
    return kExitValidation;
  }
  if (*seed_opt) dmbl_config_set_seed(config, seed);

  const dmbl_run_options options{threads, overwrite ? 1 : 0};
  dmbl_run_report report{};
  const auto st = dmbl_run(config, &options, &report);
  dmbl_config_free(config);

  if (st == DMBL_OK || st == DMBL_PARTIAL) {
    std::cout << "results: " << report.results_path << '\n'
              << "manifest: " << report.manifest_path << '\n'
              << "hard failures: " << report.hard_failures << ", degenerate realizations: " << report.soft_failures
              << ", wall time: " << report.wall_seconds << " s\n";
  }
  if (st != DMBL_OK) std::cerr << "darwin-mbl: " << dmbl_status_name(st) << ": " << dmbl_last_error() << '\n';
  return exit_code_for(st);
}
