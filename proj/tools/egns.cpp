// Command-line runner for the enriched Galerkin Navier-Stokes experiments.
//
//   egns converge|noflow|cavity|step|run --config <path> [--out <dir>] [--serial]
//
// Exit codes: 0 success, 1 solver failure, 2 config or mesh error.

#include "egns/experiments.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

namespace {

int thread_count(const egns::RunConfig& config, bool serial) {
  if (serial) return 1;
  int n = config.threads_set ? config.assembly.threads
                             : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* cap = std::getenv("EGNS_THREADS")) {
    try {
      n = std::min(n, std::max(1, std::stoi(cap)));
    } catch (const std::exception&) {
      throw egns::ConfigError(std::string("invalid EGNS_THREADS value '") + cap + "'");
    }
  }
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pressure-robust enriched Galerkin solver for steady Navier-Stokes"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  bool serial = false;

  const char* names[] = {"converge", "noflow", "cavity", "step", "run"};
  const char* help[] = {"vortex convergence table", "no-flow test", "gradient-force cavity comparison",
                        "backward-facing step", "generic channel run"};
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", config_path, "INI configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    sub->add_flag("--serial", serial, "single-threaded assembly");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    egns::RunConfig config = egns::load_config(config_path);
    if (!config.experiment.empty() && config.experiment != command) {
      throw egns::ConfigError("config is for experiment '" + config.experiment + "', not '" + command + "'");
    }
    if (!out_dir.empty()) config.out_dir = out_dir;
    config.assembly.threads = thread_count(config, serial);

    if (command == "converge") return egns::cmd_converge(config, std::cout);
    if (command == "noflow") return egns::cmd_noflow(config, std::cout);
    if (command == "cavity") return egns::cmd_cavity(config, std::cout);
    if (command == "step") return egns::cmd_step(config, std::cout);
    return egns::cmd_run(config, std::cout);
  } catch (const egns::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const egns::MeshError& e) {
    std::cerr << "mesh error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
