#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "multipeak/config.hpp"
#include "multipeak/errors.hpp"
#include "multipeak/pipeline.hpp"

namespace {

constexpr const char* subcommands[][2] = {
    {"constants", "threshold exponent, coupling constants and pattern coefficients"},
    {"ground-state", "radial ground state profile and its tail constants"},
    {"ansatz", "admissible interval and superposition diagnostics per coupling"},
    {"reduce", "auxiliary solve at a fixed radius per coupling"},
    {"solve", "scan, minimize and assemble a solution per coupling"},
    {"rescale", "solve at unit frequency and map to each omega"},
    {"validate", "sampled checks of the estimate library"},
    {"sweep", "constants, ground state, solve for every coupling and validation"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-peak solutions for NLS with a point interaction"};
  app.require_subcommand(1, 1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory (overrides the configuration)");
  app.add_option("--seed", seed, "random seed (overrides the configuration)");
  app.add_option("--threads", threads, "worker threads (overrides the configuration)");
  for (const auto& [name, help] : subcommands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    multipeak::RunConfig config =
        config_path.empty() ? multipeak::RunConfig{} : multipeak::load_config(config_path);
    if (config_path.empty()) config.eta = {403.4287934927351};  // e^6
    if (out) config.out = *out;
    if (seed) config.seed = *seed;
    if (threads) config.threads = *threads;
    const auto command = multipeak::parse_command(app.get_subcommands().front()->get_name());
    return multipeak::run_command(*command, config, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return multipeak::exit_code_for(e);
  }
}
