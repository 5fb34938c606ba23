// rashba_cli: run one scenario (config file or built-in) into an output directory.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rashba/runner.hpp"
#include "rashba/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spin transport in a Rashba 2DEG: kinetic and drift-diffusion solvers with validation suites"};
  std::string config, builtin, out = "out";
  std::vector<std::string> overrides;
  bool list = false, print = false, quiet = false;
  app.add_option("--config", config, "scenario file");
  app.add_option("--scenario", builtin, "built-in scenario name (see --list-scenarios)");
  app.add_option("--out", out, "output directory")->capture_default_str();
  app.add_option("--set", overrides, "override, section.key=value (repeatable)");
  app.add_flag("--list-scenarios", list, "list built-in scenarios and exit");
  app.add_flag("--print-config", print, "print the canonical scenario and exit");
  app.add_flag("--quiet", quiet, "no progress output");
  app.set_version_flag("--version", rashba::version);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rashba::exit_usage;
  }

  if (list) {
    for (const auto& b : rashba::builtin_scenarios()) std::cout << b.name << "\n    " << b.covers << '\n';
    return 0;
  }
  if (config.empty() == builtin.empty()) {
    std::cerr << "error: give exactly one of --config or --scenario\n";
    return rashba::exit_usage;
  }

  rashba::Scenario scenario;
  try {
    scenario = config.empty() ? rashba::builtin_scenario(builtin, overrides) : rashba::parse_config(config, overrides);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return rashba::exit_usage;
  }
  if (print) {
    std::cout << rashba::emit_config(scenario);
    return 0;
  }
  try {
    return rashba::run_scenario(scenario, out, quiet ? nullptr : &std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return rashba::exit_usage;
  }
}
