// artic: batch tooling for articulated scene annotation, conversion and evaluation.

#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace artic::cli;

  CLI::App app{"Articulated scene toolkit: annotation checks, USDA conversion, posing, editing and evaluation"};
  app.name("artic");
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions common;
  app.add_option("-j,--jobs", common.jobs, "Worker threads for multi-scene commands")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--seed", common.seed, "Random seed")->capture_default_str();
  app.add_flag("--strict", common.strict, "Treat warnings as errors");
  app.add_flag("-q,--quiet", common.quiet, "Suppress informational logging");

  int exit_code = 0;
  register_commands(app, common, exit_code);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    log_error(e.what());
    return 1;
  }
  return exit_code;
}
