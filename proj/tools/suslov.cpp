#include <iostream>

#include "suslov/cli.hpp"

int main(int argc, char** argv) {
  using namespace suslov::cli;
  CLI::App app{"Suslov problem with a Klebsh-Tisserand potential: level sets, equilibria, orbits"};
  app.name("suslov");
  RunConfig config;
  std::string sweep_spec;
  configure(app, config, sweep_spec);
  try {
    app.parse(argc, argv);
    finish_parse(config, sweep_spec);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  return run(config, std::cout, std::cerr);
}
