#include <CLI11.hpp>

#include <iostream>

#include "bogolib/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hartree and Bogoliubov energies of mean-field Bose gases"};
  app.require_subcommand(1, 1);
  bogolib::CommandOptions opts;
  std::string out_dir;
  std::uint64_t seed = 0;

  for (const char* name : {"hartree", "bogoliubov", "manybody", "checks"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config, "run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    sub->add_option("--seed", seed, "random seed (overrides [random] seed)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : bogolib::kExitConfig;
  }
  auto* sub = app.get_subcommands().front();
  if (sub->count("--out")) opts.out_dir = out_dir;
  if (sub->count("--seed")) opts.seed = seed;
  return bogolib::run_command(sub->get_name(), opts, std::cout, std::cerr);
}
