#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Variational cluster approximation with emulated quantum cluster solver"};
  app.require_subcommand(1);
  qvca::cli::Options opt;
  std::uint64_t seed = 0;
  for (const auto& name : qvca::cli::commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config, "run configuration (JSON)")->required();
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--threads", opt.threads, "OpenMP threads")->check(CLI::NonNegativeNumber);
    sub->add_option("--backend", opt.backend, "override backend.kind")->check(CLI::IsMember({"ed", "emulator"}));
    sub->callback([&opt, &seed, sub, name] {
      opt.command = name;
      if (sub->count("--seed")) opt.seed = seed;
    });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : qvca::cli::kConfigError;
  }
  return qvca::cli::run(opt, std::cerr);
}
