#include <CLI11.hpp>

#include <iostream>

#include "qftm/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qftm: local measurement schemes for a lattice scalar field"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string config = "configs/default.cfg";
  std::string out = "out";
  std::uint64_t seed = 0;
  bool parallel = false;
  double scale = 1.0;
  app.add_option("--config", config, "scenario file");
  app.add_option("--out", out, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "overrides the config seed");
  app.add_flag("--parallel", parallel, "run independent suites concurrently");
  app.add_option("--tolerance-scale", scale, "multiplies every upper-bound tolerance")->check(CLI::PositiveNumber);
  for (const char* sub : {"green", "sorkin", "scatter", "measure", "causal", "verify"}) app.add_subcommand(sub);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors count as configuration errors.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  qftm::RunOptions options;
  if (*seed_opt) options.seed = seed;
  options.parallel = parallel;
  options.tolerance_scale = scale;
  return qftm::run(config, app.get_subcommands().front()->get_name(), out, options, std::cerr);
}
