#include <cstdint>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "anisolab/cli.hpp"

namespace {

struct SubArgs {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
};

CLI::App* add_subcommand(CLI::App& app, const std::string& name, const std::string& desc,
                         SubArgs& args) {
  CLI::App* sub = app.add_subcommand(name, desc);
  sub->add_option("--config", args.config, "JSON run configuration")->required();
  sub->add_option("--out", args.out, "output directory (default: current)");
  sub->add_option("--seed", args.seed, "override the config seed");
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("anisolab ") + aniso::kVersion +
               " — anisotropic oscillator laboratory: simulation, symplectic reduction, "
               "and superintegrability verification"};
  app.require_subcommand(1);

  SubArgs sim_args, verify_args, scan_args, reduce_args;
  CLI::App* sim =
      add_subcommand(app, "simulate", "integrate one trajectory and export CSV", sim_args);
  CLI::App* verify =
      add_subcommand(app, "verify", "run the verification suites against one parameter point",
                     verify_args);
  CLI::App* scan =
      add_subcommand(app, "scan", "run the verification suites over a list of parameter points",
                     scan_args);
  add_subcommand(app, "reduce-check",
                 "compare reduced dynamics against the projected full dynamics", reduce_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the error message
    return code == 0 ? 0 : 3;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const SubArgs& args = sub == sim      ? sim_args
                        : sub == verify ? verify_args
                        : sub == scan   ? scan_args
                                        : reduce_args;
  return aniso::cli::run_command(sub->get_name(), args.config, args.out, args.seed);
}
