// descentlab <experiment> --config <path> [--seed N] [--out path] [--threads N]
// descentlab validate --config <path>
//
// Exit codes: 0 success, 1 experiment failure, 2 usage or configuration error.

#include "descentlab/harness/config.hpp"
#include "descentlab/harness/experiments.hpp"
#include "descentlab/types.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace dh = descentlab::harness;

namespace {

struct RunArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-norm interpolation and double-descent experiments"};
  app.require_subcommand(1);

  RunArgs args;
  std::string chosen;

  auto* validate = app.add_subcommand("validate", "Check a config file and print its effective values");
  validate->add_option("--config", args.config_path, "Config file")->required();

  for (const std::string& name : dh::experiment_names()) {
    auto* sub = app.add_subcommand(name, "Run the " + name + " experiment");
    sub->add_option("--config", args.config_path, "Config file")->required();
    sub->add_option("--seed", args.seed, "Override the master seed");
    sub->add_option("--out", args.out, "Output CSV path");
    sub->add_option("--threads", args.threads, "Worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    sub->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  dh::ExperimentConfig cfg;
  try {
    const auto raw = dh::read_config_file(args.config_path);
    dh::Overrides ov;
    if (!chosen.empty()) {
      ov.experiment = chosen;
    }
    ov.seed = args.seed;
    ov.output_path = args.out;
    ov.threads = args.threads;
    cfg = dh::resolve_config(raw, ov);
  } catch (const descentlab::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  if (validate->parsed()) {
    for (const std::string& line : cfg.echo()) {
      std::cout << line << '\n';
    }
    std::cout << "output = " << cfg.output_path << '\n';
    return 0;
  }
  return dh::run(cfg, std::cout, std::cerr);
}
