#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "commands.hpp"
#include "nlflat/errors.hpp"

namespace cli = nlflat::cli;

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal diffusion simulator and flattening verification harness"};
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::string format;
  int threads = 0;
  std::uint64_t seed = 0;

  std::vector<std::string> names(cli::kCommands.begin(), cli::kCommands.end());
  app.add_option("command", command, "Subcommand to run")->required()->check(CLI::IsMember(names));
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "Output directory (overrides output.directory)");
  auto* fmt = app.add_option("--format", format, "csv, json or both (overrides output.format)")
                  ->check(CLI::IsMember({"csv", "json", "both"}));
  app.add_option("--threads", threads, "OpenMP threads for the apply loops")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Seed for sampled inputs (overrides seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitConfigError;
  }

  try {
    auto cfg = cli::load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (fmt->count() > 0) cfg.format = cli::parse_format(format);
    if (seed_opt->count() > 0) cfg.seed = seed;
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif
    return cli::run(command, cfg);
  } catch (const nlflat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kExitConfigError;
  } catch (const nlflat::HypothesisViolation& e) {
    std::cerr << "config error: kernel rejected: " << e.what() << '\n';
    return cli::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return cli::kExitInternalError;
  }
}
