// Command-line frontend: one binary, subcommands selected by the config file.
#include <CLI11.hpp>

#include "dynbit/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"dynamical bit sequence toolkit"};

  dynbit::cli::CliOptions options;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;

  app.add_option("--config", options.config_path, "experiment config (JSON)")
      ->required();
  auto* seed_opt =
      app.add_option("--seed", seed, "override the config seed (U64)");
  app.add_option("--threads", options.threads, "worker pool size")
      ->check(CLI::Range(1, 256));
  auto* out_opt = app.add_option("--out", out, "output artifact path");
  auto* format_opt =
      app.add_option("--format", format, "output format (csv or json)")
          ->check(CLI::IsMember({"csv", "json"}));

  CLI11_PARSE(app, argc, argv);

  if (*seed_opt) options.seed_override = seed;
  if (*out_opt) options.out_override = out;
  if (*format_opt) options.format_override = format;

  return dynbit::cli::run(options);
}
