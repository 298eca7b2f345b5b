// Experiment orchestration behind the command-line frontend: config
// validation, dispatch to the library modules, and deterministic emission of
// result artifacts.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace dynbit::cli {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Exit codes of the frontend.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitBudget = 4;

// Schema validation: required fields per command, unknown fields rejected,
// seed mandatory for stochastic commands.
void validate_config(const nlohmann::json& config);

// Executes a validated config and returns the full result document
// (config hash, seed, results). Deterministic for a fixed config and seed,
// regardless of the thread count.
nlohmann::json run_config(const nlohmann::json& config, int threads);

// Renders the main result table as CSV with summary comment lines.
std::string render_csv(const nlohmann::json& document);

struct CliOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_override;
  std::optional<std::string> format_override;
  int threads = 1;
};

// Full frontend: load, validate, run, write artifact. Returns an exit code
// and prints a machine-readable error JSON to stderr on failure.
int run(const CliOptions& options);

}  // namespace dynbit::cli
