// Deterministic result emission: canonical JSON, fixed-precision CSV, and
// the configuration hash carried by every output artifact.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace dynbit::report {

// 17 significant digits, '.' decimal; round-trips doubles exactly.
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view data);

// Hash over the semantic configuration: execution-only keys (out, format,
// threads) are dropped before canonical serialization.
std::string config_hash(const nlohmann::json& config);

struct CsvTable {
  std::vector<std::string> comments;  // emitted as '# key=value' lines
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string render() const;
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace dynbit::report
