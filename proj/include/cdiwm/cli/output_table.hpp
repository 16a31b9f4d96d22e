#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace cdiwm::cli {

/// Shortest round-trip decimal form (to_chars); "nan" for quiet NaNs.
std::string format_number(double value);
std::string format_number(long long value);

/// Numeric table with a units row under the header and a metadata block.
/// CSV output is RFC-4180 quoted with '.' decimal separators; metadata goes
/// to a JSON sidecar (or into the JSON rendering of the whole table).
struct OutputTable {
  std::vector<std::string> columns;
  std::vector<std::string> units;
  std::vector<std::vector<double>> rows;
  nlohmann::ordered_json metadata;

  std::string to_csv() const;
  nlohmann::ordered_json to_json() const;
};

}  // namespace cdiwm::cli
