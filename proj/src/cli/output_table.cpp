#include "cdiwm/cli/output_table.hpp"

#include <charconv>
#include <cmath>

namespace cdiwm::cli {

namespace {

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (const char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string format_number(long long value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::string OutputTable::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += csv_quote(columns[i]);
  }
  out += '\n';
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (i) out += ',';
    out += csv_quote(units[i]);
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json OutputTable::to_json() const {
  nlohmann::ordered_json j;
  j["columns"] = columns;
  j["units"] = units;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json jrow = nlohmann::ordered_json::array();
    for (const double v : row) {
      if (std::isnan(v))
        jrow.push_back(nullptr);
      else
        jrow.push_back(v);
    }
    j["rows"].push_back(std::move(jrow));
  }
  j["metadata"] = metadata;
  return j;
}

}  // namespace cdiwm::cli
