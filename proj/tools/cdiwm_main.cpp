#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "cdiwm/cli/commands.hpp"

namespace {

namespace fs = std::filesystem;
using cdiwm::cli::CommandResult;
using cdiwm::cli::RunConfig;

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) throw cdiwm::ConfigError("cannot write '" + path.string() + "'");
  file << content;
}

void emit(const CommandResult& result, const std::string& out, const std::string& format) {
  if (format != "csv" && format != "json")
    throw cdiwm::ConfigError("--format must be csv or json");

  if (format == "json") {
    nlohmann::ordered_json doc;
    doc["tables"] = nlohmann::ordered_json::object();
    for (const auto& named : result.tables)
      doc["tables"][named.name] = named.table.to_json();
    const std::string text = doc.dump(2) + "\n";
    if (out.empty())
      std::cout << text;
    else
      write_file(out, text);
    return;
  }

  if (out.empty()) {
    for (const auto& named : result.tables) {
      if (result.tables.size() > 1) std::cout << "## " << named.name << "\n";
      std::cout << named.table.to_csv();
    }
    return;
  }

  if (result.tables.size() == 1) {
    const fs::path csv_path(out);
    write_file(csv_path, result.tables.front().table.to_csv());
    fs::path sidecar = csv_path;
    sidecar.replace_extension(".meta.json");
    write_file(sidecar, result.tables.front().table.metadata.dump(2) + "\n");
    return;
  }

  // multi-table commands treat --out as a directory
  const fs::path dir(out);
  fs::create_directories(dir);
  for (const auto& named : result.tables) {
    write_file(dir / (named.name + ".csv"), named.table.to_csv());
    write_file(dir / (named.name + ".meta.json"), named.table.metadata.dump(2) + "\n");
  }
}

int error_exit(const char* kind, const std::string& message, int code) {
  nlohmann::ordered_json diagnostic;
  diagnostic["error"] = kind;
  diagnostic["message"] = message;
  std::cerr << diagnostic.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cdiwm: attosecond delay estimation via conjugated destructive "
               "interference, simulated end to end"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string format = "csv";
  std::string figure;

  app.add_option("--config", config_path,
                 "configuration file (default: $CDIWM_CONFIG if set)");
  app.add_option("--out", out_path,
                 "output file (single table) or directory (multi-table commands)");
  app.add_option("--format", format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  // every config key doubles as a flag of the same dotted name
  std::map<std::string, std::string> overrides;
  for (const auto& key : RunConfig::known_keys())
    app.add_option("--" + key, overrides[key], "override config key " + key);

  auto* spectrum = app.add_subcommand("spectrum", "postselected spectrum, raw and OSA-binned");
  auto* timedomain = app.add_subcommand("timedomain", "temporal density via the transform path");
  auto* sweep = app.add_subcommand("sweep", "parameter sweep over tau or epsilon");
  auto* resolve = app.add_subcommand("resolve", "shift-detection thresholds for both schemes");
  auto* figures = app.add_subcommand("figures", "figure-data presets");
  figures->add_option("figure", figure, "one of fig1, fig2, fig4, fig5")->required();
  for (auto* sub : {spectrum, timedomain, sweep, resolve, figures}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return error_exit("config", e.what(), 2);
  }

  try {
    RunConfig run;
    if (config_path.empty()) {
      if (const char* env = std::getenv("CDIWM_CONFIG")) config_path = env;
    }
    if (!config_path.empty()) run.apply_file(config_path);
    for (const auto& key : RunConfig::known_keys())
      if (app.count("--" + key) > 0) run.set(key, overrides[key]);

    CommandResult result;
    if (spectrum->parsed())
      result = cdiwm::cli::cmd_spectrum(run);
    else if (timedomain->parsed())
      result = cdiwm::cli::cmd_timedomain(run);
    else if (sweep->parsed())
      result = cdiwm::cli::cmd_sweep(run);
    else if (resolve->parsed())
      result = cdiwm::cli::cmd_resolve(run);
    else
      result = cdiwm::cli::cmd_figures(run, figure);

    emit(result, out_path, format);
    return 0;
  } catch (const cdiwm::ConfigError& e) {
    return error_exit("config", e.what(), 2);
  } catch (const cdiwm::NumericDomainError& e) {
    return error_exit("numeric-domain", e.what(), 3);
  } catch (const cdiwm::EstimationError& e) {
    return error_exit("estimation", e.what(), 4);
  } catch (const std::exception& e) {
    return error_exit("internal", e.what(), 1);
  }
}
