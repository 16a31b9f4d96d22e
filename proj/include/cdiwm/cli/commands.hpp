#pragma once

#include <string>
#include <vector>

#include "cdiwm/cli/config.hpp"
#include "cdiwm/cli/output_table.hpp"

namespace cdiwm::cli {

inline constexpr const char* kToolName = "cdiwm";
inline constexpr const char* kToolVersion = "1.0.0";

struct NamedTable {
  std::string name;
  OutputTable table;
};

struct CommandResult {
  std::vector<NamedTable> tables;
};

/// Postselected spectrum on the configured grid, raw and OSA-binned.
/// Columns: omega_radps, S, S_binned.
CommandResult cmd_spectrum(const RunConfig& config);

/// Temporal density from the transform path. Columns: t_as, T.
CommandResult cmd_timedomain(const RunConfig& config);

/// Parameter sweep over tau [as] or epsilon [rad]. Columns: var, mean_shift,
/// peak_low, peak_high, shift_rate, P_exact, P_swm_approx, P_cdiwm_approx,
/// res_swm, res_cdiwm. Rows where the shift is undefined carry NaN sentinels
/// and a metadata warning.
CommandResult cmd_sweep(const RunConfig& config);

/// Shift-detection experiment for both schemes: deterministic thresholds and
/// (unless resolve.mode = deterministic) Monte-Carlo detection curves.
CommandResult cmd_resolve(const RunConfig& config);

/// Figure-data presets: fig1, fig2, fig4, fig5.
CommandResult cmd_figures(const RunConfig& config, const std::string& figure);

}  // namespace cdiwm::cli
