#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdiwm/instrument.hpp"
#include "cdiwm/numerics.hpp"

namespace cdiwm::cli {

/// Resolved run configuration. The on-disk format is one dotted key per line
/// (`osa.resolution_nm = 0.01`, `#` comments); unknown keys are rejected.
/// Frequencies are entered in "THz" (numerically rad/ps), delays in
/// attoseconds, wavelengths in nm.
struct RunConfig {
  double omega0_thz = 2350.0;
  double delta_thz = 200.0;
  double epsilon_rad = 0.02;
  double tau_as = 8.5;

  double grid_omega_span_sigmas = 8.0;
  int grid_n_points = 16384;
  double time_window_factor = 20.0;
  int time_n_points = 16384;

  double osa_center_nm = 800.0;
  double osa_resolution_nm = 0.01;
  double osa_span_nm = 1000.0;
  int osa_n_bins = 128;

  long long photons = 1000000;
  int trials = 200;
  std::uint64_t seed = 12345;

  std::string sweep_variable = "tau";  // tau | epsilon
  double sweep_min = 7.5;              // as for tau sweeps, rad for epsilon sweeps
  double sweep_max = 9.5;
  int sweep_n = 201;
  bool sweep_at_working_point = false;  // epsilon sweeps: evaluate each row at tau_s(eps)

  std::string resolve_mode = "both";  // deterministic | montecarlo | both
  double resolve_dtau_min_as = 1e-5;
  double resolve_dtau_max_as = 10.0;
  int resolve_n_ladder = 13;
  int resolve_null_trials = 500;
  bool resolve_source_referenced = false;

  /// Set one dotted key from its text value. Throws ConfigError on unknown
  /// keys or unparseable values.
  void set(const std::string& key, const std::string& value);

  /// Parse `key = value` lines; later lines override earlier ones.
  void apply_text(const std::string& text);
  void apply_file(const std::string& path);

  /// Every key in registry order, one per line; re-parsing this text
  /// reproduces the exact configuration.
  std::string canonical_text() const;

  /// All known dotted keys, in canonical order.
  static const std::vector<std::string>& known_keys();

  void validate() const;

  numerics::ExperimentConfig experiment() const;
  instrument::OsaSpec osa() const;
};

}  // namespace cdiwm::cli
