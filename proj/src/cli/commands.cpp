#include "cdiwm/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cdiwm/units.hpp"

namespace cdiwm::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using analytics::SchemeKind;

nlohmann::ordered_json base_metadata(const RunConfig& config, const std::string& command) {
  nlohmann::ordered_json meta;
  meta["tool"] = kToolName;
  meta["version"] = kToolVersion;
  meta["command"] = command;
  meta["config"] = config.canonical_text();
  meta["warnings"] = nlohmann::ordered_json::array();
  return meta;
}

void add_warning(OutputTable& table, const std::string& message) {
  table.metadata["warnings"].push_back(message);
}

/// Piecewise-constant binned density (intensity / bin width) at each sample
/// frequency; zero outside the OSA span.
std::vector<double> binned_density_per_sample(const numerics::SpectralDensitySamples& samples,
                                              const instrument::BinnedSpectrum& binned) {
  std::vector<double> out(samples.values.size(), 0.0);
  for (std::size_t i = 0; i < samples.values.size(); ++i) {
    const double omega = samples.grid.point(static_cast<int>(i));
    if (omega < binned.edges.front() || omega >= binned.edges.back()) continue;
    const auto it = std::upper_bound(binned.edges.begin(), binned.edges.end(), omega);
    const auto bin = static_cast<std::size_t>(it - binned.edges.begin() - 1);
    const double width = binned.edges[bin + 1] - binned.edges[bin];
    out[i] = binned.intensities[bin] / width;
  }
  return out;
}

}  // namespace

CommandResult cmd_spectrum(const RunConfig& run) {
  run.validate();
  const numerics::ExperimentConfig config = run.experiment();
  const instrument::OsaSpec osa = run.osa();

  const auto samples = numerics::sample_spectrum(config);
  const auto binned = instrument::bin_spectrum(samples, osa);
  const auto density = binned_density_per_sample(samples, binned);

  const double extinction =
      config.tau != 0.0 ? numerics::extinction_frequency(config.selection, config.tau) : kNaN;
  const auto peaks = numerics::peak_positions(samples, extinction);

  OutputTable table;
  table.columns = {"omega_radps", "S", "S_binned"};
  table.units = {"rad/ps", "ps/rad", "ps/rad"};
  table.rows.reserve(samples.values.size());
  for (std::size_t i = 0; i < samples.values.size(); ++i)
    table.rows.push_back({samples.grid.point(static_cast<int>(i)), samples.values[i], density[i]});

  table.metadata = base_metadata(run, "spectrum");
  table.metadata["tau_s_as"] =
      units::ps_to_as(analytics::cdi_working_point(config.meter, config.selection));
  if (std::isnan(extinction))
    table.metadata["extinction_radps"] = nullptr;
  else
    table.metadata["extinction_radps"] = extinction;
  table.metadata["peak_low_radps"] = peaks.omega_low;
  table.metadata["peak_high_radps"] = peaks.omega_high;
  table.metadata["single_peak"] = peaks.single_peak;
  table.metadata["probability_exact"] =
      postselection_probability(config.meter, config.selection, config.tau);
  table.metadata["spectrum_integral"] = numerics::integrate(samples);
  for (const auto& w : samples.warnings) add_warning(table, w);

  return {{{"spectrum", std::move(table)}}};
}

CommandResult cmd_timedomain(const RunConfig& run) {
  run.validate();
  const numerics::ExperimentConfig config = run.experiment();

  const auto temporal =
      numerics::time_domain_density(config, config.time_half_window(), config.n_time);
  const auto samples = numerics::sample_spectrum(config);

  OutputTable table;
  table.columns = {"t_as", "T"};
  table.units = {"as", "1/ps"};
  table.rows.reserve(temporal.values.size());
  for (std::size_t i = 0; i < temporal.values.size(); ++i)
    table.rows.push_back({units::ps_to_as(temporal.time(static_cast<int>(i))), temporal.values[i]});

  const double spectral_integral = numerics::integrate(samples);
  const double temporal_integral = numerics::integrate(temporal);
  double peak = 0.0;
  for (const double v : temporal.values) peak = std::max(peak, v);
  // t = 0 sits exactly at index n/2 of the transform grid
  const double center = temporal.values[temporal.values.size() / 2];

  table.metadata = base_metadata(run, "timedomain");
  table.metadata["parseval_spectral"] = spectral_integral;
  table.metadata["parseval_temporal"] = temporal_integral;
  table.metadata["parseval_rel_error"] =
      spectral_integral > 0.0 ? std::abs(temporal_integral - spectral_integral) / spectral_integral
                              : kNaN;
  table.metadata["density_at_t0"] = center;
  table.metadata["density_peak"] = peak;
  table.metadata["tau_s_as"] =
      units::ps_to_as(analytics::cdi_working_point(config.meter, config.selection));
  for (const auto& w : samples.warnings) add_warning(table, w);

  return {{{"timedomain", std::move(table)}}};
}

namespace {

struct SweepRow {
  double var;
  double mean_shift = kNaN;
  double peak_low = kNaN;
  double peak_high = kNaN;
  double shift_rate = kNaN;
  double p_exact = kNaN;
  double p_swm = kNaN;
  double p_cdiwm = kNaN;
  double res_swm = kNaN;
  double res_cdiwm = kNaN;
  bool undefined_shift = false;
};

SweepRow evaluate_sweep_point(const numerics::ExperimentConfig& point,
                              const analytics::OsaResolution& resolution, double var) {
  SweepRow row;
  row.var = var;
  const MeterSpec& meter = point.meter;
  const SelectionSpec& sel = point.selection;

  row.p_exact = postselection_probability(meter, sel, point.tau);
  row.p_swm = analytics::postselection_probability_approx(SchemeKind::kSwm, meter, sel);
  row.p_cdiwm = analytics::postselection_probability_approx(SchemeKind::kCdiwm, meter, sel);
  row.res_swm = analytics::resolution_limit(SchemeKind::kSwm, meter, sel, resolution);
  row.res_cdiwm = analytics::resolution_limit(SchemeKind::kCdiwm, meter, sel, resolution);

  try {
    row.mean_shift = analytics::mean_spectral_shift(meter, sel, point.tau);
    row.shift_rate = analytics::shift_rate(meter, sel, point.tau);
  } catch (const NumericDomainError&) {
    row.undefined_shift = true;
    return row;
  }

  const auto samples = numerics::sample_spectrum(point);
  const double extinction =
      point.tau != 0.0 ? numerics::extinction_frequency(sel, point.tau) : kNaN;
  const auto peaks = numerics::peak_positions(samples, extinction);
  row.peak_low = peaks.omega_low - meter.omega0;
  row.peak_high = peaks.omega_high - meter.omega0;
  return row;
}

OutputTable sweep_table(const RunConfig& run) {
  run.validate();
  const numerics::ExperimentConfig base = run.experiment();
  const analytics::OsaResolution resolution{run.osa().resolution_angular()};
  const bool tau_sweep = run.sweep_variable == "tau";

  OutputTable table;
  table.columns = {"var",     "mean_shift", "peak_low",     "peak_high",
                   "shift_rate", "P_exact", "P_swm_approx", "P_cdiwm_approx",
                   "res_swm", "res_cdiwm"};
  table.units = {tau_sweep ? "as" : "rad",
                 "rad/ps",
                 "rad/ps",
                 "rad/ps",
                 "rad/ps per ps",
                 "1",
                 "1",
                 "1",
                 "ps",
                 "ps"};
  table.metadata = base_metadata(run, "sweep");
  table.metadata["sweep_variable"] = run.sweep_variable;

  bool any_undefined = false;
  const double step = (run.sweep_max - run.sweep_min) / (run.sweep_n - 1);
  for (int i = 0; i < run.sweep_n; ++i) {
    const double var = run.sweep_min + i * step;
    numerics::ExperimentConfig point = base;
    if (tau_sweep) {
      point.tau = units::as_to_ps(var);
    } else {
      point.selection.epsilon = var;
      if (run.sweep_at_working_point)
        point.tau = analytics::cdi_working_point(point.meter, point.selection);
    }
    const SweepRow row = evaluate_sweep_point(point, resolution, var);
    any_undefined |= row.undefined_shift;
    table.rows.push_back({row.var, row.mean_shift, row.peak_low, row.peak_high,
                          row.shift_rate, row.p_exact, row.p_swm, row.p_cdiwm,
                          row.res_swm, row.res_cdiwm});
  }
  if (any_undefined)
    add_warning(table,
                "sweep crossed a zero-probability point; undefined shifts emitted as nan");
  if (!tau_sweep)
    table.metadata["epsilon_rows_at_working_point"] = run.sweep_at_working_point;
  return table;
}

}  // namespace

CommandResult cmd_sweep(const RunConfig& run) {
  return {{{"sweep", sweep_table(run)}}};
}

namespace {

std::vector<double> geometric_ladder(double lo_as, double hi_as, int n) {
  std::vector<double> ladder(static_cast<std::size_t>(n));
  if (n == 1) {
    ladder[0] = units::as_to_ps(lo_as);
    return ladder;
  }
  const double ratio = std::log(hi_as / lo_as) / (n - 1);
  for (int i = 0; i < n; ++i)
    ladder[static_cast<std::size_t>(i)] = units::as_to_ps(lo_as * std::exp(ratio * i));
  return ladder;
}

OutputTable resolve_table(const RunConfig& run, SchemeKind scheme) {
  const numerics::ExperimentConfig config = run.experiment();
  const instrument::OsaSpec osa = run.osa();
  const analytics::OsaResolution resolution{osa.resolution_angular()};
  const std::vector<double> ladder =
      geometric_ladder(run.resolve_dtau_min_as, run.resolve_dtau_max_as, run.resolve_n_ladder);

  OutputTable table;
  table.columns = {"dtau_as", "detection_fraction", "mean_abs_shift"};
  table.units = {"as", "1", "rad/ps"};
  table.metadata = base_metadata(run, "resolve");
  table.metadata["scheme"] = analytics::scheme_name(scheme);
  table.metadata["mode"] = run.resolve_mode;
  table.metadata["resolution_element_radps"] = resolution.delta_omega;
  table.metadata["resolution_limit_as"] = units::ps_to_as(
      analytics::resolution_limit(scheme, config.meter, config.selection, resolution));

  if (run.resolve_mode == "deterministic") {
    const double tau_ref =
        scheme == SchemeKind::kCdiwm
            ? analytics::cdi_working_point(config.meter, config.selection)
            : 0.0;
    numerics::ExperimentConfig at_ref = config;
    at_ref.tau = tau_ref;
    const double reference =
        instrument::bin_spectrum(numerics::sample_spectrum(at_ref), osa).centroid();
    for (const double dtau : ladder) {
      numerics::ExperimentConfig at = config;
      at.tau = tau_ref + dtau;
      const double displacement =
          std::abs(instrument::bin_spectrum(numerics::sample_spectrum(at), osa).centroid() -
                   reference);
      table.rows.push_back({units::ps_to_as(dtau),
                            displacement >= resolution.delta_omega ? 1.0 : 0.0,
                            displacement});
    }
    table.metadata["deterministic_dtau_as"] = units::ps_to_as(
        instrument::deterministic_detection_threshold(scheme, config, osa));
    table.metadata["reference_tau_as"] = units::ps_to_as(tau_ref);
    return table;
  }

  instrument::ResolutionExperimentParams params;
  params.dtau_ladder = ladder;
  params.photons = run.photons;
  params.trials = run.trials;
  params.null_trials = run.resolve_null_trials;
  params.seed = run.seed;
  params.source_referenced = run.resolve_source_referenced;

  const instrument::DetectionCurve curve =
      instrument::resolution_experiment(scheme, config, osa, params);
  for (const auto& point : curve.points)
    table.rows.push_back(
        {units::ps_to_as(point.dtau), point.detection_fraction, point.mean_abs_shift});

  table.metadata["reference_tau_as"] = units::ps_to_as(curve.reference_tau);
  table.metadata["null_threshold_radps"] = curve.null_threshold;
  table.metadata["null_threshold_quantile"] = curve.threshold_quantile;
  if (std::isnan(curve.min_detectable_dtau))
    table.metadata["min_detectable_dtau_as"] = nullptr;
  else
    table.metadata["min_detectable_dtau_as"] = units::ps_to_as(curve.min_detectable_dtau);
  table.metadata["deterministic_dtau_as"] = units::ps_to_as(curve.deterministic_dtau);
  table.metadata["photons"] = params.photons;
  table.metadata["trials"] = params.trials;
  table.metadata["null_trials"] = params.null_trials;
  table.metadata["source_referenced"] = params.source_referenced;
  return table;
}

}  // namespace

CommandResult cmd_resolve(const RunConfig& run) {
  run.validate();
  CommandResult result;
  result.tables.push_back({"resolve_swm", resolve_table(run, SchemeKind::kSwm)});
  result.tables.push_back({"resolve_cdiwm", resolve_table(run, SchemeKind::kCdiwm)});
  return result;
}

namespace {

// fig1 preset: wave packets in both domains across the CDI transition
constexpr double kFig1TausAs[] = {7.5, 8.0, 8.5, 9.0, 9.5};

CommandResult figures_fig1(const RunConfig& run) {
  run.validate();
  const numerics::ExperimentConfig base = run.experiment();

  OutputTable time_table;
  OutputTable spectrum_table;
  time_table.metadata = base_metadata(run, "figures fig1");
  spectrum_table.metadata = base_metadata(run, "figures fig1");

  time_table.columns = {"t_as"};
  time_table.units = {"as"};
  spectrum_table.columns = {"omega_radps"};
  spectrum_table.units = {"rad/ps"};

  bool first = true;
  for (const double tau_as : kFig1TausAs) {
    numerics::ExperimentConfig point = base;
    point.tau = units::as_to_ps(tau_as);

    const auto temporal =
        numerics::time_domain_density(point, point.time_half_window(), point.n_time);
    const auto samples = numerics::sample_spectrum(point);

    if (first) {
      time_table.rows.resize(temporal.values.size());
      for (std::size_t i = 0; i < temporal.values.size(); ++i)
        time_table.rows[i].push_back(units::ps_to_as(temporal.time(static_cast<int>(i))));
      spectrum_table.rows.resize(samples.values.size());
      for (std::size_t i = 0; i < samples.values.size(); ++i)
        spectrum_table.rows[i].push_back(samples.grid.point(static_cast<int>(i)));
      first = false;
    }
    const std::string suffix = format_number(tau_as) + "as";
    time_table.columns.push_back("T_" + suffix);
    time_table.units.push_back("1/ps");
    for (std::size_t i = 0; i < temporal.values.size(); ++i)
      time_table.rows[i].push_back(temporal.values[i]);
    spectrum_table.columns.push_back("S_" + suffix);
    spectrum_table.units.push_back("ps/rad");
    for (std::size_t i = 0; i < samples.values.size(); ++i)
      spectrum_table.rows[i].push_back(samples.values[i]);
  }

  CommandResult result;
  result.tables.push_back({"fig1_time", std::move(time_table)});
  result.tables.push_back({"fig1_spectrum", std::move(spectrum_table)});
  return result;
}

RunConfig with_sweep(const RunConfig& run, const std::string& variable, double lo,
                     double hi, int n, bool at_working_point) {
  RunConfig preset = run;
  preset.sweep_variable = variable;
  preset.sweep_min = lo;
  preset.sweep_max = hi;
  preset.sweep_n = n;
  preset.sweep_at_working_point = at_working_point;
  return preset;
}

CommandResult figures_fig2(const RunConfig& run) {
  // CDIWM at +|eps|, SWM at -|eps|, over the full delay window plus the
  // working-range inset.
  RunConfig cdiwm = run;
  cdiwm.epsilon_rad = std::abs(run.epsilon_rad);
  RunConfig swm = run;
  swm.epsilon_rad = -std::abs(run.epsilon_rad);

  CommandResult result;
  result.tables.push_back(
      {"fig2_cdiwm", sweep_table(with_sweep(cdiwm, "tau", 0.0, 20.0, 401, false))});
  result.tables.push_back(
      {"fig2_swm", sweep_table(with_sweep(swm, "tau", 0.0, 20.0, 401, false))});
  result.tables.push_back(
      {"fig2_inset", sweep_table(with_sweep(cdiwm, "tau", 7.5, 9.5, 201, false))});
  return result;
}

CommandResult figures_fig4(const RunConfig& run) {
  RunConfig cdiwm = run;
  cdiwm.epsilon_rad = std::abs(run.epsilon_rad);
  RunConfig swm = run;
  swm.epsilon_rad = -std::abs(run.epsilon_rad);

  CommandResult result;
  result.tables.push_back(
      {"fig4_cdiwm", sweep_table(with_sweep(cdiwm, "tau", 0.0, 20.0, 401, false))});
  result.tables.push_back(
      {"fig4_swm", sweep_table(with_sweep(swm, "tau", 0.0, 20.0, 401, false))});
  result.tables.push_back(
      {"fig4_inset", sweep_table(with_sweep(cdiwm, "tau", 7.5, 9.5, 201, false))});
  return result;
}

CommandResult figures_fig5(const RunConfig& run) {
  // Resolution and survival probability against the postselection angle:
  // one table per scheme working regime (tau_s(eps) rows and tau = 0 rows).
  RunConfig at_tau0 = run;
  at_tau0.tau_as = 0.0;

  CommandResult result;
  result.tables.push_back(
      {"fig5_working_point",
       sweep_table(with_sweep(run, "epsilon", 0.001, 0.1, 200, true))});
  result.tables.push_back(
      {"fig5_tau0", sweep_table(with_sweep(at_tau0, "epsilon", 0.001, 0.1, 200, false))});
  return result;
}

}  // namespace

CommandResult cmd_figures(const RunConfig& run, const std::string& figure) {
  if (figure == "fig1") return figures_fig1(run);
  if (figure == "fig2") return figures_fig2(run);
  if (figure == "fig4") return figures_fig4(run);
  if (figure == "fig5") return figures_fig5(run);
  throw ConfigError("figures: unknown figure '" + figure +
                    "' (expected fig1, fig2, fig4 or fig5)");
}

}  // namespace cdiwm::cli
