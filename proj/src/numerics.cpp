#include "cdiwm/numerics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace cdiwm::numerics {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// FFTW's planner is not thread-safe; execution on private buffers is.
std::mutex g_fftw_planner_mutex;

void forward_dft_inplace(std::vector<Complex>& data) {
  auto* buffer = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(g_fftw_planner_mutex);
    plan = fftw_plan_dft_1d(static_cast<int>(data.size()), buffer, buffer,
                            FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(g_fftw_planner_mutex);
    fftw_destroy_plan(plan);
  }
}

double trapezoid(const std::vector<double>& values, double step) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    sum += 0.5 * (values[i] + values[i + 1]);
  return sum * step;
}

}  // namespace

void FrequencyGrid::validate() const {
  if (!(omega_max > omega_min))
    throw ConfigError("FrequencyGrid: omega_max must exceed omega_min");
  if (n < 2) throw ConfigError("FrequencyGrid: need at least 2 points");
}

void ExperimentConfig::validate() const {
  meter.validate();
  selection.validate();
  CouplingDelay{tau}.validate();
  if (!(omega_span_sigmas > 0.0))
    throw ConfigError("ExperimentConfig: omega_span_sigmas must be positive");
  if (n_omega < 2) throw ConfigError("ExperimentConfig: n_omega must be >= 2");
  if (!(time_window_factor > 0.0))
    throw ConfigError("ExperimentConfig: time_window_factor must be positive");
  if (!is_power_of_two(n_time))
    throw ConfigError("ExperimentConfig: n_time must be a power of two");
}

FrequencyGrid ExperimentConfig::frequency_grid() const {
  const double half_span = omega_span_sigmas * meter.delta;
  return {meter.omega0 - half_span, meter.omega0 + half_span, n_omega};
}

double integrate(const SpectralDensitySamples& samples) {
  return trapezoid(samples.values, samples.grid.step());
}

double integrate(const TemporalDensitySamples& samples) {
  return trapezoid(samples.values, samples.dt);
}

SpectralDensitySamples sample_spectrum(const ExperimentConfig& config) {
  config.validate();
  const FrequencyGrid grid = config.frequency_grid();
  grid.validate();

  SpectralDensitySamples out{grid, {}, config.meter.omega0, {}};
  const double lo = config.meter.omega0 - 6.0 * config.meter.delta;
  const double hi = config.meter.omega0 + 6.0 * config.meter.delta;
  if (grid.omega_min > lo || grid.omega_max < hi)
    out.warnings.push_back(
        "frequency grid narrower than omega0 +/- 6 delta; integrals may be truncated");

  out.values.resize(grid.n);
  for (int i = 0; i < grid.n; ++i)
    out.values[i] = spectral_density(config.meter, config.selection, config.tau,
                                     grid.point(i));
  return out;
}

double centroid_shift(const SpectralDensitySamples& samples) {
  const double mass = integrate(samples);
  if (!(mass > 0.0))
    throw NumericDomainError("centroid_shift: samples carry no mass");

  // First moment about omega0 directly; algebraically identical to
  // <omega> - omega0 but free of the large-offset cancellation.
  const double step = samples.grid.step();
  std::vector<double> weighted(samples.values.size());
  for (std::size_t i = 0; i < samples.values.size(); ++i)
    weighted[i] =
        samples.values[i] * (samples.grid.point(static_cast<int>(i)) - samples.omega0);
  return trapezoid(weighted, step) / mass;
}

double extinction_frequency(const SelectionSpec& sel, double tau) {
  if (tau == 0.0)
    throw NumericDomainError("extinction_frequency: no extinction point at tau = 0");
  return sel.epsilon / tau;
}

namespace {

// Parabolic vertex through (x0 +/- h, y) triplets on the log-density.
// Falls back to the raw grid point when a neighbor is nonpositive.
void refine_peak(const SpectralDensitySamples& samples, int index, int lo, int hi,
                 double& omega, double& value) {
  omega = samples.grid.point(index);
  value = samples.values[index];
  if (index <= lo || index >= hi) return;
  const double vm = samples.values[index - 1];
  const double vp = samples.values[index + 1];
  if (!(vm > 0.0) || !(value > 0.0) || !(vp > 0.0)) return;
  const double ym = std::log(vm);
  const double y0 = std::log(value);
  const double yp = std::log(vp);
  const double denom = ym - 2.0 * y0 + yp;
  if (denom >= 0.0) return;  // not a local maximum in log space
  const double offset = 0.5 * (ym - yp) / denom;
  omega += offset * samples.grid.step();
  value = std::exp(y0 - 0.25 * (ym - yp) * offset);
}

}  // namespace

PeakPair peak_positions(const SpectralDensitySamples& samples, double extinction) {
  const int n = static_cast<int>(samples.values.size());
  if (n < 3) throw NumericDomainError("peak_positions: too few samples");

  const auto argmax_in = [&](int lo, int hi) {  // inclusive range, -1 if empty
    int best = -1;
    for (int i = lo; i <= hi; ++i)
      if (best < 0 || samples.values[i] > samples.values[best]) best = i;
    return best;
  };

  const bool in_band = std::isfinite(extinction) &&
                       extinction > samples.grid.omega_min &&
                       extinction < samples.grid.omega_max;

  PeakPair out{};
  if (!in_band) {
    const int peak = argmax_in(0, n - 1);
    refine_peak(samples, peak, 0, n - 1, out.omega_low, out.value_low);
    out.omega_high = out.omega_low;
    out.value_high = out.value_low;
    out.single_peak = true;
    return out;
  }

  // split strictly below / above the extinction point
  int split = static_cast<int>((extinction - samples.grid.omega_min) / samples.grid.step());
  split = std::clamp(split, 0, n - 1);
  while (split > 0 && samples.grid.point(split) >= extinction) --split;

  const int lo_peak = argmax_in(0, split);
  const int hi_peak = argmax_in(split + 1, n - 1);
  const bool lo_empty = lo_peak < 0 || !(samples.values[lo_peak] > 0.0);
  const bool hi_empty = hi_peak < 0 || !(samples.values[hi_peak] > 0.0);

  if (lo_empty || hi_empty) {
    const int peak = lo_empty ? hi_peak : lo_peak;
    if (peak < 0) throw NumericDomainError("peak_positions: samples carry no mass");
    refine_peak(samples, peak, 0, n - 1, out.omega_low, out.value_low);
    out.omega_high = out.omega_low;
    out.value_high = out.value_low;
    out.single_peak = true;
    return out;
  }

  refine_peak(samples, lo_peak, 0, split, out.omega_low, out.value_low);
  refine_peak(samples, hi_peak, split + 1, n - 1, out.omega_high, out.value_high);
  out.single_peak = false;
  return out;
}

TemporalDensitySamples time_domain_density(const ExperimentConfig& config,
                                           double half_window, int n_points) {
  config.validate();
  if (!is_power_of_two(n_points))
    throw ConfigError("time_domain_density: n_points must be a power of two");
  if (!(half_window >= 10.0 / config.meter.delta))
    throw ConfigError("time_domain_density: window must span at least 10/delta");

  const int n = n_points;
  const double dt = 2.0 * half_window / n;
  const double dw = 2.0 * kPi / (n * dt);  // conjugate grid spacing
  const double center = config.meter.omega0;

  // Sample the amplitude on the conjugate grid; the (-1)^k premultiply folds
  // the grid centering into a plain forward FFT (remaining phases are unit
  // modulus and drop out of |.|^2).
  std::vector<Complex> buffer(n);
  double total_mass = 0.0;
  double edge_mass = 0.0;
  for (int k = 0; k < n; ++k) {
    const double omega = center + (k - n / 2) * dw;
    const Complex amplitude = postselected_amplitude(config.meter, config.selection,
                                                     config.tau, omega);
    buffer[k] = (k % 2 == 0) ? amplitude : -amplitude;
    const double mass = std::norm(amplitude);
    total_mass += mass;
    if (k < 3 || k >= n - 3) edge_mass += mass;
  }
  if (total_mass > 0.0 && edge_mass > 1e-8 * total_mass)
    throw NumericDomainError(
        "time_domain_density: spectral mass within 3 points of the band edge "
        "exceeds 1e-8 of total (aliasing)");

  forward_dft_inplace(buffer);

  TemporalDensitySamples out{-half_window, dt, {}};
  out.values.resize(n);
  const double scale = dw * dw / (2.0 * kPi);
  for (int j = 0; j < n; ++j) out.values[j] = scale * std::norm(buffer[j]);
  return out;
}

double analytic_time_density(const ExperimentConfig& config, double t) {
  const double delta = config.meter.delta;
  const double tau = config.tau;
  const double um = std::exp(-0.5 * delta * delta * (t - tau) * (t - tau));
  const double up = std::exp(-0.5 * delta * delta * (t + tau) * (t + tau));
  const double phase = 2.0 * (config.meter.omega0 * tau - config.selection.epsilon);
  const double scale = delta / (4.0 * std::sqrt(kPi));
  return scale * (um * um + up * up - 2.0 * um * up * std::cos(phase));
}

}  // namespace cdiwm::numerics
