#pragma once

#include <string>
#include <vector>

#include "cdiwm/quantum_core.hpp"

// Grid-based evaluation: quadrature, spectral centroid, extinction and peak
// location, and the time-domain density via a discrete Fourier transform with
// an exact analytic oracle. All functions are pure; the transform uses a
// private buffer per call.

namespace cdiwm::numerics {

/// Uniform frequency grid, endpoints inclusive.
struct FrequencyGrid {
  double omega_min;
  double omega_max;
  int n;

  void validate() const;  // omega_max > omega_min, n >= 2
  double step() const { return (omega_max - omega_min) / (n - 1); }
  double point(int i) const { return omega_min + i * step(); }
};

/// Sampled nonnegative spectral density with trapezoid-integrable weights.
/// omega0 is the reference center used for centroid shifts.
struct SpectralDensitySamples {
  FrequencyGrid grid;
  std::vector<double> values;
  double omega0 = 0.0;
  std::vector<std::string> warnings;
};

/// Sampled nonnegative temporal density on a uniform time grid.
struct TemporalDensitySamples {
  double t_min;  // [ps]
  double dt;     // [ps]
  std::vector<double> values;

  double time(int i) const { return t_min + i * dt; }
};

/// Full experiment description: meter + selection + coupling delay plus the
/// numerical grids used to evaluate it.
struct ExperimentConfig {
  MeterSpec meter;
  SelectionSpec selection;
  double tau = 0.0;  // [ps]

  double omega_span_sigmas = 8.0;    // frequency half-span, in units of delta
  int n_omega = 1 << 14;
  double time_window_factor = 20.0;  // time half-window, in units of 1/delta
  int n_time = 1 << 14;

  void validate() const;
  FrequencyGrid frequency_grid() const;
  double time_half_window() const { return time_window_factor / meter.delta; }
};

/// Trapezoid integral of the sampled density.
double integrate(const SpectralDensitySamples& samples);
double integrate(const TemporalDensitySamples& samples);

/// Pointwise evaluation of the postselected spectral density on the config
/// grid. Records a coverage warning if the grid spans less than
/// omega0 +/- 6 delta.
SpectralDensitySamples sample_spectrum(const ExperimentConfig& config);

/// Trapezoid first moment <omega> minus omega0. Throws NumericDomainError on
/// zero-mass samples.
double centroid_shift(const SpectralDensitySamples& samples);

/// Frequency eps/tau at which the postselected amplitude vanishes (the only
/// in-band root in the CDI regime); strictly decreasing in tau for eps > 0.
/// Throws NumericDomainError at tau = 0.
double extinction_frequency(const SelectionSpec& sel, double tau);

/// Lobe maxima on each side of the extinction point, refined by three-point
/// parabolic interpolation on the log-density.
struct PeakPair {
  double omega_low;
  double omega_high;
  double value_low;
  double value_high;
  bool single_peak;  // one-sided spectrum: both entries hold the same peak
};

/// A non-finite or out-of-band extinction degenerates to a single-peak search
/// over the whole grid.
PeakPair peak_positions(const SpectralDensitySamples& samples, double extinction);

/// Temporal density |F[postselected amplitude]|^2 on a uniform grid of
/// n_points covering [-half_window, half_window). Uses the symmetric
/// (2 pi)^{-1/2} transform convention, so the time integral equals the
/// spectral integral (Parseval). n_points must be a power of two and the
/// window at least 10/delta. Throws NumericDomainError if more than 1e-8 of
/// the spectral mass sits within three grid points of the conjugate band
/// edge (aliasing guard).
TemporalDensitySamples time_domain_density(const ExperimentConfig& config,
                                           double half_window, int n_points);

/// Closed-form temporal density
///   T(t) = delta/(4 sqrt(pi)) [u-^2 + u+^2 - 2 u- u+ cos(2(omega0 tau - eps))]
/// with u∓ = exp(-delta^2 (t ∓ tau)^2 / 2); the exact transform of each
/// Gaussian term under the same normalization as time_domain_density.
double analytic_time_density(const ExperimentConfig& config, double t);

}  // namespace cdiwm::numerics
