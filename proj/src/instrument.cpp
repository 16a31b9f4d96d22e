#include "cdiwm/instrument.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "cdiwm/units.hpp"

namespace cdiwm::instrument {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFwhmToSigma = 2.355;

double quantile_nearest_rank(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const auto n = static_cast<long long>(values.size());
  long long rank = static_cast<long long>(std::ceil(q * static_cast<double>(n)));
  rank = std::clamp<long long>(rank, 1, n);
  return values[static_cast<std::size_t>(rank - 1)];
}

}  // namespace

double wavelength_to_angular(double lambda_nm) {
  if (!(lambda_nm > 0.0))
    throw ConfigError("wavelength_to_angular: wavelength must be positive");
  return 2.0 * kPi * units::kSpeedOfLightNmPerPs / lambda_nm;
}

void OsaSpec::validate(const MeterSpec& meter) const {
  if (!(resolution_wavelength_nm > 0.0))
    throw ConfigError("OsaSpec: resolution must be positive");
  if (!(center_wavelength_nm > 0.0) || !(span_wavelength_nm > 0.0))
    throw ConfigError("OsaSpec: center and span must be positive");
  if (n_bins < 8) throw ConfigError("OsaSpec: need at least 8 bins");
  const double lambda_lo = center_wavelength_nm - 0.5 * span_wavelength_nm;
  if (!(lambda_lo > 0.0))
    throw ConfigError("OsaSpec: span extends to nonpositive wavelengths");
  const double omega_hi = wavelength_to_angular(lambda_lo);
  const double omega_lo =
      wavelength_to_angular(center_wavelength_nm + 0.5 * span_wavelength_nm);
  if (omega_hi - omega_lo < 6.0 * meter.delta)
    throw ConfigError("OsaSpec: span must cover at least 6 delta in angular frequency");
  if (meter.omega0 <= omega_lo || meter.omega0 >= omega_hi)
    throw ConfigError("OsaSpec: span does not contain the meter center frequency");
}

double OsaSpec::resolution_angular() const {
  return 2.0 * kPi * units::kSpeedOfLightNmPerPs * resolution_wavelength_nm /
         (center_wavelength_nm * center_wavelength_nm);
}

std::vector<double> OsaSpec::bin_edges_angular() const {
  std::vector<double> edges(static_cast<std::size_t>(n_bins) + 1);
  const double lambda_lo = center_wavelength_nm - 0.5 * span_wavelength_nm;
  const double dlambda = span_wavelength_nm / n_bins;
  // uniform in wavelength; reversed so edges increase in omega
  for (int i = 0; i <= n_bins; ++i)
    edges[static_cast<std::size_t>(n_bins - i)] =
        wavelength_to_angular(lambda_lo + i * dlambda);
  return edges;
}

double BinnedSpectrum::total() const {
  double sum = 0.0;
  for (const double v : intensities) sum += v;
  return sum;
}

double BinnedSpectrum::centroid() const {
  double mass = 0.0;
  double moment = 0.0;
  for (std::size_t i = 0; i < intensities.size(); ++i) {
    mass += intensities[i];
    moment += intensities[i] * midpoint(static_cast<int>(i));
  }
  if (!(mass > 0.0)) throw NumericDomainError("BinnedSpectrum: zero total intensity");
  return moment / mass;
}

double CountRecord::centroid() const {
  double mass = 0.0;
  double moment = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const auto c = static_cast<double>(counts[i]);
    mass += c;
    moment += c * 0.5 * (bin_edges[i] + bin_edges[i + 1]);
  }
  if (!(mass > 0.0)) throw NumericDomainError("CountRecord: no photons recorded");
  return moment / mass;
}

BinnedSpectrum bin_spectrum(const numerics::SpectralDensitySamples& samples,
                            const OsaSpec& osa) {
  const std::vector<double> edges = osa.bin_edges_angular();

  // The span may reach past the sampled grid only where the density has
  // already died out; otherwise in-span mass would be silently dropped.
  double peak = 0.0;
  for (const double v : samples.values) peak = std::max(peak, v);
  const double slack = 1e-9 * (samples.grid.omega_max - samples.grid.omega_min);
  const bool low_uncovered = edges.front() < samples.grid.omega_min - slack &&
                             samples.values.front() > 1e-9 * peak;
  const bool high_uncovered = edges.back() > samples.grid.omega_max + slack &&
                              samples.values.back() > 1e-9 * peak;
  if (low_uncovered || high_uncovered)
    throw NumericDomainError("bin_spectrum: samples do not cover the OSA span");

  const int n = static_cast<int>(samples.values.size());
  const double step = samples.grid.step();

  // Gaussian kernel with FWHM equal to the OSA resolution. When the kernel
  // support is below one grid step the convolution is the identity.
  const double sigma = osa.resolution_angular() / kFwhmToSigma;
  const int half = static_cast<int>(std::ceil(6.0 * sigma / step));
  std::vector<double> smoothed;
  if (half < 1) {
    smoothed = samples.values;
  } else {
    std::vector<double> kernel(static_cast<std::size_t>(2 * half) + 1);
    double ksum = 0.0;
    for (int d = -half; d <= half; ++d) {
      const double u = d * step / sigma;
      ksum += kernel[static_cast<std::size_t>(d + half)] = std::exp(-0.5 * u * u);
    }
    for (double& k : kernel) k /= ksum;
    smoothed.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int d = -half; d <= half; ++d) {
        const int j = i + d;
        if (j < 0 || j >= n) continue;  // envelope is ~0 at the grid edges
        acc += kernel[static_cast<std::size_t>(d + half)] * samples.values[static_cast<std::size_t>(j)];
      }
      smoothed[static_cast<std::size_t>(i)] = acc;
    }
  }

  // Integrate the piecewise-constant reconstruction over each bin: every
  // sample owns a grid cell (half cells at the ends) whose mass is split
  // across bins by exact overlap. Keeps the sum of bins equal to the in-span
  // integral and maps flat densities to flat bins.
  BinnedSpectrum out{edges, std::vector<double>(static_cast<std::size_t>(osa.n_bins), 0.0)};
  for (int i = 0; i < n; ++i) {
    const double center = samples.grid.point(i);
    const double cell_lo = (i == 0) ? center : center - 0.5 * step;
    const double cell_hi = (i == n - 1) ? center : center + 0.5 * step;
    if (cell_hi <= edges.front() || cell_lo >= edges.back()) continue;
    const double value = smoothed[static_cast<std::size_t>(i)];
    auto it = std::upper_bound(edges.begin(), edges.end(), std::max(cell_lo, edges.front()));
    for (auto bin = static_cast<std::size_t>(it - edges.begin() - 1);
         bin < out.intensities.size() && edges[bin] < cell_hi; ++bin) {
      const double overlap =
          std::min(cell_hi, edges[bin + 1]) - std::max(cell_lo, edges[bin]);
      if (overlap > 0.0) out.intensities[bin] += overlap * value;
    }
  }
  return out;
}

CountRecord sample_counts(const BinnedSpectrum& binned, long long total_photons,
                          std::uint64_t seed) {
  if (total_photons < 0) throw ConfigError("sample_counts: negative photon count");
  const auto n = binned.intensities.size();
  for (const double v : binned.intensities)
    if (v < 0.0) throw NumericDomainError("sample_counts: negative bin intensity");
  if (!(binned.total() > 0.0))
    throw NumericDomainError("sample_counts: zero-mass bins vector");

  // suffix sums keep the conditional probabilities stable
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + binned.intensities[i];

  CountRecord record{binned.edges, std::vector<long long>(n, 0), total_photons, seed};
  std::mt19937_64 rng(seed);
  long long remaining = total_photons;
  for (std::size_t i = 0; i + 1 < n && remaining > 0; ++i) {
    if (!(suffix[i] > 0.0)) break;
    const double p = std::clamp(binned.intensities[i] / suffix[i], 0.0, 1.0);
    std::binomial_distribution<long long> draw(remaining, p);
    const long long c = draw(rng);
    record.counts[i] = c;
    remaining -= c;
  }
  if (remaining > 0) record.counts[n - 1] += remaining;
  return record;
}

const char* estimate_method_name(EstimateMethod method) {
  return method == EstimateMethod::kGridLikelihood ? "grid-likelihood"
                                                   : "centroid-inversion";
}

namespace {

numerics::SpectralDensitySamples spectrum_at(const numerics::ExperimentConfig& config,
                                             double tau) {
  numerics::ExperimentConfig c = config;
  c.tau = tau;
  return numerics::sample_spectrum(c);
}

BinnedSpectrum binned_at(const numerics::ExperimentConfig& config, const OsaSpec& osa,
                         double tau) {
  return bin_spectrum(spectrum_at(config, tau), osa);
}

EstimateReport estimate_by_likelihood(const CountRecord& record,
                                      const numerics::ExperimentConfig& config,
                                      const OsaSpec& osa,
                                      std::pair<double, double> window) {
  constexpr int kGridPoints = 257;
  const double lo = window.first;
  const double hi = window.second;
  if (!(hi > lo)) throw EstimationError("estimate_tau: empty search window");
  const double h = (hi - lo) / (kGridPoints - 1);

  std::vector<double> loglik(kGridPoints);
  for (int g = 0; g < kGridPoints; ++g) {
    const BinnedSpectrum predicted = binned_at(config, osa, lo + g * h);
    const double total = predicted.total();
    double ll = 0.0;
    for (std::size_t i = 0; i < record.counts.size(); ++i) {
      if (record.counts[i] == 0) continue;
      const double p = std::max(predicted.intensities[i] / total, 1e-300);
      ll += static_cast<double>(record.counts[i]) * std::log(p);
    }
    loglik[static_cast<std::size_t>(g)] = ll;
  }

  int best = 0;
  for (int g = 1; g < kGridPoints; ++g)
    if (loglik[static_cast<std::size_t>(g)] > loglik[static_cast<std::size_t>(best)])
      best = g;

  double tau_hat = lo + best * h;
  double std_error = std::numeric_limits<double>::quiet_NaN();
  if (best > 0 && best < kGridPoints - 1) {
    const double ym = loglik[static_cast<std::size_t>(best - 1)];
    const double y0 = loglik[static_cast<std::size_t>(best)];
    const double yp = loglik[static_cast<std::size_t>(best + 1)];
    const double curvature = (ym - 2.0 * y0 + yp) / (h * h);
    if (curvature < 0.0) {
      tau_hat += 0.5 * (ym - yp) / (ym - 2.0 * y0 + yp) * h;
      std_error = std::sqrt(-1.0 / curvature);
    }
  }
  return {tau_hat, std_error, EstimateMethod::kGridLikelihood};
}

EstimateReport estimate_by_centroid(const CountRecord& record,
                                    const numerics::ExperimentConfig& config,
                                    const OsaSpec& osa,
                                    std::pair<double, double> window) {
  const double lo = window.first;
  const double hi = window.second;
  if (!(hi > lo)) throw EstimationError("estimate_tau: empty search window");

  // Calibrate the instrument-chain centroid offset (asymmetric wavelength
  // bins, span truncation) at the window midpoint, then invert the
  // closed-form shift map.
  const double tau_mid = 0.5 * (lo + hi);
  const double offset = binned_at(config, osa, tau_mid).centroid() -
                        config.meter.omega0 -
                        analytics::mean_spectral_shift(config.meter, config.selection, tau_mid);
  const double target =
      record.centroid() - config.meter.omega0 - offset;

  const auto g = [&](double tau) {
    return analytics::mean_spectral_shift(config.meter, config.selection, tau) - target;
  };
  double a = lo;
  double b = hi;
  double ga = g(a);
  double gb = g(b);
  if (ga == 0.0) return {a, 0.0, EstimateMethod::kCentroidInversion};
  if (gb == 0.0) return {b, 0.0, EstimateMethod::kCentroidInversion};
  if ((ga > 0.0) == (gb > 0.0))
    throw EstimationError("estimate_tau: measured shift has no bracket in the window");
  for (int i = 0; i < 200 && (b - a) > 1e-16 * std::max(std::abs(a), std::abs(b)); ++i) {
    const double m = 0.5 * (a + b);
    const double gm = g(m);
    if (gm == 0.0) {
      a = b = m;
      break;
    }
    if ((gm > 0.0) == (ga > 0.0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  const double tau_hat = 0.5 * (a + b);

  // centroid standard error pushed through the local slope
  double mass = 0.0;
  double var = 0.0;
  const double mean = record.centroid();
  for (std::size_t i = 0; i < record.counts.size(); ++i) {
    const auto c = static_cast<double>(record.counts[i]);
    const double mid = 0.5 * (record.bin_edges[i] + record.bin_edges[i + 1]);
    mass += c;
    var += c * (mid - mean) * (mid - mean);
  }
  var /= mass;
  const double rate = analytics::shift_rate(config.meter, config.selection, tau_hat);
  const double std_error =
      rate != 0.0 ? std::sqrt(var / mass) / std::abs(rate)
                  : std::numeric_limits<double>::quiet_NaN();
  return {tau_hat, std_error, EstimateMethod::kCentroidInversion};
}

}  // namespace

EstimateReport estimate_tau(const CountRecord& record,
                            const numerics::ExperimentConfig& config,
                            const OsaSpec& osa,
                            std::pair<double, double> search_window,
                            EstimateMethod method) {
  if (record.counts.size() != static_cast<std::size_t>(osa.n_bins) ||
      record.bin_edges.size() != record.counts.size() + 1)
    throw ConfigError("estimate_tau: record does not match the OSA binning");
  long long total = 0;
  for (const long long c : record.counts) total += c;
  if (total <= 0)
    throw EstimationError("estimate_tau: no photons, likelihood is flat");

  if (method == EstimateMethod::kGridLikelihood)
    return estimate_by_likelihood(record, config, osa, search_window);
  return estimate_by_centroid(record, config, osa, search_window);
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  const auto mix = [](std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  };
  return mix(mix(master ^ mix(stream)) ^ index);
}

double deterministic_detection_threshold(SchemeKind scheme,
                                         const numerics::ExperimentConfig& config,
                                         const OsaSpec& osa) {
  const double tau_ref = scheme == SchemeKind::kCdiwm
                             ? analytics::cdi_working_point(config.meter, config.selection)
                             : 0.0;
  const double reference = binned_at(config, osa, tau_ref).centroid();
  const double resolution_element = osa.resolution_angular();
  const auto displacement = [&](double dtau) {
    return std::abs(binned_at(config, osa, tau_ref + dtau).centroid() - reference);
  };

  double hi = resolution_element /
              (2.0 * config.meter.omega0 * config.meter.omega0);  // CDI-regime scale
  while (displacement(hi) < resolution_element) {
    hi *= 2.0;
    if (hi > 1e-3)
      throw EstimationError(
          "deterministic_detection_threshold: displacement never reaches one "
          "resolution element");
  }
  double lo = 0.0;
  while ((hi - lo) > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    (displacement(mid) >= resolution_element ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

DetectionCurve resolution_experiment(SchemeKind scheme,
                                     const numerics::ExperimentConfig& config,
                                     const OsaSpec& osa,
                                     const ResolutionExperimentParams& params) {
  if (params.trials < 1 || params.null_trials < 1)
    throw ConfigError("resolution_experiment: need at least one trial");
  if (params.photons <= 0)
    throw EstimationError("resolution_experiment: no photons, nothing to estimate");

  const double tau_ref = scheme == SchemeKind::kCdiwm
                             ? analytics::cdi_working_point(config.meter, config.selection)
                             : 0.0;
  const BinnedSpectrum reference_binned = binned_at(config, osa, tau_ref);
  const double reference = reference_binned.centroid();

  const auto photons_at = [&](double tau) {
    if (!params.source_referenced) return params.photons;
    const double p = postselection_probability(config.meter, config.selection, tau);
    return static_cast<long long>(std::llround(static_cast<double>(params.photons) * p));
  };

  const auto shift_statistic = [&](const BinnedSpectrum& binned, long long photons,
                                   std::uint64_t seed) {
    const CountRecord counts = sample_counts(binned, photons, seed);
    return std::abs(counts.centroid() - reference);
  };

  // stream 0: null threshold; stream 1: fresh dtau = 0 batch; stream j+2: ladder
  std::vector<double> null_stats(static_cast<std::size_t>(params.null_trials));
  const long long ref_photons = photons_at(tau_ref);
  if (ref_photons <= 0)
    throw EstimationError("resolution_experiment: postselection leaves no photons");
  for (int i = 0; i < params.null_trials; ++i)
    null_stats[static_cast<std::size_t>(i)] = shift_statistic(
        reference_binned, ref_photons,
        trial_seed(params.seed, 0, static_cast<std::uint64_t>(i)));
  const double threshold = quantile_nearest_rank(null_stats, 0.95);

  DetectionCurve curve{scheme,
                       tau_ref,
                       threshold,
                       0.95,
                       {},
                       std::numeric_limits<double>::quiet_NaN(),
                       deterministic_detection_threshold(scheme, config, osa)};

  const auto run_point = [&](double dtau, std::uint64_t stream) {
    const BinnedSpectrum binned = binned_at(config, osa, tau_ref + dtau);
    const long long photons = photons_at(tau_ref + dtau);
    int detected = 0;
    double sum_abs = 0.0;
    for (int i = 0; i < params.trials; ++i) {
      const double stat =
          shift_statistic(binned, photons,
                          trial_seed(params.seed, stream, static_cast<std::uint64_t>(i)));
      sum_abs += stat;
      if (stat > threshold) ++detected;
    }
    return DetectionPoint{dtau, static_cast<double>(detected) / params.trials,
                          sum_abs / params.trials};
  };

  curve.points.push_back(run_point(0.0, 1));
  for (std::size_t j = 0; j < params.dtau_ladder.size(); ++j) {
    const double dtau = params.dtau_ladder[j];
    if (!(dtau > 0.0))
      throw ConfigError("resolution_experiment: ladder perturbations must be positive");
    curve.points.push_back(run_point(dtau, j + 2));
    if (std::isnan(curve.min_detectable_dtau) &&
        curve.points.back().detection_fraction >= 0.5)
      curve.min_detectable_dtau = dtau;
  }
  return curve;
}

}  // namespace cdiwm::instrument
