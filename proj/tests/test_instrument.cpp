#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cdiwm/instrument.hpp"
#include "oracles.hpp"

using namespace cdiwm;
using namespace cdiwm::instrument;
using analytics::SchemeKind;

namespace {

constexpr double kTauS = 0.02 / 2350.0;

numerics::ExperimentConfig default_config(double tau, int n_omega = 1 << 14) {
  numerics::ExperimentConfig config;
  config.meter = {2350.0, 200.0};
  config.selection = {0.02};
  config.tau = tau;
  config.n_omega = n_omega;
  return config;
}

OsaSpec default_osa() { return {800.0, 0.01, 1000.0, 128}; }

}  // namespace

TEST_CASE("wavelength conversion: frozen values and inverse proportionality") {
  CHECK(wavelength_to_angular(800.0) == doctest::Approx(2354.5644591360665).epsilon(1e-12));
  CHECK(wavelength_to_angular(1600.0) ==
        doctest::Approx(0.5 * wavelength_to_angular(800.0)).epsilon(1e-14));
  CHECK_THROWS_AS(wavelength_to_angular(0.0), ConfigError);
  CHECK_THROWS_AS(wavelength_to_angular(-5.0), ConfigError);

  // 0.01 nm resolution at 800 nm -> 0.02944 rad/ps; the linearized formula
  // agrees with the exact two-point difference to first order
  const double resolution = default_osa().resolution_angular();
  CHECK(resolution == doctest::Approx(0.02943205573920083).epsilon(1e-12));
  const double exact = wavelength_to_angular(800.0 - 0.005) - wavelength_to_angular(800.0 + 0.005);
  CHECK(resolution == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("OSA spec validation") {
  const MeterSpec meter{2350.0, 200.0};
  CHECK_NOTHROW(default_osa().validate(meter));
  CHECK_THROWS_AS((OsaSpec{800.0, 0.0, 1000.0, 128}.validate(meter)), ConfigError);
  CHECK_THROWS_AS((OsaSpec{800.0, 0.01, 1000.0, 4}.validate(meter)), ConfigError);
  CHECK_THROWS_AS((OsaSpec{800.0, 0.01, 1700.0, 128}.validate(meter)), ConfigError);
  // 100 nm span is ~370 rad/ps, far below 6 delta
  CHECK_THROWS_AS((OsaSpec{800.0, 0.01, 100.0, 128}.validate(meter)), ConfigError);
}

TEST_CASE("bin edges are strictly increasing in angular frequency") {
  const auto edges = default_osa().bin_edges_angular();
  CHECK(edges.size() == 129);
  for (std::size_t i = 1; i < edges.size(); ++i) CHECK(edges[i] > edges[i - 1]);
}

TEST_CASE("binning conserves the in-span intensity to 1e-9") {
  const auto samples = numerics::sample_spectrum(default_config(kTauS));
  // a span reaching from ~476 nm to ~2512 nm covers the entire sampled grid
  const OsaSpec wide{1494.0, 0.01, 2036.0, 64};
  const auto binned = bin_spectrum(samples, wide);
  const double integral = numerics::integrate(samples);
  CHECK(binned.total() == doctest::Approx(integral).epsilon(1e-9));

  // and with a realistic kernel the smoothing itself must not lose mass
  const OsaSpec wide_coarse{1494.0, 5.0, 2036.0, 64};
  CHECK(bin_spectrum(samples, wide_coarse).total() ==
        doctest::Approx(integral).epsilon(1e-9));
}

TEST_CASE("flat input produces a flat binned density") {
  numerics::SpectralDensitySamples flat{{1400.0, 6300.0, 1 << 14},
                                        std::vector<double>(1 << 14, 2.0),
                                        2350.0,
                                        {}};
  const auto binned = bin_spectrum(flat, default_osa());
  for (std::size_t b = 1; b + 1 < binned.intensities.size(); ++b) {
    const double width = binned.edges[b + 1] - binned.edges[b];
    CHECK(binned.intensities[b] / width == doctest::Approx(2.0).epsilon(1e-3));
  }
}

TEST_CASE("finite resolution partially fills the extinction notch") {
  const auto samples = numerics::sample_spectrum(default_config(kTauS));
  // resolution 5 nm -> kernel sigma ~ 6 rad/ps, ~32 grid steps
  const OsaSpec coarse{800.0, 5.0, 1000.0, 128};
  const auto binned = bin_spectrum(samples, coarse);
  // every bin inside the sampled band sees light, including the notch bin
  double min_in_band = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < binned.intensities.size(); ++b)
    if (binned.edges[b] >= samples.grid.omega_min &&
        binned.edges[b + 1] <= samples.grid.omega_max)
      min_in_band = std::min(min_in_band, binned.intensities[b]);
  CHECK(min_in_band > 0.0);

  // convolution oracle at 10x oversampling: the binned result is grid-converged
  const auto fine = numerics::sample_spectrum(default_config(kTauS, 10 * (1 << 14)));
  const auto binned_fine = bin_spectrum(fine, coarse);
  for (std::size_t b = 0; b < binned.intensities.size(); ++b) {
    if (binned_fine.intensities[b] < 1e-12 * binned_fine.total()) continue;
    CHECK(binned.intensities[b] ==
          doctest::Approx(binned_fine.intensities[b]).epsilon(1e-4));
  }
}

TEST_CASE("a kernel narrower than the grid step reduces to per-bin integration") {
  const auto samples = numerics::sample_spectrum(default_config(8e-6));
  const auto binned = bin_spectrum(samples, default_osa());  // sigma ~ 0.0125 << step
  // manual piecewise-constant integral of the raw samples over each bin
  const auto edges = default_osa().bin_edges_angular();
  std::vector<double> expected(128, 0.0);
  const double step = samples.grid.step();
  for (int i = 0; i < samples.grid.n; ++i) {
    const double w = samples.grid.point(i);
    const double lo = (i == 0) ? w : w - 0.5 * step;
    const double hi = (i == samples.grid.n - 1) ? w : w + 0.5 * step;
    for (std::size_t b = 0; b < 128; ++b) {
      const double overlap = std::min(hi, edges[b + 1]) - std::max(lo, edges[b]);
      if (overlap > 0.0)
        expected[b] += overlap * samples.values[static_cast<std::size_t>(i)];
    }
  }
  for (std::size_t b = 0; b < 128; ++b)
    CHECK(binned.intensities[b] == doctest::Approx(expected[b]).epsilon(1e-9));
}

TEST_CASE("binning rejects spans that reach past live samples") {
  auto config = default_config(kTauS);
  // +-3 delta leaves e^{-9}-level density at the grid edges, so the wider
  // OSA span would silently drop in-span mass
  config.omega_span_sigmas = 3.0;
  const auto samples = numerics::sample_spectrum(config);
  CHECK_THROWS_AS(bin_spectrum(samples, default_osa()), NumericDomainError);

  // at +-6 delta the edge density is ~1e-16 of the peak and the same span is fine
  config.omega_span_sigmas = 6.0;
  CHECK_NOTHROW(bin_spectrum(numerics::sample_spectrum(config), default_osa()));
}

TEST_CASE("count sampling: totals, determinism, zero photons, zero mass") {
  const auto binned = bin_spectrum(numerics::sample_spectrum(default_config(kTauS)),
                                   default_osa());

  const auto zero = sample_counts(binned, 0, 7);
  CHECK(zero.total_photons == 0);
  for (const long long c : zero.counts) CHECK(c == 0);

  const auto a = sample_counts(binned, 100000, 42);
  const auto b = sample_counts(binned, 100000, 42);
  CHECK(a.counts == b.counts);
  const auto c = sample_counts(binned, 100000, 43);
  CHECK(a.counts != c.counts);

  long long total = 0;
  for (const long long v : a.counts) total += v;
  CHECK(total == 100000);

  CHECK_THROWS_AS(sample_counts(binned, -1, 0), ConfigError);
  BinnedSpectrum empty{binned.edges, std::vector<double>(128, 0.0)};
  CHECK_THROWS_AS(sample_counts(empty, 100, 0), NumericDomainError);
}

TEST_CASE("count frequencies converge to the bin probabilities") {
  const auto binned = bin_spectrum(numerics::sample_spectrum(default_config(kTauS)),
                                   default_osa());
  const double total_intensity = binned.total();
  const long long n = 10000000;
  const auto record = sample_counts(binned, n, 2024);
  for (std::size_t i = 0; i < record.counts.size(); ++i) {
    const double p = binned.intensities[i] / total_intensity;
    const double sigma = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
    CHECK(std::abs(static_cast<double>(record.counts[i]) - n * p) <= 5.0 * sigma + 1.0);
  }
}

TEST_CASE("grid likelihood recovers the truth from noiseless counts") {
  const double tau_true = kTauS + 1e-9;
  const auto config = default_config(tau_true, 1 << 12);
  const auto osa = default_osa();
  const auto binned = bin_spectrum(numerics::sample_spectrum(config), osa);

  CountRecord record{binned.edges, {}, 0, 0};
  const double scale = 1e12 / binned.total();
  for (const double v : binned.intensities) {
    record.counts.push_back(std::llround(v * scale));
    record.total_photons += record.counts.back();
  }

  const auto report = estimate_tau(record, config, osa, {kTauS - 5e-9, kTauS + 5e-9});
  CHECK(report.method == EstimateMethod::kGridLikelihood);
  CHECK(std::abs(report.tau_hat - tau_true) < 1e-11);
}

TEST_CASE("centroid inversion returns the working point for a symmetric spectrum") {
  const auto config = default_config(kTauS, 1 << 12);
  const auto osa = default_osa();
  const auto binned = bin_spectrum(numerics::sample_spectrum(config), osa);

  CountRecord record{binned.edges, {}, 0, 0};
  const double scale = 1e12 / binned.total();
  for (const double v : binned.intensities) {
    record.counts.push_back(std::llround(v * scale));
    record.total_photons += record.counts.back();
  }

  const auto report = estimate_tau(record, config, osa, {0.9 * kTauS, 1.1 * kTauS},
                                   EstimateMethod::kCentroidInversion);
  CHECK(report.method == EstimateMethod::kCentroidInversion);
  CHECK(std::abs(report.tau_hat - kTauS) < 1e-11);
  CHECK(report.std_error >= 0.0);
}

TEST_CASE("estimators are deterministic and reject empty records") {
  const auto config = default_config(kTauS, 1 << 12);
  const auto osa = default_osa();
  const auto binned = bin_spectrum(numerics::sample_spectrum(config), osa);
  const auto record = sample_counts(binned, 100000, 99);

  const auto first = estimate_tau(record, config, osa, {kTauS - 5e-9, kTauS + 5e-9});
  const auto second = estimate_tau(record, config, osa, {kTauS - 5e-9, kTauS + 5e-9});
  CHECK(first.tau_hat == second.tau_hat);
  CHECK(first.std_error == second.std_error);

  CountRecord empty{binned.edges, std::vector<long long>(128, 0), 0, 0};
  CHECK_THROWS_AS(estimate_tau(empty, config, osa, {kTauS - 5e-9, kTauS + 5e-9}),
                  EstimationError);
}

TEST_CASE("grid likelihood is unbiased over Monte-Carlo trials") {
  const double tau_true = kTauS + 1e-9;
  const auto config = default_config(tau_true, 1 << 12);
  const auto osa = default_osa();
  const auto binned = bin_spectrum(numerics::sample_spectrum(config), osa);

  const int trials = 200;
  std::vector<double> estimates;
  double stderr_sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto record = sample_counts(binned, 1000000, trial_seed(7, 11, t));
    const auto report = estimate_tau(record, config, osa, {kTauS - 5e-9, kTauS + 5e-9});
    estimates.push_back(report.tau_hat);
    stderr_sum += report.std_error;
  }
  double mean = 0.0;
  for (const double e : estimates) mean += e;
  mean /= trials;
  double var = 0.0;
  for (const double e : estimates) var += (e - mean) * (e - mean);
  var /= (trials - 1);
  const double stderr_of_mean = std::sqrt(var / trials);

  CHECK(std::abs(mean - tau_true) < 2.0 * stderr_of_mean);
  // reported per-trial standard error agrees with the observed scatter
  CHECK(stderr_sum / trials == doctest::Approx(std::sqrt(var)).epsilon(0.5));
}

TEST_CASE("trial seeds separate streams and indices") {
  CHECK(trial_seed(1, 0, 0) != trial_seed(1, 0, 1));
  CHECK(trial_seed(1, 0, 0) != trial_seed(1, 1, 0));
  CHECK(trial_seed(1, 0, 0) != trial_seed(2, 0, 0));
  CHECK(trial_seed(5, 3, 17) == trial_seed(5, 3, 17));
}

TEST_CASE("deterministic thresholds sit on the closed-form limits") {
  const auto config = default_config(0.0);
  const auto osa = default_osa();
  const analytics::OsaResolution resolution{osa.resolution_angular()};

  const double cdiwm = deterministic_detection_threshold(SchemeKind::kCdiwm, config, osa);
  const double cdiwm_limit =
      analytics::resolution_limit(SchemeKind::kCdiwm, config.meter, config.selection, resolution);
  CHECK(cdiwm > cdiwm_limit / 3.0);
  CHECK(cdiwm < cdiwm_limit * 3.0);

  const double swm = deterministic_detection_threshold(SchemeKind::kSwm, config, osa);
  const double swm_limit =
      analytics::resolution_limit(SchemeKind::kSwm, config.meter, config.selection, resolution);
  CHECK(swm > swm_limit / 3.0);
  CHECK(swm < swm_limit * 3.0);

  // the scheme ratio survives binning to within discretization effects
  CHECK(swm / cdiwm == doctest::Approx(276.125).epsilon(0.2));
}

TEST_CASE("resolution experiment: null calibration, monotonicity, determinism") {
  const auto config = default_config(0.0);
  const auto osa = default_osa();

  ResolutionExperimentParams params;
  params.dtau_ladder = {1e-11, 1e-10, 3e-10, 1e-9, 3e-9, 1e-8, 1e-7};
  params.photons = 1000000;
  params.trials = 200;
  params.null_trials = 500;
  params.seed = 314159;

  const auto curve = resolution_experiment(SchemeKind::kCdiwm, config, osa, params);
  REQUIRE(curve.points.size() == params.dtau_ladder.size() + 1);
  CHECK(curve.points.front().dtau == 0.0);
  CHECK(curve.points.front().detection_fraction <= 0.075);
  CHECK(curve.null_threshold > 0.0);

  // nondecreasing detection up to Monte-Carlo noise
  for (std::size_t i = 1; i + 1 < curve.points.size(); ++i)
    CHECK(curve.points[i + 1].detection_fraction >=
          curve.points[i].detection_fraction - 0.08);
  CHECK(curve.points.back().detection_fraction == 1.0);
  CHECK(curve.min_detectable_dtau > 0.0);

  const auto rerun = resolution_experiment(SchemeKind::kCdiwm, config, osa, params);
  CHECK(rerun.null_threshold == curve.null_threshold);
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    CHECK(rerun.points[i].detection_fraction == curve.points[i].detection_fraction);
    CHECK(rerun.points[i].mean_abs_shift == curve.points[i].mean_abs_shift);
  }

  ResolutionExperimentParams no_photons = params;
  no_photons.photons = 0;
  CHECK_THROWS_AS(resolution_experiment(SchemeKind::kCdiwm, config, osa, no_photons),
                  EstimationError);
}

TEST_CASE("source-referenced mode scales the budget by the survival probability") {
  const auto config = default_config(0.0);
  const auto osa = default_osa();

  ResolutionExperimentParams params;
  params.dtau_ladder = {1e-9};
  params.trials = 10;
  params.null_trials = 20;
  params.seed = 5;
  params.source_referenced = true;

  // at the CDIWM working point only ~1.45e-6 of the source survives
  params.photons = 100000;  // rounds to zero detected photons
  CHECK_THROWS_AS(resolution_experiment(SchemeKind::kCdiwm, config, osa, params),
                  EstimationError);

  params.photons = 10000000000LL;  // ~14.5k detected photons
  const auto curve = resolution_experiment(SchemeKind::kCdiwm, config, osa, params);
  CHECK(curve.points.front().mean_abs_shift > 0.0);
  // SWM at tau = 0 keeps eps^2 of the source, so the same budget works there too
  CHECK_NOTHROW(resolution_experiment(SchemeKind::kSwm, config, osa, params));
}
