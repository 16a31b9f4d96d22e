#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cdiwm/analytics.hpp"
#include "cdiwm/numerics.hpp"
#include "oracles.hpp"

using namespace cdiwm;
using analytics::SchemeKind;

namespace {
const MeterSpec kMeter{2350.0, 200.0};
const SelectionSpec kSel{0.02};
constexpr double kTauS = 0.02 / 2350.0;
// 0.01 nm resolution at 800 nm via dOmega = 2 pi c dlambda / lambda^2
const analytics::OsaResolution kOsa{0.02943205573920083};
}  // namespace

TEST_CASE("mean shift vanishes at the working point and at tau = 0") {
  CHECK(analytics::mean_spectral_shift(kMeter, kSel, kTauS) == 0.0);
  CHECK(analytics::mean_spectral_shift(kMeter, kSel, 0.0) == 0.0);
}

TEST_CASE("mean shift at tau = 8e-6 ps matches the quadrature centroid oracle") {
  const double closed = analytics::mean_spectral_shift(kMeter, kSel, 8e-6);
  CHECK(closed == doctest::Approx(-141.17628589621768).epsilon(1e-10));

  // independent oracle: Simpson centroid of the spectral density
  const auto density = [&](double w) { return spectral_density(kMeter, kSel, 8e-6, w); };
  const auto weighted = [&](double w) { return density(w) * (w - 2350.0); };
  const double lo = 2350.0 - 1600.0;
  const double hi = 2350.0 + 1600.0;
  const double centroid =
      oracle::simpson(weighted, lo, hi, 40000) / oracle::simpson(density, lo, hi, 40000);
  CHECK(closed == doctest::Approx(centroid).epsilon(1e-7));
}

TEST_CASE("mean shift is undefined where the probability vanishes") {
  CHECK_THROWS_AS(analytics::mean_spectral_shift(kMeter, {0.0}, 0.0), NumericDomainError);
}

TEST_CASE("closed-form shift equals the sampled centroid across the CDI window") {
  for (const double eps : {0.01, 0.02, 0.05}) {
    const SelectionSpec sel{eps};
    const double tau_s = eps / 2350.0;
    for (double tau = 0.0; tau <= 3.0 * tau_s; tau += tau_s / 4.0) {
      const double p = postselection_probability(kMeter, sel, tau);
      if (p <= 1e-12) continue;
      numerics::ExperimentConfig config;
      config.meter = kMeter;
      config.selection = sel;
      config.tau = tau;
      const double sampled = numerics::centroid_shift(numerics::sample_spectrum(config));
      const double closed = analytics::mean_spectral_shift(kMeter, sel, tau);
      if (std::abs(closed) > 1e-9)
        CHECK(sampled == doctest::Approx(closed).epsilon(1e-5));
      else
        CHECK(std::abs(sampled - closed) < 1e-6 * 200.0);
    }
  }
}

TEST_CASE("numerical centroid at the working point is zero to 1e-6 delta") {
  numerics::ExperimentConfig config;
  config.meter = kMeter;
  config.selection = kSel;
  config.tau = kTauS;
  CHECK(std::abs(numerics::centroid_shift(numerics::sample_spectrum(config))) <
        1e-6 * 200.0);
}

TEST_CASE("shift rate at the working point approaches 2 omega0^2 / eps") {
  const double rate = analytics::shift_rate(kMeter, kSel, kTauS);
  CHECK(rate == doctest::Approx(2.0 * 2350.0 * 2350.0 / 0.02).epsilon(1e-2));
  CHECK(rate == doctest::Approx(5.52249e8).epsilon(1e-4));
  // = 552.25 rad/ps per attosecond
  CHECK(rate * 1e-6 == doctest::Approx(552.25).epsilon(1e-3));

  // fixed-step oracle, no adaptivity
  const auto shift = [&](double t) { return analytics::mean_spectral_shift(kMeter, kSel, t); };
  CHECK(rate == doctest::Approx(oracle::central_diff(shift, kTauS, kTauS * 1e-5)).epsilon(1e-6));
}

TEST_CASE("weak-regime shift rate magnitude is delta^2 cot(eps)") {
  const double rate = analytics::shift_rate(kMeter, kSel, 1e-9);
  CHECK(std::abs(rate) == doctest::Approx(200.0 * 200.0 / std::tan(0.02)).epsilon(1e-3));
  CHECK(rate < 0.0);  // exact small-tau expansion carries the minus sign
}

TEST_CASE("rate amplification between schemes is 2 omega0^2 / delta^2") {
  const double cdiwm_rate = analytics::shift_rate(kMeter, kSel, kTauS);
  const double swm_rate = analytics::shift_rate(kMeter, kSel, 1e-9);
  CHECK(std::abs(cdiwm_rate / swm_rate) ==
        doctest::Approx(2.0 * 2350.0 * 2350.0 / (200.0 * 200.0)).epsilon(1e-2));
}

TEST_CASE("working point: frozen value and trivial eps = 0 case") {
  CHECK(analytics::cdi_working_point(kMeter, kSel) ==
        doctest::Approx(8.51063829787234e-6).epsilon(1e-14));
  CHECK(analytics::cdi_working_point(kMeter, {0.0}) == 0.0);
}

TEST_CASE("refined working point sits within 0.5% of eps/omega0") {
  for (const double delta : {47.0, 117.5, 200.0}) {  // delta/omega0 up to 0.085
    const MeterSpec meter{2350.0, delta};
    const double tau_s = analytics::cdi_working_point(meter, kSel);
    const double refined = analytics::refined_working_point(meter, kSel);
    CHECK(std::abs(refined - tau_s) / tau_s < 5e-3);

    // dense-scan oracle on the probability itself
    const auto p = [&](double t) { return postselection_probability(meter, kSel, t); };
    const double scanned = oracle::scan_min(p, 0.5 * tau_s, 1.5 * tau_s, 1 << 16);
    CHECK(refined == doctest::Approx(scanned).epsilon(1e-6));
    CHECK(p(refined) <= p(tau_s));
  }
}

TEST_CASE("weak-regime spectrum limit: ratio to the exact density is sin^2(eps)/eps^2") {
  const double exact = spectral_density(kMeter, kSel, 0.0, 2471.0);
  const double limit = analytics::swm_spectrum_limit(kMeter, kSel, 2471.0);
  CHECK(exact / limit == doctest::Approx(0.99986668).epsilon(1e-7));
  CHECK(analytics::swm_spectrum_limit(kMeter, {0.0}, 2350.0) == 0.0);

  const auto limit_density = [&](double w) {
    return analytics::swm_spectrum_limit(kMeter, kSel, w);
  };
  const double integral = oracle::simpson(limit_density, 750.0, 3950.0, 20000);
  CHECK(integral == doctest::Approx(0.02 * 0.02).epsilon(1e-9));
}

TEST_CASE("linearized shift: frozen value and agreement with the exact form") {
  const double approx = analytics::swm_shift_approx(kMeter, kSel, 1e-8);
  CHECK(approx == doctest::Approx(0.019997333262219513).epsilon(1e-12));
  CHECK(analytics::swm_shift_approx(kMeter, kSel, 0.0) == 0.0);
  CHECK_THROWS_AS(analytics::swm_shift_approx(kMeter, {0.0}, 1e-8), NumericDomainError);

  const double exact = analytics::mean_spectral_shift(kMeter, kSel, 1e-8);
  CHECK(std::abs(approx) == doctest::Approx(std::abs(exact)).epsilon(2e-3));
  // the exact small-tau expansion is -delta^2 tau cot(eps): opposite sign
  CHECK(approx * exact < 0.0);
}

TEST_CASE("resolution limits: frozen values and exact scheme ratio") {
  const double swm = analytics::resolution_limit(SchemeKind::kSwm, kMeter, kSel, kOsa);
  const double cdiwm = analytics::resolution_limit(SchemeKind::kCdiwm, kMeter, kSel, kOsa);
  CHECK(swm == doctest::Approx(1.4716027869600414e-8).epsilon(1e-12));
  CHECK(cdiwm == doctest::Approx(5.32948044168417e-11).epsilon(1e-12));

  for (const double eps : {0.001, 0.02, 0.3}) {
    for (const double dw : {0.01, 0.02943205573920083, 1.0}) {
      const SelectionSpec sel{eps};
      const analytics::OsaResolution res{dw};
      const double ratio = analytics::resolution_limit(SchemeKind::kSwm, kMeter, sel, res) /
                           analytics::resolution_limit(SchemeKind::kCdiwm, kMeter, sel, res);
      CHECK(ratio == doctest::Approx(276.125).epsilon(1e-13));
    }
  }
}

TEST_CASE("probability approximations track the exact closed form") {
  CHECK(analytics::postselection_probability_approx(SchemeKind::kSwm, kMeter, kSel) == 4e-4);
  CHECK(analytics::postselection_probability_approx(SchemeKind::kCdiwm, kMeter, kSel) ==
        doctest::Approx(1.4486192847442282e-6).epsilon(1e-12));
  CHECK(analytics::postselection_probability_approx(SchemeKind::kSwm, kMeter, {0.0}) == 0.0);
  CHECK(analytics::postselection_probability_approx(SchemeKind::kCdiwm, kMeter, {0.0}) == 0.0);

  // SWM approx vs exact at tau = 0: within 0.02% at eps = 0.02
  const double swm_exact = postselection_probability(kMeter, kSel, 0.0);
  CHECK(std::abs(4e-4 - swm_exact) / swm_exact < 2e-4);
  // CDIWM approx vs exact at tau_s: within 0.01%
  const double cdiwm_exact = postselection_probability(kMeter, kSel, kTauS);
  const double cdiwm_approx =
      analytics::postselection_probability_approx(SchemeKind::kCdiwm, kMeter, kSel);
  CHECK(std::abs(cdiwm_approx - cdiwm_exact) / cdiwm_exact < 1e-4);
}

TEST_CASE("mean shift is invariant under the joint (tau, eps) sign flip") {
  // both the tau prefactor and the sine flip sign, so the shift survives
  for (const double eps : {0.01, 0.02, 0.05}) {
    for (const double tau : {1e-6, 8e-6, 8.5106e-6, 2e-5}) {
      const double forward = analytics::mean_spectral_shift(kMeter, {eps}, tau);
      const double mirrored = analytics::mean_spectral_shift(kMeter, {-eps}, -tau);
      CHECK(mirrored == doctest::Approx(forward).epsilon(1e-12));
    }
  }
}

TEST_CASE("near tau = 0 the shift flips sign with eps") {
  const double tau = 1e-9;
  const double plus = analytics::mean_spectral_shift(kMeter, {0.02}, tau);
  const double minus = analytics::mean_spectral_shift(kMeter, {-0.02}, tau);
  CHECK(minus == doctest::Approx(-plus).epsilon(1e-3));
}

TEST_CASE("shift report bundles the three quantities consistently") {
  const auto report = analytics::shift_report(kMeter, kSel, 8e-6);
  CHECK(report.mean_shift == analytics::mean_spectral_shift(kMeter, kSel, 8e-6));
  CHECK(report.probability == postselection_probability(kMeter, kSel, 8e-6));
  CHECK(report.shift_rate == analytics::shift_rate(kMeter, kSel, 8e-6));
  CHECK(report.probability >= 0.0);
  CHECK(report.probability <= 1.0);
}

TEST_CASE("OsaResolution rejects nonpositive values") {
  CHECK_THROWS_AS(analytics::OsaResolution{0.0}.validate(), ConfigError);
  CHECK_NOTHROW(kOsa.validate());
}
