#pragma once

#include "cdiwm/quantum_core.hpp"

// Closed-form quantities of the two measurement schemes: mean spectral shift,
// shift rates, working point, small-angle approximations, resolution limits
// and postselection-probability approximations. Pure functions throughout.

namespace cdiwm::analytics {

enum class SchemeKind { kSwm, kCdiwm };

const char* scheme_name(SchemeKind scheme);

/// Spectrometer resolution expressed as angular frequency [rad/ps].
struct OsaResolution {
  double delta_omega;

  void validate() const;  // delta_omega > 0
};

/// One row of a scheme comparison: mean shift, local slope and survival
/// probability at a given delay.
struct ShiftReport {
  double mean_shift;   // [rad/ps]
  double shift_rate;   // [rad/ps per ps]
  double probability;  // dimensionless, in [0, 1]
};

/// Mean spectral shift
///   d_omega = tau delta^2 / (2P) exp(-delta^2 tau^2) sin[2(omega0 tau - eps)].
/// Throws NumericDomainError when the postselection probability vanishes.
double mean_spectral_shift(const MeterSpec& meter, const SelectionSpec& sel, double tau);

/// Slope of the mean spectral shift, by adaptive central difference: the step
/// starts at tau_s * 1e-4 and is halved until two successive estimates agree
/// to 1e-6 relative.
double shift_rate(const MeterSpec& meter, const SelectionSpec& sel, double tau);

/// mean shift + rate + probability in one call.
ShiftReport shift_report(const MeterSpec& meter, const SelectionSpec& sel, double tau);

/// CDI working point tau_s = eps / omega0 (zero mean shift, extinction
/// centered on omega0).
double cdi_working_point(const MeterSpec& meter, const SelectionSpec& sel);

/// Working point refined by numerically minimizing the postselection
/// probability over [0.5 tau_s, 1.5 tau_s] (golden-section search). Sits
/// slightly below eps/omega0, by a relative O(delta^2 / 2 omega0^2).
double refined_working_point(const MeterSpec& meter, const SelectionSpec& sel);

/// Weak-interaction spectrum limit eps^2 |f(omega)|^2 (valid for
/// |omega tau / eps| << 1; tau = 0 is the canonical regime).
double swm_spectrum_limit(const MeterSpec& meter, const SelectionSpec& sel, double omega);

/// Linearized weak-measurement shift cot(eps) delta^2 dtau.
/// Note the exact small-tau expansion of the mean shift carries the opposite
/// sign; only magnitudes are comparable between the two.
/// Throws NumericDomainError at eps = 0.
double swm_shift_approx(const MeterSpec& meter, const SelectionSpec& sel, double dtau);

/// Smallest detectable delay perturbation:
///   SWM    |eps| dOmega / delta^2
///   CDIWM  |eps| dOmega / (2 omega0^2)
double resolution_limit(SchemeKind scheme, const MeterSpec& meter,
                        const SelectionSpec& sel, const OsaResolution& osa);

/// Small-angle postselection probability: eps^2 for SWM at tau -> 0,
/// delta^2 eps^2 / (2 omega0^2) for CDIWM at its working point.
double postselection_probability_approx(SchemeKind scheme, const MeterSpec& meter,
                                        const SelectionSpec& sel);

}  // namespace cdiwm::analytics
