#pragma once

#include <complex>

#include "cdiwm/errors.hpp"

// Polarization system + Gaussian spectral meter, pre-coupling evolution and
// postselection. Everything here is a pure function of value-type inputs and
// safe to evaluate concurrently over grid points.

namespace cdiwm {

using Complex = std::complex<double>;

/// Gaussian spectral wave packet exp[-(omega-omega0)^2 / (2 delta^2)],
/// normalized so that the squared amplitude integrates to one.
/// delta is the 1/e amplitude half-width, not a FWHM.
struct MeterSpec {
  double omega0 = 2350.0;  // center angular frequency [rad/ps]
  double delta = 200.0;    // spectral width [rad/ps]

  void validate() const;  // omega0 > 0, delta > 0
};

/// Postselection angle of the fixed nearly-orthogonal polarization pair.
/// epsilon = 0 makes the pre/post pair exactly orthogonal; it is allowed for
/// exact formulas but rejected by the weak-value and small-angle paths.
struct SelectionSpec {
  double epsilon = 0.02;  // [rad]

  void validate() const;  // |epsilon| < pi/2
};

/// Two-component polarization amplitude in the H/V basis.
struct PolarizationState {
  Complex h;
  Complex v;

  double norm_sq() const { return std::norm(h) + std::norm(v); }
};

/// Relative H/V group delay in ps. May be zero or negative; a sign flip
/// exchanges which polarization is advanced.
struct CouplingDelay {
  double tau = 0.0;  // [ps]

  void validate() const;  // finite
};

/// (|H> + i|V>)/sqrt(2)
PolarizationState preselected_state();

/// (i e^{i eps}|H> + e^{-i eps}|V>)/sqrt(2)
PolarizationState postselected_state(const SelectionSpec& sel);

/// <bra|ket> with the physics convention (bra conjugated).
Complex state_overlap(const PolarizationState& bra, const PolarizationState& ket);

/// Spectral amplitude f(omega); real positive, maximal at omega0, unit L2 norm.
double gaussian_amplitude(const MeterSpec& meter, double omega);

/// Meter amplitude after pre-coupling by tau and postselection:
/// (i/2) f(omega) [e^{i(omega tau - eps)} - e^{-i(omega tau - eps)}].
/// Only |.|^2 and relative phases are observable; the global phase is a
/// convention.
Complex postselected_amplitude(const MeterSpec& meter, const SelectionSpec& sel,
                               double tau, double omega);

/// Postselected spectral density sin^2(omega tau - eps) |f(omega)|^2.
/// Not normalized: its integral over omega equals the postselection
/// probability.
double spectral_density(const MeterSpec& meter, const SelectionSpec& sel,
                        double tau, double omega);

/// Exact postselection probability
///   P = (1 - exp(-delta^2 tau^2) cos[2(omega0 tau - eps)]) / 2,
/// evaluated in a cancellation-free form so that values down to ~1e-300
/// keep full relative accuracy.
double postselection_probability(const MeterSpec& meter, const SelectionSpec& sel,
                                 double tau);

/// Weak value of the polarization observable A = diag(+1, -1), computed from
/// the state vectors as <phi|A|psi> / <phi|psi> (never from the closed form).
/// Purely imaginary, equal to i cot(eps).
/// Throws NumericDomainError at eps = 0 (singular postselection).
Complex weak_value(const SelectionSpec& sel);

}  // namespace cdiwm
