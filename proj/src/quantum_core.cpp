#include "cdiwm/quantum_core.hpp"

#include <cmath>
#include <numbers>

namespace cdiwm {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};
}  // namespace

void MeterSpec::validate() const {
  if (!(omega0 > 0.0) || !std::isfinite(omega0))
    throw ConfigError("MeterSpec: omega0 must be positive and finite");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ConfigError("MeterSpec: delta must be positive and finite");
}

void SelectionSpec::validate() const {
  if (!std::isfinite(epsilon) || !(std::abs(epsilon) < kPi / 2.0))
    throw ConfigError("SelectionSpec: |epsilon| must be < pi/2");
}

void CouplingDelay::validate() const {
  if (!std::isfinite(tau)) throw ConfigError("CouplingDelay: tau must be finite");
}

PolarizationState preselected_state() {
  const double s = 1.0 / std::sqrt(2.0);
  return {Complex{s, 0.0}, Complex{0.0, s}};
}

PolarizationState postselected_state(const SelectionSpec& sel) {
  const double s = 1.0 / std::sqrt(2.0);
  const Complex e_plus = std::polar(1.0, sel.epsilon);
  const Complex e_minus = std::polar(1.0, -sel.epsilon);
  return {kI * e_plus * s, e_minus * s};
}

Complex state_overlap(const PolarizationState& bra, const PolarizationState& ket) {
  return std::conj(bra.h) * ket.h + std::conj(bra.v) * ket.v;
}

double gaussian_amplitude(const MeterSpec& meter, double omega) {
  const double u = (omega - meter.omega0) / meter.delta;
  return std::pow(kPi * meter.delta * meter.delta, -0.25) * std::exp(-0.5 * u * u);
}

Complex postselected_amplitude(const MeterSpec& meter, const SelectionSpec& sel,
                               double tau, double omega) {
  const double phase = omega * tau - sel.epsilon;
  // (i/2)(e^{i phase} - e^{-i phase}) = -sin(phase)
  return Complex{-gaussian_amplitude(meter, omega) * std::sin(phase), 0.0};
}

double spectral_density(const MeterSpec& meter, const SelectionSpec& sel,
                        double tau, double omega) {
  const double f = gaussian_amplitude(meter, omega);
  const double s = std::sin(omega * tau - sel.epsilon);
  return s * s * f * f;
}

double postselection_probability(const MeterSpec& meter, const SelectionSpec& sel,
                                 double tau) {
  // (1 - e^{-x} cos 2theta)/2 rewritten as a sum of nonnegative terms:
  //   (1 - e^{-x})/2 + e^{-x} sin^2(theta)
  // which avoids the 1 - (1 - tiny) cancellation near the working point.
  const double x = meter.delta * meter.delta * tau * tau;
  const double theta = meter.omega0 * tau - sel.epsilon;
  const double s = std::sin(theta);
  return 0.5 * (-std::expm1(-x)) + std::exp(-x) * s * s;
}

Complex weak_value(const SelectionSpec& sel) {
  const PolarizationState psi = preselected_state();
  const PolarizationState phi = postselected_state(sel);
  // A = diag(+1, -1) in the H/V basis
  const PolarizationState a_psi{psi.h, -psi.v};
  const Complex numerator = state_overlap(phi, a_psi);
  const Complex denominator = state_overlap(phi, psi);
  if (std::abs(denominator) == 0.0)
    throw NumericDomainError(
        "weak_value: singular postselection, <phi|psi> = 0 at epsilon = 0");
  return numerator / denominator;
}

}  // namespace cdiwm
