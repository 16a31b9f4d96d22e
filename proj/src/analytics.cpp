#include "cdiwm/analytics.hpp"

#include <cmath>
#include <limits>

namespace cdiwm::analytics {

const char* scheme_name(SchemeKind scheme) {
  return scheme == SchemeKind::kSwm ? "swm" : "cdiwm";
}

void OsaResolution::validate() const {
  if (!(delta_omega > 0.0) || !std::isfinite(delta_omega))
    throw ConfigError("OsaResolution: delta_omega must be positive and finite");
}

double mean_spectral_shift(const MeterSpec& meter, const SelectionSpec& sel, double tau) {
  const double p = postselection_probability(meter, sel, tau);
  if (!(p > 0.0))
    throw NumericDomainError(
        "mean_spectral_shift: undefined, postselection probability is zero");
  const double x = meter.delta * meter.delta * tau * tau;
  const double theta = meter.omega0 * tau - sel.epsilon;
  return tau * meter.delta * meter.delta / (2.0 * p) * std::exp(-x) * std::sin(2.0 * theta);
}

double shift_rate(const MeterSpec& meter, const SelectionSpec& sel, double tau) {
  const auto central = [&](double h) {
    return (mean_spectral_shift(meter, sel, tau + h) -
            mean_spectral_shift(meter, sel, tau - h)) /
           (2.0 * h);
  };

  const double tau_s = cdi_working_point(meter, sel);
  double h = std::abs(tau_s) * 1e-4;
  if (h == 0.0) h = 1e-10;  // eps = 0 leaves no working-point scale

  double previous = central(h);
  double best = previous;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 40; ++i) {
    h *= 0.5;
    const double current = central(h);
    const double gap = std::abs(current - previous);
    if (gap <= 1e-6 * std::abs(current)) return current;
    if (gap < best_gap) {
      best_gap = gap;
      best = current;
    }
    previous = current;
  }
  return best;
}

ShiftReport shift_report(const MeterSpec& meter, const SelectionSpec& sel, double tau) {
  return {mean_spectral_shift(meter, sel, tau), shift_rate(meter, sel, tau),
          postselection_probability(meter, sel, tau)};
}

double cdi_working_point(const MeterSpec& meter, const SelectionSpec& sel) {
  return sel.epsilon / meter.omega0;
}

double refined_working_point(const MeterSpec& meter, const SelectionSpec& sel) {
  const double tau_s = cdi_working_point(meter, sel);
  if (tau_s == 0.0) return 0.0;

  double a = 0.5 * tau_s;
  double b = 1.5 * tau_s;
  if (a > b) std::swap(a, b);  // negative epsilon

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = postselection_probability(meter, sel, x1);
  double f2 = postselection_probability(meter, sel, x2);
  while (std::abs(b - a) > 1e-12 * std::abs(tau_s)) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = postselection_probability(meter, sel, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = postselection_probability(meter, sel, x2);
    }
  }
  return 0.5 * (a + b);
}

double swm_spectrum_limit(const MeterSpec& meter, const SelectionSpec& sel, double omega) {
  const double f = gaussian_amplitude(meter, omega);
  return sel.epsilon * sel.epsilon * f * f;
}

double swm_shift_approx(const MeterSpec& meter, const SelectionSpec& sel, double dtau) {
  if (sel.epsilon == 0.0)
    throw NumericDomainError("swm_shift_approx: cot(eps) singular at eps = 0");
  return meter.delta * meter.delta * dtau / std::tan(sel.epsilon);
}

double resolution_limit(SchemeKind scheme, const MeterSpec& meter,
                        const SelectionSpec& sel, const OsaResolution& osa) {
  osa.validate();
  const double numerator = std::abs(sel.epsilon) * osa.delta_omega;
  if (scheme == SchemeKind::kSwm) return numerator / (meter.delta * meter.delta);
  return numerator / (2.0 * meter.omega0 * meter.omega0);
}

double postselection_probability_approx(SchemeKind scheme, const MeterSpec& meter,
                                        const SelectionSpec& sel) {
  const double e2 = sel.epsilon * sel.epsilon;
  if (scheme == SchemeKind::kSwm) return e2;
  return meter.delta * meter.delta * e2 / (2.0 * meter.omega0 * meter.omega0);
}

}  // namespace cdiwm::analytics
