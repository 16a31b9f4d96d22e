#pragma once

// Unit conventions used throughout the library:
//   angular frequency  rad/ps  (the "THz" axis labels of broadband optics)
//   time               ps      (attoseconds only at the I/O boundary)
//   wavelength         nm
// With these choices omega * tau is dimensionless with no conversion factors.

namespace cdiwm::units {

inline constexpr double kSpeedOfLightNmPerPs = 2.99792458e5;

// 1 as = 1e-6 ps
inline constexpr double kPsPerAs = 1e-6;

constexpr double as_to_ps(double t_as) { return t_as * kPsPerAs; }
constexpr double ps_to_as(double t_ps) { return t_ps / kPsPerAs; }

}  // namespace cdiwm::units
