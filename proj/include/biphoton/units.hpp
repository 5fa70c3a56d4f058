#pragma once

#include <numbers>

namespace biphoton {

inline constexpr double speed_of_light = 299792458.0; // m/s
inline constexpr double pi = std::numbers::pi;

namespace units {
// All internal quantities are SI (meters, seconds, rad/s).  Configs and CLI
// flags use the lab units below and convert at the boundary.
inline constexpr double nm = 1e-9;
inline constexpr double um = 1e-6;
inline constexpr double mm = 1e-3;
inline constexpr double fs = 1e-15;
inline constexpr double ps = 1e-12;
inline constexpr double fs_per_mm = 1e-15 / 1e-3;  // group-delay mismatch D
inline constexpr double fs2_per_mm = 1e-30 / 1e-3; // dispersion D'
} // namespace units

/// Angular frequency of a vacuum wavelength.
inline double angular_frequency(double wavelength) {
  return 2.0 * pi * speed_of_light / wavelength;
}

} // namespace biphoton
