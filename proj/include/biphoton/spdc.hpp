#pragma once

#include <complex>
#include <variant>
#include <vector>

#include "biphoton/errors.hpp"

namespace biphoton::spdc {

using cplx = std::complex<double>;

/// Crystal parameters entering the phase-matching detuning.
/// L in meters, D = 1/u_s - 1/u_i in s/m, D' = d(1/u)/dw in s^2/m.
struct CrystalParams {
  double length = 0.0;
  double group_delay_mismatch = 0.0;      // D, used by type-II
  double group_velocity_dispersion = 0.0; // D', used by degenerate type-I

  void validate() const {
    if (!(length > 0.0)) throw Error("crystal length must be positive");
  }
  double dl() const { return group_delay_mismatch * length; }          // D*L, seconds
  double dpl() const { return group_velocity_dispersion * length; }    // D'*L, s^2
};

struct Flat {
  double cutoff = 0.0; // Omega_max, rad/s
};
struct Gaussian {
  double sigma = 0.0; // rad/s
};
struct SincTypeII {
  CrystalParams crystal;
};
struct SincTypeI {
  CrystalParams crystal;
};

/// Biphoton spectral weight f(Omega); all variants peak-normalized at 0.
using SpectralAmplitude = std::variant<Flat, Gaussian, SincTypeII, SincTypeI>;

void validate(const SpectralAmplitude& spectrum);

/// Longitudinal mismatch of near-collinear type-II phase matching: Omega*D*L.
double mismatch_type2(double omega_detuning, const CrystalParams& crystal);

/// Degenerate type-I runs on the second-order expansion: -Omega^2 * D' * L.
double mismatch_type1(double omega_detuning, const CrystalParams& crystal);

/// f(dzl) = exp(-i dzl/2) sinc(dzl/2), limit 1 at zero mismatch.
cplx longitudinal_amplitude(double dzl);

cplx spectral_weight(const SpectralAmplitude& spectrum, double omega_detuning);

/// |spectral_weight|^2, the per-mode probability of the rival mixed state.
double mixed_state_weight(const SpectralAmplitude& spectrum, double omega_detuning);

/// Symmetric quadrature window covering the spectrum's effective support.
struct SpectralSupport {
  double half_width = 0.0; // rad/s
};
SpectralSupport effective_support(const SpectralAmplitude& spectrum);

/// Midpoint quadrature nodes over the effective support.
struct SpectralQuadrature {
  std::vector<double> nodes; // rad/s
  double weight = 0.0;       // dOmega per node
};
SpectralQuadrature quadrature(const SpectralAmplitude& spectrum, std::size_t n);

enum class PumpModelKind { delta_correlated, gaussian };

/// Transverse pump model: the ideal delta(k_s + k_i) limit, or a Gaussian
/// pair-correlation of the given waist.
struct PumpTransverseModel {
  PumpModelKind kind = PumpModelKind::delta_correlated;
  double waist = 0.0; // meters, Gaussian only

  void validate() const {
    if (kind == PumpModelKind::gaussian && !(waist > 0.0))
      throw Error("Gaussian pump waist must be positive");
  }
};

struct SpdcConfig {
  double pump_wavelength = 0.0;   // meters
  double signal_wavelength = 0.0; // central, meters
  double idler_wavelength = 0.0;  // central, meters
  CrystalParams crystal;
  SpectralAmplitude spectrum = Flat{1e13};
  PumpTransverseModel pump;

  void validate() const;

  double omega_signal() const;
  double omega_idler() const;
  double omega_pump() const;

  /// Degenerate collinear config at the given signal/idler wavelength.
  static SpdcConfig degenerate(double signal_idler_wavelength, SpectralAmplitude spectrum,
                               CrystalParams crystal = {3e-3, 0.0, 0.0});
};

} // namespace biphoton::spdc
