#include "biphoton/spdc.hpp"

#include <cmath>

#include "biphoton/special.hpp"
#include "biphoton/units.hpp"

namespace biphoton::spdc {

void validate(const SpectralAmplitude& spectrum) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Flat>) {
          if (!(s.cutoff > 0.0)) throw Error("flat spectrum requires a positive cutoff");
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          if (!(s.sigma > 0.0)) throw Error("Gaussian spectrum sigma must be positive");
        } else if constexpr (std::is_same_v<T, SincTypeII>) {
          s.crystal.validate();
          if (s.crystal.group_delay_mismatch == 0.0)
            throw Error("type-II spectrum requires a nonzero group-delay mismatch D");
        } else {
          s.crystal.validate();
          if (s.crystal.group_velocity_dispersion == 0.0)
            throw Error("type-I spectrum requires a nonzero dispersion D'");
        }
      },
      spectrum);
}

double mismatch_type2(double omega_detuning, const CrystalParams& crystal) {
  crystal.validate();
  return omega_detuning * crystal.dl();
}

double mismatch_type1(double omega_detuning, const CrystalParams& crystal) {
  crystal.validate();
  return -omega_detuning * omega_detuning * crystal.dpl();
}

cplx longitudinal_amplitude(double dzl) {
  const double half = 0.5 * dzl;
  return cplx(std::cos(half), -std::sin(half)) * sinc(half);
}

cplx spectral_weight(const SpectralAmplitude& spectrum, double omega_detuning) {
  return std::visit(
      [omega_detuning](const auto& s) -> cplx {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Flat>) {
          return std::abs(omega_detuning) <= s.cutoff ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          const double u = omega_detuning / s.sigma;
          return cplx(std::exp(-0.5 * u * u), 0.0);
        } else if constexpr (std::is_same_v<T, SincTypeII>) {
          return longitudinal_amplitude(mismatch_type2(omega_detuning, s.crystal));
        } else {
          return longitudinal_amplitude(mismatch_type1(omega_detuning, s.crystal));
        }
      },
      spectrum);
}

double mixed_state_weight(const SpectralAmplitude& spectrum, double omega_detuning) {
  return std::norm(spectral_weight(spectrum, omega_detuning));
}

SpectralSupport effective_support(const SpectralAmplitude& spectrum) {
  validate(spectrum);
  return std::visit(
      [](const auto& s) -> SpectralSupport {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Flat>) {
          return {s.cutoff};
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return {8.0 * s.sigma};
        } else if constexpr (std::is_same_v<T, SincTypeII>) {
          const double dl = std::abs(s.crystal.dl());
          if (!(dl > 0.0)) throw QuadratureFailure("sinc spectrum support unbounded: D*L is zero");
          return {400.0 * 2.0 * pi / dl}; // 400 sinc lobes each side
        } else {
          const double dpl = std::abs(s.crystal.dpl());
          if (!(dpl > 0.0)) throw QuadratureFailure("sinc spectrum support unbounded: D'*L is zero");
          return {std::sqrt(400.0 * 2.0 * pi / dpl)};
        }
      },
      spectrum);
}

SpectralQuadrature quadrature(const SpectralAmplitude& spectrum, std::size_t n) {
  if (n < 2) throw QuadratureFailure("spectral quadrature needs at least 2 nodes");
  const SpectralSupport sup = effective_support(spectrum);
  SpectralQuadrature q;
  q.weight = 2.0 * sup.half_width / static_cast<double>(n);
  q.nodes.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    q.nodes[k] = -sup.half_width + (static_cast<double>(k) + 0.5) * q.weight;
  return q;
}

void SpdcConfig::validate() const {
  if (!(pump_wavelength > 0.0) || !(signal_wavelength > 0.0) || !(idler_wavelength > 0.0))
    throw Error("wavelengths must be positive");
  const double lhs = 1.0 / signal_wavelength + 1.0 / idler_wavelength;
  const double rhs = 1.0 / pump_wavelength;
  if (std::abs(lhs - rhs) > 1e-9 * rhs)
    throw Error("central frequencies must conserve energy: 1/ls + 1/li = 1/lp");
  crystal.validate();
  spdc::validate(spectrum);
  pump.validate();
}

double SpdcConfig::omega_signal() const { return angular_frequency(signal_wavelength); }
double SpdcConfig::omega_idler() const { return angular_frequency(idler_wavelength); }
double SpdcConfig::omega_pump() const { return angular_frequency(pump_wavelength); }

SpdcConfig SpdcConfig::degenerate(double signal_idler_wavelength, SpectralAmplitude spectrum,
                                  CrystalParams crystal) {
  SpdcConfig cfg;
  cfg.pump_wavelength = 0.5 * signal_idler_wavelength;
  cfg.signal_wavelength = signal_idler_wavelength;
  cfg.idler_wavelength = signal_idler_wavelength;
  cfg.crystal = crystal;
  cfg.spectrum = std::move(spectrum);
  return cfg;
}

} // namespace biphoton::spdc
