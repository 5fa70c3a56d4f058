#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "biphoton/grid.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

using cplx = std::complex<double>;

/// Complex scalar amplitude sampled on a transverse grid at one axial plane.
/// Row-major storage: amplitude[j * nx + i] is sample (i, j).
struct SampledField {
  TransverseGrid grid;
  std::vector<cplx> amplitude;
  double wavelength = 0.0;     // meters
  double axial_position = 0.0; // meters

  SampledField() = default;
  SampledField(TransverseGrid g, double lambda, double z = 0.0)
      : grid(g), amplitude(g.count(), cplx(0.0, 0.0)), wavelength(lambda), axial_position(z) {
    validate_config();
  }

  void validate_config() const {
    grid.validate();
    if (wavelength <= 0.0) throw Error("wavelength must be positive");
  }

  void validate_values() const {
    if (amplitude.size() != grid.count()) throw Error("amplitude length must match grid");
    for (const cplx& a : amplitude)
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
        throw Error("field amplitude must be finite");
  }

  double omega() const { return angular_frequency(wavelength); }

  cplx& at(int i, int j = 0) { return amplitude[static_cast<std::size_t>(j) * grid.nx + i]; }
  const cplx& at(int i, int j = 0) const {
    return amplitude[static_cast<std::size_t>(j) * grid.nx + i];
  }
};

/// Total |amplitude|^2 integrated over the grid.
inline double field_energy(const SampledField& f) {
  double s = 0.0;
  for (const cplx& a : f.amplitude) s += std::norm(a);
  return s * f.grid.cell_measure();
}

} // namespace biphoton
