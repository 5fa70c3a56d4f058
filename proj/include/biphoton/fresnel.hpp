#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "biphoton/field.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/matrix.hpp"

namespace biphoton::fresnel {

/// Quadratic phase factor G(|alpha|, beta) = exp(i (beta/2) |alpha|^2),
/// taking |alpha|^2 directly.  Unit magnitude for finite inputs.
inline cplx gaussian_phase(double displacement_sq, double curvature) {
  const double phase = 0.5 * curvature * displacement_sq;
  return cplx(std::cos(phase), std::sin(phase));
}

struct FreeSpace {
  double distance = 0.0; // meters, > 0
  bool operator==(const FreeSpace&) const = default;
};

struct ThinLens {
  double focal_length = 0.0; // meters, != 0
  double aperture_radius = std::numeric_limits<double>::infinity();
  bool operator==(const ThinLens&) const = default;
};

/// Complex transmission sampled on its own grid; |t| <= 1 everywhere.
struct AmplitudeMask {
  TransverseGrid grid;
  std::vector<cplx> transmission;

  void validate() const;
  cplx sample(double x, double y = 0.0) const; // nearest neighbor; throws off-grid
  cplx sample_or_zero(double x, double y = 0.0) const; // opaque outside the mask extent
  /// Mean |t|^2 over an axis-aligned box, overlap-weighted across mask
  /// cells; opaque outside the mask extent.  This is the faithful cell
  /// weight for bucket-detector integration on a foreign grid.
  double box_intensity(double xlo, double xhi, double ylo = 0.0, double yhi = 0.0) const;
  bool operator==(const AmplitudeMask&) const = default;
};

struct Aperture {
  AmplitudeMask mask;
  bool operator==(const Aperture&) const = default;
};

using OpticalElement = std::variant<FreeSpace, ThinLens, Aperture>;

/// Ordered element chain for one optical arm.  Free-space hops may declare
/// the grid of the plane they land on; hops without one keep the current
/// grid shape, except the arm's final hop which lands on the observation
/// grid supplied at evaluation time.
class OpticalArm {
public:
  struct Stage {
    OpticalElement element;
    std::optional<TransverseGrid> exit_plane; // FreeSpace only
    bool operator==(const Stage&) const = default;
  };

  OpticalArm& free_space(double distance);
  OpticalArm& free_space(double distance, const TransverseGrid& exit_plane);
  OpticalArm& thin_lens(double focal_length,
                        double aperture_radius = std::numeric_limits<double>::infinity());
  OpticalArm& aperture(AmplitudeMask mask);

  const std::vector<Stage>& stages() const { return stages_; }
  bool empty() const { return stages_.empty(); }
  bool operator==(const OpticalArm& o) const { return stages_ == o.stages_; }

  /// Sum of free-space distances.
  double total_axial_length() const;

  /// True when every element factorizes over the transverse axes
  /// (free space and unbounded thin lenses).
  bool separable() const;

private:
  std::vector<Stage> stages_;
};

/// Normalized free-space prefactor; dim 1 takes the principal square root of
/// the 2-D value so that two-step propagation cascades exactly.
cplx free_prefactor(double omega, double distance, int dim);

/// Rejects a hop whose kernel phase step between adjacent samples at the
/// grid edge exceeds pi.  The thrown message names the admissible spacing.
void check_sampling(const TransverseGrid& in, const TransverseGrid& out, double omega,
                    double distance);

/// One-axis free-space kernel matrix [out x in].  Includes the input cell
/// length; the spherical-wave phase exp(i w z / c) is included only when
/// `carry_phase` is set (once per hop when axes are combined).
CMatrix axis_kernel(const TransverseGrid& in, const TransverseGrid& out, double omega,
                    double distance, int axis, bool carry_phase);

/// Huygens-Fresnel propagation over a positive distance onto an output grid.
SampledField free_propagate(const SampledField& field, double distance,
                            const TransverseGrid& output_grid);

/// Lens / aperture / free-space application.  Lens and aperture leave the
/// axial position unchanged; FreeSpace keeps the grid shape.
SampledField apply_element(const SampledField& field, const OpticalElement& element);

/// Applies all arm elements in order; the final free hop lands on
/// `observation` unless the arm declared its own exit plane there.
SampledField propagate_arm(const OpticalArm& arm, SampledField field,
                           const TransverseGrid& observation);

/// Complex response at `observation` to a unit point emitter at (sx, sy),
/// realized as a single nonzero cell of the source plane scaled by the
/// inverse cell measure.
SampledField point_source_response(const OpticalArm& arm, double sx, double sy,
                                   double wavelength, const TransverseGrid& source_plane,
                                   const TransverseGrid& observation);

/// Response of every source-plane sample through a 1-D arm; column s holds
/// the observation-plane response to a point emitter in source cell s.
CMatrix arm_response_matrix(const OpticalArm& arm, const TransverseGrid& source,
                            double wavelength, const TransverseGrid& observation);

/// Per-axis response factor through a separable arm on 2-D grids; the full
/// response is the outer product of the axis factors.
CMatrix axis_response_matrix(const OpticalArm& arm, const TransverseGrid& source,
                             double wavelength, const TransverseGrid& observation, int axis);

} // namespace biphoton::fresnel
