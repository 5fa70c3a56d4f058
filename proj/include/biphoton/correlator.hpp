#pragma once

#include <map>
#include <string>
#include <vector>

#include "biphoton/fresnel.hpp"
#include "biphoton/matrix.hpp"
#include "biphoton/spdc.hpp"

namespace biphoton {

/// Pump-spot amplitude profile weighting the shared-point source sum.
/// Separable over the axes, so 2-D evaluations stay factorized.
struct SourceApodization {
  bool gaussian = false;
  double waist = 0.0; // 1/e field radius, meters

  double operator()(double x, double y = 0.0) const {
    if (!gaussian) return 1.0;
    return std::exp(-(x * x + y * y) / (waist * waist));
  }
  double axis(double x) const { return gaussian ? std::exp(-x * x / (waist * waist)) : 1.0; }
};

/// Source model plus the two optical arms of a joint-detection experiment.
struct BiphotonSetup {
  spdc::SpdcConfig spdc;
  TransverseGrid source_grid;       // output plane of the crystal
  fresnel::OpticalArm arm_signal;
  fresnel::OpticalArm arm_idler;
  double wavelength_signal = 0.0;   // meters
  double wavelength_idler = 0.0;

  SourceApodization apodization;    // pump spot profile (weight applied once)
  std::vector<cplx> source_mask;    // per-photon emission mask (1-D only); empty = 1
  std::size_t spectral_nodes = 0;   // >0 enables broadband coincident evaluation
  double spectral_half_width = 0.0; // rad/s; 0 = spectrum support, capped below the carriers

  void validate() const;
};

/// Temporal biphoton envelope over a tau = tau1 - tau2 grid; the carrier
/// exp(-i(ws0 tau1 + wi0 tau2)) is kept as metadata, not sampled.
struct TwoPhotonWavepacket {
  std::vector<double> tau;      // seconds, uniform
  std::vector<cplx> envelope;
  double omega_signal0 = 0.0;
  double omega_idler0 = 0.0;

  void validate() const;
};

/// Nonnegative G2 values over one or two scan axes.  value(ia, ib) lives at
/// values[ib * axis_a.size() + ia]; axis_b is empty for one-axis maps.
struct CorrelationMap {
  enum class Mode { joint_scan, bucket, coincident, temporal };

  Mode mode = Mode::coincident;
  std::vector<double> axis_a;
  std::vector<double> axis_b;
  std::vector<double> values;
  std::map<std::string, double> geometry;

  double value(std::size_t ia, std::size_t ib = 0) const {
    return values[ib * axis_a.size() + ia];
  }
  double peak() const;
  void normalize_peak();
  void validate() const;
};

/// F_{tau1-tau2}{ f(Omega) } by midpoint quadrature over the spectrum's
/// effective support.
TwoPhotonWavepacket temporal_wavefunction(const spdc::SpectralAmplitude& spectrum,
                                          const std::vector<double>& tau_grid,
                                          double omega_signal0 = 0.0, double omega_idler0 = 0.0);

/// |envelope|^2, peak-normalized.
CorrelationMap temporal_g2(const spdc::SpectralAmplitude& spectrum,
                           const std::vector<double>& tau_grid);

/// The rival mixed state: an incoherent sum of per-Omega constants, flat in
/// tau at the level of the integrated spectral power.
CorrelationMap mixed_temporal_g2(const spdc::SpectralAmplitude& spectrum,
                                 const std::vector<double>& tau_grid);

/// Coherent source-point sum of arm-response products on 1-D grids:
/// Psi(r1, r2) = sum_s w(s) K_sig(s -> r1) K_idl(s -> r2) * cell.
CMatrix spatial_wavefunction(const BiphotonSetup& setup, const TransverseGrid& scan1,
                             const TransverseGrid& scan2);

/// |Psi|^2 over scan1 x scan2, peak-normalized.
CorrelationMap joint_g2(const BiphotonSetup& setup, const TransverseGrid& scan1,
                        const TransverseGrid& scan2);

/// Diagonal rho1 = rho2 of the joint map; honors setup.spectral_nodes for
/// broadband evaluation.  Works on 1-D and separable 2-D setups.
CorrelationMap coincident_g2(const BiphotonSetup& setup, const TransverseGrid& scan);

/// Bucket-detector rate: sum_o |A(o)|^2 |Psi(o, r2)|^2 * cell, with the
/// object mask applied on the signal arm's observation plane.
CorrelationMap bucket_rate(const BiphotonSetup& setup, const fresnel::AmplitudeMask& object,
                           const TransverseGrid& object_plane, const TransverseGrid& scan2);

} // namespace biphoton
