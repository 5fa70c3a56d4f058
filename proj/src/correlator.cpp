#include "biphoton/correlator.hpp"

#include <algorithm>
#include <cmath>

#include "biphoton/parallel.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

namespace {

std::size_t default_node_count(const spdc::SpectralAmplitude& spectrum) {
  return std::visit(
      [](const auto& s) -> std::size_t {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, spdc::Flat>) return 4096;
        else if constexpr (std::is_same_v<T, spdc::Gaussian>) return 2048;
        else return 12800; // sinc variants: ~16 nodes per lobe over 400 lobes
      },
      spectrum);
}

// Per-axis source weights including apodization, per-photon mask and the
// per-axis cell length.
std::vector<cplx> source_weights_1d(const BiphotonSetup& setup) {
  const TransverseGrid& g = setup.source_grid;
  std::vector<cplx> w(static_cast<std::size_t>(g.nx));
  for (int s = 0; s < g.nx; ++s) {
    cplx v(setup.apodization.axis(g.x(s)) * g.spacing, 0.0);
    if (!setup.source_mask.empty()) {
      const cplx m = setup.source_mask[static_cast<std::size_t>(s)];
      v *= m * m; // each photon of the pair passes the emission mask
    }
    w[static_cast<std::size_t>(s)] = v;
  }
  return w;
}

CMatrix scale_columns(const CMatrix& m, const std::vector<cplx>& w) {
  CMatrix out = m;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    cplx* row = out.row(r);
    for (std::size_t c = 0; c < out.cols(); ++c) row[c] *= w[c];
  }
  return out;
}

double wavelength_from_omega(double omega) {
  if (!(omega > 0.0)) throw QuadratureFailure("spectral node drives a frequency nonpositive");
  return 2.0 * pi * speed_of_light / omega;
}

} // namespace

void BiphotonSetup::validate() const {
  spdc.validate();
  source_grid.validate();
  if (!(wavelength_signal > 0.0) || !(wavelength_idler > 0.0))
    throw Error("arm wavelengths must be positive");
  const double ws = angular_frequency(wavelength_signal) + angular_frequency(wavelength_idler);
  if (std::abs(ws - spdc.omega_pump()) > 1e-6 * spdc.omega_pump())
    throw Error("arm wavelengths inconsistent with the pump");
  if (!source_mask.empty() && source_mask.size() != source_grid.count())
    throw GridMismatch("source mask length must match the source grid");
  if (!source_mask.empty() && source_grid.dim != 1)
    throw DimensionMismatch("source masks are supported on 1-D source grids only");
}

void TwoPhotonWavepacket::validate() const {
  if (tau.size() < 2 || tau.size() != envelope.size())
    throw Error("wavepacket needs matching tau and envelope arrays");
  const double step = tau[1] - tau[0];
  for (std::size_t k = 1; k < tau.size(); ++k)
    if (std::abs((tau[k] - tau[k - 1]) - step) > 1e-9 * std::abs(step))
      throw Error("tau grid must be uniform");
  for (const cplx& e : envelope)
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
      throw Error("envelope must be finite");
}

double CorrelationMap::peak() const {
  double p = 0.0;
  for (double v : values) p = std::max(p, v);
  return p;
}

void CorrelationMap::normalize_peak() {
  const double p = peak();
  if (p > 0.0)
    for (double& v : values) v /= p;
}

void CorrelationMap::validate() const {
  const std::size_t expect = axis_a.size() * std::max<std::size_t>(1, axis_b.size());
  if (values.size() != expect) throw Error("correlation map shape mismatch");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error("correlation values must be nonnegative");
}

TwoPhotonWavepacket temporal_wavefunction(const spdc::SpectralAmplitude& spectrum,
                                          const std::vector<double>& tau_grid,
                                          double omega_signal0, double omega_idler0) {
  const spdc::SpectralQuadrature q = spdc::quadrature(spectrum, default_node_count(spectrum));
  std::vector<cplx> f(q.nodes.size());
  for (std::size_t k = 0; k < q.nodes.size(); ++k)
    f[k] = spdc::spectral_weight(spectrum, q.nodes[k]);

  TwoPhotonWavepacket wp;
  wp.tau = tau_grid;
  wp.envelope.assign(tau_grid.size(), cplx(0.0, 0.0));
  wp.omega_signal0 = omega_signal0;
  wp.omega_idler0 = omega_idler0;

  const double omega0 = q.nodes.front();
  const double domega = q.nodes.size() > 1 ? q.nodes[1] - q.nodes[0] : 0.0;
  parallel_for(tau_grid.size(), [&](std::size_t t0, std::size_t t1) {
    for (std::size_t t = t0; t < t1; ++t) {
      const double tau = tau_grid[t];
      // exp(-i Omega_k tau) advances by a fixed rotation per node.
      cplx cur(std::cos(omega0 * tau), -std::sin(omega0 * tau));
      const cplx rot(std::cos(domega * tau), -std::sin(domega * tau));
      cplx sum(0.0, 0.0);
      for (std::size_t k = 0; k < f.size(); ++k) {
        sum += f[k] * cur;
        cur *= rot;
      }
      wp.envelope[t] = sum * q.weight;
    }
  });
  wp.validate();
  return wp;
}

CorrelationMap temporal_g2(const spdc::SpectralAmplitude& spectrum,
                           const std::vector<double>& tau_grid) {
  const TwoPhotonWavepacket wp = temporal_wavefunction(spectrum, tau_grid);
  CorrelationMap map;
  map.mode = CorrelationMap::Mode::temporal;
  map.axis_a = tau_grid;
  map.values.resize(tau_grid.size());
  for (std::size_t t = 0; t < tau_grid.size(); ++t) map.values[t] = std::norm(wp.envelope[t]);
  map.normalize_peak();
  return map;
}

CorrelationMap mixed_temporal_g2(const spdc::SpectralAmplitude& spectrum,
                                 const std::vector<double>& tau_grid) {
  const spdc::SpectralQuadrature q = spdc::quadrature(spectrum, default_node_count(spectrum));
  double level = 0.0;
  for (double node : q.nodes) level += spdc::mixed_state_weight(spectrum, node);
  level *= q.weight;
  CorrelationMap map;
  map.mode = CorrelationMap::Mode::temporal;
  map.axis_a = tau_grid;
  map.values.assign(tau_grid.size(), level);
  map.geometry["mixed_level"] = level;
  return map;
}

CMatrix spatial_wavefunction(const BiphotonSetup& setup, const TransverseGrid& scan1,
                             const TransverseGrid& scan2) {
  setup.validate();
  if (setup.source_grid.dim != 1 || scan1.dim != 1 || scan2.dim != 1)
    throw DimensionMismatch("spatial_wavefunction expects 1-D grids; 2-D runs go through "
                            "coincident_g2 or bucket_rate");
  const CMatrix m1 = fresnel::arm_response_matrix(setup.arm_signal, setup.source_grid,
                                                  setup.wavelength_signal, scan1);
  const CMatrix m2 = fresnel::arm_response_matrix(setup.arm_idler, setup.source_grid,
                                                  setup.wavelength_idler, scan2);
  const std::vector<cplx> w = source_weights_1d(setup);

  if (setup.spdc.pump.kind == spdc::PumpModelKind::gaussian) {
    // Pairwise sum over (s, s') with the pump-waist correlation weight.
    const TransverseGrid& g = setup.source_grid;
    const double waist = setup.spdc.pump.waist;
    CMatrix psi(m1.rows(), m2.rows());
    parallel_for(m1.rows(), [&](std::size_t r0, std::size_t r1) {
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = 0; c < m2.rows(); ++c) {
          cplx sum(0.0, 0.0);
          for (int s = 0; s < g.nx; ++s) {
            for (int sp = 0; sp < g.nx; ++sp) {
              const double d = g.x(s) - g.x(sp);
              const double corr = std::exp(-d * d / (waist * waist));
              sum += m1(r, static_cast<std::size_t>(s)) * w[static_cast<std::size_t>(s)] *
                     corr * m2(c, static_cast<std::size_t>(sp)) * w[static_cast<std::size_t>(sp)];
            }
          }
          psi(r, c) = sum;
        }
      }
    });
    return psi;
  }

  return matmul_bt(scale_columns(m1, w), m2);
}

CorrelationMap joint_g2(const BiphotonSetup& setup, const TransverseGrid& scan1,
                        const TransverseGrid& scan2) {
  const CMatrix psi = spatial_wavefunction(setup, scan1, scan2);
  CorrelationMap map;
  map.mode = CorrelationMap::Mode::joint_scan;
  map.axis_a.resize(static_cast<std::size_t>(scan1.nx));
  for (int i = 0; i < scan1.nx; ++i) map.axis_a[static_cast<std::size_t>(i)] = scan1.x(i);
  map.axis_b.resize(static_cast<std::size_t>(scan2.nx));
  for (int i = 0; i < scan2.nx; ++i) map.axis_b[static_cast<std::size_t>(i)] = scan2.x(i);
  map.values.resize(map.axis_a.size() * map.axis_b.size());
  for (std::size_t i2 = 0; i2 < map.axis_b.size(); ++i2)
    for (std::size_t i1 = 0; i1 < map.axis_a.size(); ++i1)
      map.values[i2 * map.axis_a.size() + i1] = std::norm(psi(i1, i2));
  map.normalize_peak();
  return map;
}

namespace {

// Diagonal sum_s M1[i,s] w_s M2[i,s] at one frequency pair, 1-D.
std::vector<cplx> coincident_amplitude_1d(const BiphotonSetup& setup, const TransverseGrid& scan,
                                          double lambda_s, double lambda_i) {
  const bool same_arm = setup.arm_signal == setup.arm_idler && lambda_s == lambda_i;
  const CMatrix m1 =
      fresnel::arm_response_matrix(setup.arm_signal, setup.source_grid, lambda_s, scan);
  const CMatrix m2 =
      same_arm ? m1 : fresnel::arm_response_matrix(setup.arm_idler, setup.source_grid, lambda_i, scan);
  const std::vector<cplx> w = source_weights_1d(setup);
  std::vector<cplx> psi(m1.rows(), cplx(0.0, 0.0));
  for (std::size_t r = 0; r < m1.rows(); ++r) {
    const cplx* a = m1.row(r);
    const cplx* b = m2.row(r);
    cplx sum(0.0, 0.0);
    for (std::size_t s = 0; s < m1.cols(); ++s) sum += a[s] * w[s] * b[s];
    psi[r] = sum;
  }
  return psi;
}

} // namespace

CorrelationMap coincident_g2(const BiphotonSetup& setup, const TransverseGrid& scan) {
  setup.validate();
  if (setup.spdc.pump.kind != spdc::PumpModelKind::delta_correlated)
    throw Error("coincident_g2 implements the delta-correlated pump limit");

  CorrelationMap map;
  map.mode = CorrelationMap::Mode::coincident;

  if (setup.source_grid.dim == 1) {
    std::vector<cplx> psi(static_cast<std::size_t>(scan.nx), cplx(0.0, 0.0));
    if (setup.spectral_nodes == 0) {
      psi = coincident_amplitude_1d(setup, scan, setup.wavelength_signal,
                                    setup.wavelength_idler);
    } else {
      const double ws0 = setup.spdc.omega_signal();
      const double wi0 = setup.spdc.omega_idler();
      double half = setup.spectral_half_width > 0.0
                        ? setup.spectral_half_width
                        : spdc::effective_support(setup.spdc.spectrum).half_width;
      half = std::min(half, 0.45 * std::min(ws0, wi0));
      spdc::SpectralQuadrature q;
      q.weight = 2.0 * half / static_cast<double>(setup.spectral_nodes);
      q.nodes.resize(setup.spectral_nodes);
      for (std::size_t k = 0; k < setup.spectral_nodes; ++k)
        q.nodes[k] = -half + (static_cast<double>(k) + 0.5) * q.weight;
      // mirror the upper half so +/- node pairs are bit-equal (cache keys)
      for (std::size_t k = 0; k < setup.spectral_nodes / 2; ++k)
        q.nodes[setup.spectral_nodes - 1 - k] = -q.nodes[k];

      // response matrices depend only on the arm and the shifted frequency;
      // for identical arms the signal and idler node sets coincide, so a
      // cache halves the chain evaluations
      const bool same_arm = setup.arm_signal == setup.arm_idler;
      std::map<double, CMatrix> cache_s, cache_i;
      auto response = [&](const fresnel::OpticalArm& arm, std::map<double, CMatrix>& cache,
                          double omega) -> const CMatrix& {
        auto it = cache.find(omega);
        if (it == cache.end())
          it = cache
                   .emplace(omega, fresnel::arm_response_matrix(
                                       arm, setup.source_grid, wavelength_from_omega(omega), scan))
                   .first;
        return it->second;
      };
      const std::vector<cplx> w = source_weights_1d(setup);
      for (std::size_t k = 0; k < q.nodes.size(); ++k) {
        const double omega = q.nodes[k];
        const cplx f = spdc::spectral_weight(setup.spdc.spectrum, omega) * q.weight;
        if (std::abs(f) == 0.0) continue;
        const CMatrix& m1 = response(setup.arm_signal, cache_s, ws0 + omega);
        const CMatrix& m2 =
            response(setup.arm_idler, same_arm ? cache_s : cache_i, wi0 - omega);
        for (std::size_t r = 0; r < psi.size(); ++r) {
          const cplx* a = m1.row(r);
          const cplx* b = m2.row(r);
          cplx sum(0.0, 0.0);
          for (std::size_t s = 0; s < m1.cols(); ++s) sum += a[s] * w[s] * b[s];
          psi[r] += f * sum;
        }
      }
    }
    map.axis_a.resize(static_cast<std::size_t>(scan.nx));
    for (int i = 0; i < scan.nx; ++i) map.axis_a[static_cast<std::size_t>(i)] = scan.x(i);
    map.values.resize(psi.size());
    for (std::size_t r = 0; r < psi.size(); ++r) map.values[r] = std::norm(psi[r]);
    map.normalize_peak();
    return map;
  }

  // Separable 2-D diagonal: per-axis products recombined on the scan grid.
  if (setup.spectral_nodes != 0)
    throw Error("broadband coincident evaluation is 1-D only");
  if (!setup.source_mask.empty())
    throw DimensionMismatch("source masks are supported on 1-D source grids only");
  const CMatrix mx1 = fresnel::axis_response_matrix(setup.arm_signal, setup.source_grid,
                                                    setup.wavelength_signal, scan, 0);
  const CMatrix my1 = fresnel::axis_response_matrix(setup.arm_signal, setup.source_grid,
                                                    setup.wavelength_signal, scan, 1);
  const CMatrix mx2 = fresnel::axis_response_matrix(setup.arm_idler, setup.source_grid,
                                                    setup.wavelength_idler, scan, 0);
  const CMatrix my2 = fresnel::axis_response_matrix(setup.arm_idler, setup.source_grid,
                                                    setup.wavelength_idler, scan, 1);
  const TransverseGrid& g = setup.source_grid;

  // psi(x, y) = [sum_sx wx mx1 mx2] * [sum_sy wy my1 my2]
  std::vector<cplx> px(static_cast<std::size_t>(scan.nx));
  for (int i = 0; i < scan.nx; ++i) {
    cplx sum(0.0, 0.0);
    for (int s = 0; s < g.nx; ++s)
      sum += mx1(i, s) * mx2(i, s) * (setup.apodization.axis(g.x(s)) * g.spacing);
    px[static_cast<std::size_t>(i)] = sum;
  }
  std::vector<cplx> py(static_cast<std::size_t>(scan.ny));
  for (int j = 0; j < scan.ny; ++j) {
    cplx sum(0.0, 0.0);
    for (int s = 0; s < g.ny; ++s)
      sum += my1(j, s) * my2(j, s) * (setup.apodization.axis(g.y(s)) * g.spacing);
    py[static_cast<std::size_t>(j)] = sum;
  }
  map.axis_a.resize(static_cast<std::size_t>(scan.nx));
  for (int i = 0; i < scan.nx; ++i) map.axis_a[static_cast<std::size_t>(i)] = scan.x(i);
  map.axis_b.resize(static_cast<std::size_t>(scan.ny));
  for (int j = 0; j < scan.ny; ++j) map.axis_b[static_cast<std::size_t>(j)] = scan.y(j);
  map.values.resize(map.axis_a.size() * map.axis_b.size());
  for (std::size_t j = 0; j < map.axis_b.size(); ++j)
    for (std::size_t i = 0; i < map.axis_a.size(); ++i)
      map.values[j * map.axis_a.size() + i] = std::norm(px[i] * py[j]);
  map.normalize_peak();
  return map;
}

CorrelationMap bucket_rate(const BiphotonSetup& setup, const fresnel::AmplitudeMask& object,
                           const TransverseGrid& object_plane, const TransverseGrid& scan2) {
  setup.validate();
  object.validate();

  CorrelationMap map;
  map.mode = CorrelationMap::Mode::bucket;

  if (setup.source_grid.dim == 1) {
    const CMatrix psi = spatial_wavefunction(setup, object_plane, scan2);
    map.axis_a.resize(static_cast<std::size_t>(scan2.nx));
    for (int i = 0; i < scan2.nx; ++i) map.axis_a[static_cast<std::size_t>(i)] = scan2.x(i);
    map.values.assign(map.axis_a.size(), 0.0);
    for (int o = 0; o < object_plane.nx; ++o) {
      const double xo = object_plane.x(o);
      const double a2 =
          object.box_intensity(xo - 0.5 * object_plane.spacing, xo + 0.5 * object_plane.spacing);
      if (a2 == 0.0) continue;
      for (std::size_t r = 0; r < map.axis_a.size(); ++r)
        map.values[r] += a2 * std::norm(psi(static_cast<std::size_t>(o), r));
    }
    for (double& v : map.values) v *= object_plane.cell_measure();
    map.normalize_peak();
    return map;
  }

  if (setup.spdc.pump.kind != spdc::PumpModelKind::delta_correlated)
    throw Error("2-D bucket evaluation implements the delta-correlated pump limit");

  // Separable 2-D route: rate(r2) = sum_o |A(o)|^2 Bx[ox,x2] By[oy,y2].
  const CMatrix mx1 = fresnel::axis_response_matrix(setup.arm_signal, setup.source_grid,
                                                    setup.wavelength_signal, object_plane, 0);
  const CMatrix my1 = fresnel::axis_response_matrix(setup.arm_signal, setup.source_grid,
                                                    setup.wavelength_signal, object_plane, 1);
  const CMatrix mx2 = fresnel::axis_response_matrix(setup.arm_idler, setup.source_grid,
                                                    setup.wavelength_idler, scan2, 0);
  const CMatrix my2 = fresnel::axis_response_matrix(setup.arm_idler, setup.source_grid,
                                                    setup.wavelength_idler, scan2, 1);
  const TransverseGrid& g = setup.source_grid;

  std::vector<cplx> wx(static_cast<std::size_t>(g.nx)), wy(static_cast<std::size_t>(g.ny));
  for (int s = 0; s < g.nx; ++s)
    wx[static_cast<std::size_t>(s)] = cplx(setup.apodization.axis(g.x(s)) * g.spacing, 0.0);
  for (int s = 0; s < g.ny; ++s)
    wy[static_cast<std::size_t>(s)] = cplx(setup.apodization.axis(g.y(s)) * g.spacing, 0.0);

  const CMatrix psix = matmul_bt(scale_columns(mx1, wx), mx2); // [ox, x2]
  const CMatrix psiy = matmul_bt(scale_columns(my1, wy), my2); // [oy, y2]

  const std::size_t nx2 = static_cast<std::size_t>(scan2.nx);
  const std::size_t ny2 = static_cast<std::size_t>(scan2.ny);
  const std::size_t nox = static_cast<std::size_t>(object_plane.nx);
  const std::size_t noy = static_cast<std::size_t>(object_plane.ny);

  // t[oy][x2] = sum_ox |A|^2 |psix|^2
  std::vector<double> t(noy * nx2, 0.0);
  parallel_for(noy, [&](std::size_t j0, std::size_t j1) {
    for (std::size_t oy = j0; oy < j1; ++oy) {
      for (std::size_t ox = 0; ox < nox; ++ox) {
        const double x = object_plane.x(static_cast<int>(ox));
        const double y = object_plane.y(static_cast<int>(oy));
        const double half = 0.5 * object_plane.spacing;
        const double a2 = object.box_intensity(x - half, x + half, y - half, y + half);
        if (a2 == 0.0) continue;
        const cplx* prow = psix.row(ox);
        double* trow = t.data() + oy * nx2;
        for (std::size_t x2 = 0; x2 < nx2; ++x2) trow[x2] += a2 * std::norm(prow[x2]);
      }
    }
  });

  map.axis_a.resize(nx2);
  for (int i = 0; i < scan2.nx; ++i) map.axis_a[static_cast<std::size_t>(i)] = scan2.x(i);
  map.axis_b.resize(ny2);
  for (int j = 0; j < scan2.ny; ++j) map.axis_b[static_cast<std::size_t>(j)] = scan2.y(j);
  map.values.assign(nx2 * ny2, 0.0);
  parallel_for(ny2, [&](std::size_t j0, std::size_t j1) {
    for (std::size_t y2 = j0; y2 < j1; ++y2) {
      double* vrow = map.values.data() + y2 * nx2;
      for (std::size_t oy = 0; oy < noy; ++oy) {
        const double by = std::norm(psiy(oy, y2));
        if (by == 0.0) continue;
        const double* trow = t.data() + oy * nx2;
        for (std::size_t x2 = 0; x2 < nx2; ++x2) vrow[x2] += by * trow[x2];
      }
    }
  });
  for (double& v : map.values) v *= object_plane.cell_measure();
  map.normalize_peak();
  return map;
}

} // namespace biphoton
