#include "biphoton/fresnel.hpp"

#include <cmath>
#include <sstream>

#include "biphoton/parallel.hpp"
#include "biphoton/units.hpp"

namespace biphoton::fresnel {

namespace {

bool is_free(const OpticalElement& e) { return std::holds_alternative<FreeSpace>(e); }

// Max |x_out - x_in| entering the edge-phase aliasing estimate, per axis.
double axis_extent(const TransverseGrid& in, const TransverseGrid& out, int axis) {
  const double ein = axis == 0 ? in.extent_x() : in.extent_y();
  const double eout = axis == 0 ? out.extent_x() : out.extent_y();
  const double cin = axis == 0 ? in.cx : in.cy;
  const double cout = axis == 0 ? out.cx : out.cy;
  return std::max(ein, eout) + 2.0 * std::abs(cout - cin);
}

} // namespace

void AmplitudeMask::validate() const {
  grid.validate();
  if (transmission.size() != grid.count())
    throw GridMismatch("mask transmission length must match its grid");
  for (const cplx& t : transmission)
    if (!(std::abs(t) <= 1.0 + 1e-12)) throw Error("mask transmission magnitudes must be <= 1");
}

cplx AmplitudeMask::sample(double x, double y) const {
  if (!grid.covers(x, y)) throw GridMismatch("aperture mask does not cover the field grid");
  const int i = grid.nearest_x(x);
  const int j = grid.dim == 2 ? grid.nearest_y(y) : 0;
  return transmission[static_cast<std::size_t>(j) * grid.nx + i];
}

cplx AmplitudeMask::sample_or_zero(double x, double y) const {
  if (!grid.covers(x, y)) return cplx(0.0, 0.0);
  const int i = grid.nearest_x(x);
  const int j = grid.dim == 2 ? grid.nearest_y(y) : 0;
  return transmission[static_cast<std::size_t>(j) * grid.nx + i];
}

double AmplitudeMask::box_intensity(double xlo, double xhi, double ylo, double yhi) const {
  const double h = grid.spacing;
  auto axis_overlap = [h](double lo, double hi, double center) {
    const double a = std::max(lo, center - 0.5 * h);
    const double b = std::min(hi, center + 0.5 * h);
    return std::max(0.0, b - a);
  };
  const double area = (xhi - xlo) * (grid.dim == 2 ? (yhi - ylo) : 1.0);
  if (!(area > 0.0)) return 0.0;
  double acc = 0.0;
  const int i0 = std::max(0, grid.nearest_x(xlo) - 1);
  const int i1 = std::min(grid.nx - 1, grid.nearest_x(xhi) + 1);
  const int j0 = grid.dim == 2 ? std::max(0, grid.nearest_y(ylo) - 1) : 0;
  const int j1 = grid.dim == 2 ? std::min(grid.ny - 1, grid.nearest_y(yhi) + 1) : 0;
  for (int j = j0; j <= j1; ++j) {
    const double oy = grid.dim == 2 ? axis_overlap(ylo, yhi, grid.y(j)) : 1.0;
    if (oy == 0.0) continue;
    for (int i = i0; i <= i1; ++i) {
      const double ox = axis_overlap(xlo, xhi, grid.x(i));
      if (ox == 0.0) continue;
      acc += ox * oy * std::norm(transmission[static_cast<std::size_t>(j) * grid.nx + i]);
    }
  }
  return acc / area;
}

OpticalArm& OpticalArm::free_space(double distance) {
  if (distance <= 0.0) throw InvalidDistance("free-space distance must be > 0");
  stages_.push_back({FreeSpace{distance}, std::nullopt});
  return *this;
}

OpticalArm& OpticalArm::free_space(double distance, const TransverseGrid& exit_plane) {
  if (distance <= 0.0) throw InvalidDistance("free-space distance must be > 0");
  exit_plane.validate();
  stages_.push_back({FreeSpace{distance}, exit_plane});
  return *this;
}

OpticalArm& OpticalArm::thin_lens(double focal_length, double aperture_radius) {
  if (focal_length == 0.0) throw Error("thin-lens focal length must be nonzero");
  if (!(aperture_radius > 0.0)) throw Error("lens aperture radius must be positive");
  stages_.push_back({ThinLens{focal_length, aperture_radius}, std::nullopt});
  return *this;
}

OpticalArm& OpticalArm::aperture(AmplitudeMask mask) {
  mask.validate();
  stages_.push_back({Aperture{std::move(mask)}, std::nullopt});
  return *this;
}

double OpticalArm::total_axial_length() const {
  double z = 0.0;
  for (const Stage& s : stages_)
    if (const auto* f = std::get_if<FreeSpace>(&s.element)) z += f->distance;
  return z;
}

bool OpticalArm::separable() const {
  for (const Stage& s : stages_) {
    if (std::holds_alternative<Aperture>(s.element)) return false;
    if (const auto* l = std::get_if<ThinLens>(&s.element))
      if (std::isfinite(l->aperture_radius)) return false;
  }
  return true;
}

cplx free_prefactor(double omega, double distance, int dim) {
  // 2-D: -i w / (2 pi c z); 1-D: its principal square root, which is what
  // the cascade identity fixes for a one-axis kernel.
  const double mag2 = omega / (2.0 * pi * speed_of_light * distance);
  if (dim == 2) return cplx(0.0, -mag2);
  const double r = std::sqrt(mag2);
  return cplx(r * std::cos(-0.25 * pi), r * std::sin(-0.25 * pi));
}

void check_sampling(const TransverseGrid& in, const TransverseGrid& out, double omega,
                    double distance) {
  if (distance <= 0.0) throw InvalidDistance("propagation distance must be > 0");
  if (in.dim != out.dim) throw DimensionMismatch("input and output grids differ in dimensionality");
  const double beta = omega / (speed_of_light * distance);
  // The input spacing is the quadrature step; output samples are evaluated
  // independently and carry no aliasing of their own.
  const double h = in.spacing;
  double extent = axis_extent(in, out, 0);
  if (in.dim == 2) extent = std::max(extent, axis_extent(in, out, 1));
  const double step = beta * extent * h / 2.0;
  if (step > pi) {
    std::ostringstream msg;
    msg << "Fresnel kernel aliased: edge phase step " << step << " rad exceeds pi for distance "
        << distance << " m; need input spacing <= " << (pi * 2.0 / (beta * extent)) << " m (>= "
        << static_cast<long>(std::ceil(extent * beta * extent / (2.0 * pi)))
        << " samples across " << extent << " m)";
    throw SamplingViolation(msg.str());
  }
}

CMatrix axis_kernel(const TransverseGrid& in, const TransverseGrid& out, double omega,
                    double distance, int axis, bool carry_phase) {
  const double beta = omega / (speed_of_light * distance);
  const int nin = axis == 0 ? in.nx : in.ny;
  const int nout = axis == 0 ? out.nx : out.ny;
  const double cin = axis == 0 ? in.cx : in.cy;
  const double cout = axis == 0 ? out.cx : out.cy;

  cplx pref = free_prefactor(omega, distance, 1) * in.spacing;
  if (carry_phase) {
    const double ph = omega * distance / speed_of_light;
    pref *= cplx(std::cos(ph), std::sin(ph));
  }

  CMatrix k(static_cast<std::size_t>(nout), static_cast<std::size_t>(nin));
  if (in.spacing == out.spacing) {
    // Displacements live on a lattice: tabulate the phase once.
    const double h = in.spacing;
    const int iout0 = nout / 2, iin0 = nin / 2;
    const int offset = iout0 - iin0 + nin - 1; // maps min displacement to index 0
    std::vector<cplx> table(static_cast<std::size_t>(nout + nin - 1));
    for (int t = 0; t < nout + nin - 1; ++t) {
      const double dx = (cout - cin) + (t - offset) * h;
      table[static_cast<std::size_t>(t)] = pref * gaussian_phase(dx * dx, beta);
    }
    parallel_for(static_cast<std::size_t>(nout), [&](std::size_t r0, std::size_t r1) {
      for (std::size_t r = r0; r < r1; ++r) {
        cplx* row = k.row(r);
        const int rr = static_cast<int>(r) - iout0;
        for (int c = 0; c < nin; ++c)
          row[c] = table[static_cast<std::size_t>(rr - (c - iin0) + offset)];
      }
    });
  } else {
    parallel_for(static_cast<std::size_t>(nout), [&](std::size_t r0, std::size_t r1) {
      for (std::size_t r = r0; r < r1; ++r) {
        const double xo = cout + (static_cast<int>(r) - nout / 2) * out.spacing;
        cplx* row = k.row(r);
        for (int c = 0; c < nin; ++c) {
          const double dx = xo - (cin + (c - nin / 2) * in.spacing);
          row[c] = pref * gaussian_phase(dx * dx, beta);
        }
      }
    });
  }
  return k;
}

SampledField free_propagate(const SampledField& field, double distance,
                            const TransverseGrid& output_grid) {
  field.validate_values();
  output_grid.validate();
  if (distance <= 0.0) throw InvalidDistance("propagation distance must be > 0");
  check_sampling(field.grid, output_grid, field.omega(), distance);

  const double omega = field.omega();
  SampledField out(output_grid, field.wavelength, field.axial_position + distance);

  if (field.grid.dim == 1) {
    const CMatrix k = axis_kernel(field.grid, output_grid, omega, distance, 0, true);
    parallel_for(static_cast<std::size_t>(output_grid.nx), [&](std::size_t r0, std::size_t r1) {
      for (std::size_t r = r0; r < r1; ++r) {
        const cplx* row = k.row(r);
        cplx s(0.0, 0.0);
        for (int c = 0; c < field.grid.nx; ++c) s += row[c] * field.amplitude[static_cast<std::size_t>(c)];
        out.amplitude[r] = s;
      }
    });
    return out;
  }

  // 2-D hop: the kernel factorizes per axis, out = Ky * A * Kx^T.
  const CMatrix kx = axis_kernel(field.grid, output_grid, omega, distance, 0, true);
  const CMatrix ky = axis_kernel(field.grid, output_grid, omega, distance, 1, false);
  CMatrix a(static_cast<std::size_t>(field.grid.ny), static_cast<std::size_t>(field.grid.nx));
  a.data() = field.amplitude;
  const CMatrix t = matmul(ky, a);
  const CMatrix res = matmul_bt(t, kx);
  out.amplitude = res.data();
  return out;
}

SampledField apply_element(const SampledField& field, const OpticalElement& element) {
  if (const auto* f = std::get_if<FreeSpace>(&element))
    return free_propagate(field, f->distance, field.grid);

  SampledField out = field;
  if (const auto* lens = std::get_if<ThinLens>(&element)) {
    const double beta = -field.omega() / (speed_of_light * lens->focal_length);
    const double r2max = lens->aperture_radius * lens->aperture_radius;
    for (int j = 0; j < field.grid.ny; ++j) {
      const double yy = field.grid.dim == 2 ? field.grid.y(j) : 0.0;
      for (int i = 0; i < field.grid.nx; ++i) {
        const double xx = field.grid.x(i);
        const double r2 = xx * xx + yy * yy;
        cplx& a = out.at(i, j);
        a = r2 > r2max ? cplx(0.0, 0.0) : a * gaussian_phase(r2, beta);
      }
    }
    return out;
  }

  const auto& ap = std::get<Aperture>(element);
  ap.mask.validate();
  if (ap.mask.grid.same_shape(field.grid)) {
    for (std::size_t n = 0; n < out.amplitude.size(); ++n)
      out.amplitude[n] *= ap.mask.transmission[n];
    return out;
  }
  for (int j = 0; j < field.grid.ny; ++j) {
    const double yy = field.grid.dim == 2 ? field.grid.y(j) : 0.0;
    for (int i = 0; i < field.grid.nx; ++i)
      out.at(i, j) *= ap.mask.sample(field.grid.x(i), yy);
  }
  return out;
}

SampledField propagate_arm(const OpticalArm& arm, SampledField field,
                           const TransverseGrid& observation) {
  std::size_t last_free = arm.stages().size();
  for (std::size_t n = arm.stages().size(); n-- > 0;) {
    if (is_free(arm.stages()[n].element)) {
      last_free = n;
      break;
    }
  }
  for (std::size_t n = 0; n < arm.stages().size(); ++n) {
    const auto& stage = arm.stages()[n];
    if (const auto* f = std::get_if<FreeSpace>(&stage.element)) {
      const TransverseGrid& target =
          stage.exit_plane ? *stage.exit_plane : (n == last_free ? observation : field.grid);
      field = free_propagate(field, f->distance, target);
    } else {
      field = apply_element(field, stage.element);
    }
  }
  if (!field.grid.same_shape(observation))
    throw GridMismatch("arm exit plane differs from the requested observation grid");
  return field;
}

SampledField point_source_response(const OpticalArm& arm, double sx, double sy,
                                   double wavelength, const TransverseGrid& source_plane,
                                   const TransverseGrid& observation) {
  if (arm.empty() || !is_free(arm.stages().front().element))
    throw GeometryError("arm must begin with a free-space element");
  if (!source_plane.covers(sx, sy))
    throw GeometryError("source point lies outside the declared source extent");
  SampledField delta(source_plane, wavelength, 0.0);
  const int i = source_plane.nearest_x(sx);
  const int j = source_plane.dim == 2 ? source_plane.nearest_y(sy) : 0;
  delta.at(i, j) = cplx(1.0 / source_plane.cell_measure(), 0.0);
  return propagate_arm(arm, std::move(delta), observation);
}

namespace {

// Shared walk for the response-matrix builders: M starts as the scaled
// identity (a delta in every source cell) and is advanced stage by stage.
CMatrix response_walk(const OpticalArm& arm, const TransverseGrid& source, double wavelength,
                      const TransverseGrid& observation, int axis, bool carry_phase) {
  const double omega = angular_frequency(wavelength);
  const int nsrc = axis == 0 ? source.nx : source.ny;
  // Delta columns scaled 1/cell meet the first kernel's cell factor, so the
  // walk starts from the bare kernel instead of an identity product.
  bool started = false;
  CMatrix m;
  TransverseGrid current = source;
  std::size_t last_free = arm.stages().size();
  for (std::size_t n = arm.stages().size(); n-- > 0;) {
    if (is_free(arm.stages()[n].element)) {
      last_free = n;
      break;
    }
  }
  // arms without a free hop (or with no elements at all) respond in place

  for (std::size_t n = 0; n < arm.stages().size(); ++n) {
    const auto& stage = arm.stages()[n];
    if (const auto* f = std::get_if<FreeSpace>(&stage.element)) {
      const TransverseGrid& target =
          stage.exit_plane ? *stage.exit_plane : (n == last_free ? observation : current);
      check_sampling(current, target, omega, f->distance);
      CMatrix k = axis_kernel(current, target, omega, f->distance, axis, carry_phase);
      if (!started) {
        const double inv_cell = 1.0 / current.spacing;
        for (auto& v : k.data()) v *= inv_cell;
        m = std::move(k);
        started = true;
      } else {
        m = matmul(k, m);
      }
      current = target;
    } else if (const auto* lens = std::get_if<ThinLens>(&stage.element)) {
      if (!started) {
        m = CMatrix(static_cast<std::size_t>(nsrc), static_cast<std::size_t>(nsrc));
        for (int s = 0; s < nsrc; ++s) m(s, s) = cplx(1.0 / source.spacing, 0.0);
        started = true;
      }
      const double beta = -omega / (speed_of_light * lens->focal_length);
      const bool bounded = std::isfinite(lens->aperture_radius);
      if (bounded && current.dim == 2)
        throw Error("bounded circular lens is not separable; use a 1-D grid");
      for (std::size_t r = 0; r < m.rows(); ++r) {
        const double x = axis == 0 ? current.x(static_cast<int>(r)) : current.y(static_cast<int>(r));
        cplx factor = gaussian_phase(x * x, beta);
        if (bounded && std::abs(x) > lens->aperture_radius) factor = cplx(0.0, 0.0);
        cplx* row = m.row(r);
        for (std::size_t c = 0; c < m.cols(); ++c) row[c] *= factor;
      }
    } else {
      const auto& ap = std::get<Aperture>(stage.element);
      if (current.dim == 2) throw Error("aperture masks are not separable; use a 1-D grid");
      if (!started) {
        m = CMatrix(static_cast<std::size_t>(nsrc), static_cast<std::size_t>(nsrc));
        for (int s = 0; s < nsrc; ++s) m(s, s) = cplx(1.0 / source.spacing, 0.0);
        started = true;
      }
      ap.mask.validate();
      for (std::size_t r = 0; r < m.rows(); ++r) {
        const cplx factor = ap.mask.sample(current.x(static_cast<int>(r)));
        cplx* row = m.row(r);
        for (std::size_t c = 0; c < m.cols(); ++c) row[c] *= factor;
      }
    }
  }
  if (!started) {
    m = CMatrix(static_cast<std::size_t>(nsrc), static_cast<std::size_t>(nsrc));
    for (int s = 0; s < nsrc; ++s) m(s, s) = cplx(1.0 / source.spacing, 0.0);
  }
  if (!current.same_shape(observation))
    throw GridMismatch("arm exit plane differs from the requested observation grid");
  return m;
}

} // namespace

CMatrix arm_response_matrix(const OpticalArm& arm, const TransverseGrid& source,
                            double wavelength, const TransverseGrid& observation) {
  if (source.dim != 1 || observation.dim != 1)
    throw DimensionMismatch("arm_response_matrix expects 1-D grids");
  return response_walk(arm, source, wavelength, observation, 0, true);
}

CMatrix axis_response_matrix(const OpticalArm& arm, const TransverseGrid& source,
                             double wavelength, const TransverseGrid& observation, int axis) {
  if (source.dim != 2 || observation.dim != 2)
    throw DimensionMismatch("axis_response_matrix expects 2-D grids");
  if (!arm.separable()) throw Error("arm is not separable over the transverse axes");
  return response_walk(arm, source, wavelength, observation, axis, axis == 0);
}

} // namespace biphoton::fresnel
