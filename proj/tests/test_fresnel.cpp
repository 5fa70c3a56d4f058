#include <doctest.h>

#include <cmath>
#include <random>

#include "biphoton/analysis.hpp"
#include "biphoton/fresnel.hpp"
#include "biphoton/units.hpp"
#include "oracles.hpp"

using namespace biphoton;
using fresnel::gaussian_phase;
using fresnel::OpticalArm;

namespace {

constexpr double lambda0 = 702.2 * units::nm;

SampledField gaussian_input(const TransverseGrid& g, double waist, double lambda) {
  SampledField f(g, lambda);
  for (int i = 0; i < g.nx; ++i) {
    const double x = g.x(i);
    f.amplitude[static_cast<std::size_t>(i)] = std::exp(-x * x / (waist * waist));
  }
  return f;
}

// waist from the second moment of |E|^2: w = 2 sigma for a Gaussian
double fitted_waist(const SampledField& f) {
  double m = 0.0, mx = 0.0, mxx = 0.0;
  for (int i = 0; i < f.grid.nx; ++i) {
    const double w = std::norm(f.amplitude[static_cast<std::size_t>(i)]);
    const double x = f.grid.x(i);
    m += w;
    mx += w * x;
    mxx += w * x * x;
  }
  const double mean = mx / m;
  return 2.0 * std::sqrt(mxx / m - mean * mean);
}

double rel_l2(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

} // namespace

TEST_CASE("quadratic phase factor basics") {
  CHECK(gaussian_phase(3.7, 0.0) == cplx(1.0, 0.0));
  const cplx i_unit = gaussian_phase(1.0, pi);
  CHECK(i_unit.real() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(i_unit.imag() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("quadratic phase identities on random inputs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ua(-5.0, 5.0), ub(-20.0, 20.0);
  for (int k = 0; k < 1000; ++k) {
    const double a2 = ua(rng) * ua(rng);
    const double b = ub(rng), b2 = ub(rng);
    // conjugation
    CHECK(std::abs(gaussian_phase(a2, b) * gaussian_phase(a2, -b) - 1.0) < 1e-12);
    CHECK(std::abs(std::conj(gaussian_phase(a2, b)) - gaussian_phase(a2, -b)) < 1e-12);
    // additivity in the curvature
    CHECK(std::abs(gaussian_phase(a2, b + b2) - gaussian_phase(a2, b) * gaussian_phase(a2, b2)) <
          1e-12);
    // cross-term product rule on 2-D vectors
    const double x1 = ua(rng), y1 = ua(rng), x2 = ua(rng), y2 = ua(rng);
    const double s2 = (x1 + x2) * (x1 + x2) + (y1 + y2) * (y1 + y2);
    const cplx lhs = gaussian_phase(s2, b);
    const cplx rhs = gaussian_phase(x1 * x1 + y1 * y1, b) *
                     gaussian_phase(x2 * x2 + y2 * y2, b) *
                     std::polar(1.0, b * (x1 * x2 + y1 * y2));
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("Fourier transform of the phase factor against adaptive quadrature") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ub(5.0, 80.0), ug(-10.0, 10.0);
  for (int k = 0; k < 50; ++k) {
    const double beta = ub(rng);
    const double gx = ug(rng), gy = ug(rng);
    // 1-D line: int G e^{i g a} da = sqrt(i 2 pi / beta) G(g, -1/beta)
    const cplx lhs = oracles::fresnel_line_integral(beta, gx);
    const cplx rhs = std::sqrt(2.0 * pi / beta) * std::polar(1.0, pi / 4.0) *
                     gaussian_phase(gx * gx, -1.0 / beta);
    CHECK(std::abs(lhs - rhs) / std::abs(rhs) < 1e-4);
    // 2-D product form carries the full i 2 pi / beta prefactor
    const cplx lhs2 = oracles::fresnel_line_integral(beta, gx) *
                      oracles::fresnel_line_integral(beta, gy);
    const cplx rhs2 = cplx(0.0, 1.0) * (2.0 * pi / beta) *
                      gaussian_phase(gx * gx + gy * gy, -1.0 / beta);
    CHECK(std::abs(lhs2 - rhs2) / std::abs(rhs2) < 2e-4);
  }
}

TEST_CASE("plane wave propagates with unit magnitude and advanced phase") {
  // edge diffraction rings at ~1/(pi u) with u the edge distance in Fresnel
  // units, so the interior window keeps u > 45
  const TransverseGrid g = TransverseGrid::line(16384, 2.0 * units::um);
  SampledField f(g, lambda0);
  for (auto& a : f.amplitude) a = 1.0;
  const double z = 0.1;
  const SampledField out = fresnel::free_propagate(f, z, g);
  const double phase = f.omega() * z / speed_of_light;
  const cplx expect = std::polar(1.0, phase);
  for (int i = 0; i < g.nx; ++i) {
    if (std::abs(g.x(i)) > 2.0 * units::mm) continue;
    const cplx a = out.amplitude[static_cast<std::size_t>(i)];
    CHECK(std::abs(std::abs(a) - 1.0) < 1e-2);
    CHECK(std::abs(a - expect) < 3e-2);
  }
  CHECK(out.axial_position == doctest::Approx(z));
  CHECK(out.wavelength == f.wavelength);
}

TEST_CASE("Gaussian beam waist follows the analytic law") {
  const double w0 = 0.2 * units::mm;
  const double zr = pi * w0 * w0 / lambda0;
  const TransverseGrid g = TransverseGrid::line(2048, 5.5 * units::um);
  for (double frac : {0.5, 1.0, 2.0}) {
    const double z = frac * zr;
    const SampledField out = fresnel::free_propagate(gaussian_input(g, w0, lambda0), z, g);
    const double expect = w0 * std::sqrt(1.0 + (z / zr) * (z / zr));
    CHECK(fitted_waist(out) == doctest::Approx(expect).epsilon(0.01));
  }
}

TEST_CASE("two-step propagation cascades into one step") {
  const TransverseGrid g = TransverseGrid::line(2048, 5.5 * units::um);
  const SampledField in = gaussian_input(g, 1.0 * units::mm, lambda0);
  const SampledField two = fresnel::free_propagate(fresnel::free_propagate(in, 0.1, g), 0.2, g);
  const SampledField one = fresnel::free_propagate(in, 0.3, g);
  CHECK(rel_l2(two.amplitude, one.amplitude) < 1e-3);
}

TEST_CASE("cascade consistency holds in 2-D as well") {
  const TransverseGrid g = TransverseGrid::plane(256, 256, 30.0 * units::um);
  SampledField in(g, lambda0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double r2 = g.x(i) * g.x(i) + g.y(j) * g.y(j);
      in.at(i, j) = std::exp(-r2 / (1.2e-3 * 1.2e-3));
    }
  const SampledField two = fresnel::free_propagate(fresnel::free_propagate(in, 0.4, g), 0.5, g);
  const SampledField one = fresnel::free_propagate(in, 0.9, g);
  CHECK(rel_l2(two.amplitude, one.amplitude) < 1e-3);
}

TEST_CASE("propagation and elements are linear in the amplitude") {
  const TransverseGrid g = TransverseGrid::line(256, 20.0 * units::um);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SampledField a(g, lambda0), b(g, lambda0);
  for (int i = 0; i < g.nx; ++i) {
    a.amplitude[static_cast<std::size_t>(i)] = cplx(u(rng), u(rng));
    b.amplitude[static_cast<std::size_t>(i)] = cplx(u(rng), u(rng));
  }
  SampledField sum = a;
  for (std::size_t i = 0; i < sum.amplitude.size(); ++i) sum.amplitude[i] += b.amplitude[i];

  const double z = 0.8;
  const SampledField pa = fresnel::free_propagate(a, z, g);
  const SampledField pb = fresnel::free_propagate(b, z, g);
  const SampledField ps = fresnel::free_propagate(sum, z, g);
  for (std::size_t i = 0; i < ps.amplitude.size(); ++i)
    CHECK(std::abs(ps.amplitude[i] - (pa.amplitude[i] + pb.amplitude[i])) < 1e-12);

  const fresnel::OpticalElement lens = fresnel::ThinLens{0.5, 1e-3};
  const SampledField la = fresnel::apply_element(a, lens);
  const SampledField lb = fresnel::apply_element(b, lens);
  const SampledField ls = fresnel::apply_element(sum, lens);
  for (std::size_t i = 0; i < ls.amplitude.size(); ++i)
    CHECK(std::abs(ls.amplitude[i] - (la.amplitude[i] + lb.amplitude[i])) < 1e-12);
}

TEST_CASE("free kernel matrix is reciprocal on a shared grid") {
  const TransverseGrid g = TransverseGrid::line(64, 30.0 * units::um);
  const CMatrix k = fresnel::axis_kernel(g, g, angular_frequency(lambda0), 1.0, 0, true);
  for (std::size_t r = 0; r < k.rows(); ++r)
    for (std::size_t c = 0; c < r; ++c) CHECK(std::abs(k(r, c) - k(c, r)) < 1e-15);
}

TEST_CASE("apertures and bounded lenses never add energy") {
  const TransverseGrid g = TransverseGrid::line(128, 25.0 * units::um);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0), ut(0.0, 1.0);
  SampledField f(g, lambda0);
  for (auto& a : f.amplitude) a = cplx(u(rng), u(rng));
  fresnel::AmplitudeMask mask;
  mask.grid = g;
  mask.transmission.resize(g.count());
  for (auto& t : mask.transmission) t = std::polar(ut(rng), u(rng));
  const double before = field_energy(f);
  CHECK(field_energy(fresnel::apply_element(f, fresnel::Aperture{mask})) <= before + 1e-12);
  CHECK(field_energy(fresnel::apply_element(f, fresnel::ThinLens{0.4, 0.8 * units::mm})) <=
        before + 1e-12);
  // an unbounded lens is a pure phase: energy preserved
  CHECK(field_energy(fresnel::apply_element(f, fresnel::ThinLens{0.4})) ==
        doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("an all-ones aperture leaves the field bitwise unchanged") {
  const TransverseGrid g = TransverseGrid::line(64, 10.0 * units::um);
  SampledField f(g, lambda0);
  for (int i = 0; i < g.nx; ++i)
    f.amplitude[static_cast<std::size_t>(i)] = cplx(std::sin(0.1 * i), std::cos(0.2 * i));
  fresnel::AmplitudeMask ones;
  ones.grid = g;
  ones.transmission.assign(g.count(), cplx(1.0, 0.0));
  const SampledField out = fresnel::apply_element(f, fresnel::Aperture{ones});
  for (std::size_t i = 0; i < f.amplitude.size(); ++i)
    CHECK(out.amplitude[i] == f.amplitude[i]);
}

TEST_CASE("a lens focuses a plane wave to an on-axis spot") {
  const TransverseGrid g = TransverseGrid::line(1024, 8.0 * units::um);
  SampledField f(g, lambda0);
  for (auto& a : f.amplitude) a = 1.0;
  const double focal = 0.5;
  const SampledField focused =
      fresnel::free_propagate(fresnel::apply_element(f, fresnel::ThinLens{focal}), focal, g);
  std::size_t imax = 0;
  double vmax = 0.0;
  for (std::size_t i = 0; i < focused.amplitude.size(); ++i)
    if (std::abs(focused.amplitude[i]) > vmax) {
      vmax = std::abs(focused.amplitude[i]);
      imax = i;
    }
  CHECK(imax == static_cast<std::size_t>(g.nx / 2));
  CHECK(vmax > 10.0 * std::abs(focused.amplitude[10]));
}

TEST_CASE("single slit produces the Fraunhofer first zero") {
  // 0.16 mm slit, 500 mm flight: zeros at +/- lambda d / a
  const double slit = 0.16 * units::mm;
  const double dist = 0.5;
  const TransverseGrid in = TransverseGrid::line(1024, 1.2 * units::um);
  const TransverseGrid out = TransverseGrid::line(2048, 6.0 * units::um);
  SampledField f(in, lambda0);
  for (int i = 0; i < in.nx; ++i)
    f.amplitude[static_cast<std::size_t>(i)] = std::abs(in.x(i)) <= 0.5 * slit ? 1.0 : 0.0;
  const SampledField far = fresnel::free_propagate(f, dist, out);
  std::vector<double> axis(static_cast<std::size_t>(out.nx)), inten(axis.size());
  for (int i = 0; i < out.nx; ++i) {
    axis[static_cast<std::size_t>(i)] = out.x(i);
    inten[static_cast<std::size_t>(i)] = std::norm(far.amplitude[static_cast<std::size_t>(i)]);
  }
  const double zero = analysis::first_minimum_after(axis, inten, 0.5 * out.spacing);
  CHECK(std::abs(zero - lambda0 * dist / slit) <= out.spacing);
}

TEST_CASE("point source response through a single hop is the bare kernel") {
  const TransverseGrid src = TransverseGrid::line(64, 50.0 * units::um);
  const TransverseGrid obs = TransverseGrid::line(128, 80.0 * units::um);
  const double z = 2.0;
  OpticalArm arm;
  arm.free_space(z);
  const SampledField resp = fresnel::point_source_response(arm, 0.0, 0.0, lambda0, src, obs);
  const double omega = angular_frequency(lambda0);
  const cplx pref = fresnel::free_prefactor(omega, z, 1) * std::polar(1.0, omega * z / speed_of_light);
  for (int i = 0; i < obs.nx; ++i) {
    const cplx expect = pref * gaussian_phase(obs.x(i) * obs.x(i), omega / (speed_of_light * z));
    CHECK(std::abs(resp.amplitude[static_cast<std::size_t>(i)] - expect) < 1e-6 * std::abs(pref));
  }
}

TEST_CASE("imaging arm maps a point to its conjugate point") {
  // 1/600 + 1/1200 = 1/400 (mm), magnification 2, inverted
  const double so = 0.6, si = 1.2, f = 0.4;
  const TransverseGrid src = TransverseGrid::line(192, 12.0 * units::um);
  const TransverseGrid lens_plane = TransverseGrid::line(3072, 6.5 * units::um);
  const TransverseGrid obs = TransverseGrid::line(256, 25.0 * units::um);
  OpticalArm arm;
  arm.free_space(so, lens_plane).thin_lens(f).free_space(si);
  const double x0 = 0.6 * units::mm;
  const SampledField resp = fresnel::point_source_response(arm, x0, 0.0, lambda0, src, obs);
  std::size_t imax = 0;
  double vmax = 0.0;
  for (std::size_t i = 0; i < resp.amplitude.size(); ++i)
    if (std::abs(resp.amplitude[i]) > vmax) {
      vmax = std::abs(resp.amplitude[i]);
      imax = i;
    }
  CHECK(std::abs(obs.x(static_cast<int>(imax)) - (-(si / so) * x0)) <= obs.spacing);

  SUBCASE("a displaced scan plane broadens the spot") {
    OpticalArm blur;
    blur.free_space(so, lens_plane).thin_lens(f).free_space(1.25 * si);
    const SampledField out = fresnel::point_source_response(blur, x0, 0.0, lambda0, src, obs);
    std::vector<double> axis(static_cast<std::size_t>(obs.nx)), focus_i(axis.size()), blur_i(axis.size());
    for (int i = 0; i < obs.nx; ++i) {
      axis[static_cast<std::size_t>(i)] = obs.x(i);
      focus_i[static_cast<std::size_t>(i)] = std::norm(resp.amplitude[static_cast<std::size_t>(i)]);
      blur_i[static_cast<std::size_t>(i)] = std::norm(out.amplitude[static_cast<std::size_t>(i)]);
    }
    CHECK(analysis::fwhm(axis, blur_i) > analysis::fwhm(axis, focus_i));
  }
}

TEST_CASE("aliased kernels are rejected with the admissible spacing named") {
  const TransverseGrid g = TransverseGrid::line(256, 50.0 * units::um);
  SampledField f(g, lambda0);
  for (auto& a : f.amplitude) a = 1.0;
  CHECK_THROWS_AS(fresnel::free_propagate(f, 0.01, g), SamplingViolation);
  try {
    fresnel::free_propagate(f, 0.01, g);
  } catch (const SamplingViolation& e) {
    CHECK(std::string(e.what()).find("spacing") != std::string::npos);
  }
  CHECK_THROWS_AS(fresnel::free_propagate(f, -1.0, g), InvalidDistance);
  CHECK_THROWS_AS(fresnel::free_propagate(f, 0.0, g), InvalidDistance);
}

TEST_CASE("aperture masks must cover the field grid") {
  const TransverseGrid g = TransverseGrid::line(128, 20.0 * units::um);
  SampledField f(g, lambda0);
  for (auto& a : f.amplitude) a = 1.0;
  fresnel::AmplitudeMask small;
  small.grid = TransverseGrid::line(16, 20.0 * units::um);
  small.transmission.assign(16, cplx(1.0, 0.0));
  CHECK_THROWS_AS(fresnel::apply_element(f, fresnel::Aperture{small}), GridMismatch);
}

TEST_CASE("point sources must sit inside the declared source extent") {
  const TransverseGrid src = TransverseGrid::line(64, 10.0 * units::um);
  OpticalArm arm;
  arm.free_space(1.0);
  CHECK_THROWS_AS(
      fresnel::point_source_response(arm, 5.0 * units::mm, 0.0, lambda0, src, src),
      GeometryError);
  OpticalArm lens_first;
  lens_first.thin_lens(0.4);
  CHECK_THROWS_AS(fresnel::point_source_response(lens_first, 0.0, 0.0, lambda0, src, src),
                  GeometryError);
}

TEST_CASE("arm bookkeeping") {
  OpticalArm arm;
  arm.free_space(0.25).thin_lens(0.4).free_space(0.75);
  CHECK(arm.total_axial_length() == doctest::Approx(1.0));
  CHECK(arm.separable());
  arm.thin_lens(0.4, 5.0 * units::mm);
  CHECK_FALSE(arm.separable());
  CHECK_THROWS_AS(OpticalArm().free_space(-0.1), InvalidDistance);
  CHECK_THROWS_AS(OpticalArm().thin_lens(0.0), Error);
}
