#include "biphoton/scenarios.hpp"

#include <algorithm>
#include <cmath>

#include "biphoton/analysis.hpp"
#include "biphoton/epr.hpp"
#include "biphoton/parallel.hpp"
#include "biphoton/special.hpp"
#include "biphoton/units.hpp"

namespace biphoton::scenarios {

namespace {

using fresnel::AmplitudeMask;
using fresnel::OpticalArm;

double get(const json& p, const std::string& key) {
  if (!p.contains(key)) throw ConfigError("missing parameter: " + key);
  if (!p[key].is_number()) throw ConfigError("parameter must be numeric: " + key);
  return p[key].get<double>();
}

std::string get_str(const json& p, const std::string& key) {
  if (!p.contains(key)) throw ConfigError("missing parameter: " + key);
  return p[key].get<std::string>();
}

// Grid preset handling: "coarse" halves, "fine" doubles the base sample
// count; "N:spacing_um" pins the scan grid exactly.
struct GridSpec {
  int n = 0;
  double spacing = 0.0; // meters; 0 = derive from extent
  double scale = 1.0;
};

GridSpec parse_grid(const json& p) {
  GridSpec g;
  const std::string s = p.contains("grid") ? p["grid"].get<std::string>() : "standard";
  if (s == "standard") return g;
  if (s == "coarse") {
    g.scale = 0.5;
    return g;
  }
  if (s == "fine") {
    g.scale = 2.0;
    return g;
  }
  const auto colon = s.find(':');
  if (colon == std::string::npos)
    throw ConfigError("grid must be coarse|standard|fine or N:spacing_um, got " + s);
  try {
    g.n = std::stoi(s.substr(0, colon));
    g.spacing = std::stod(s.substr(colon + 1)) * units::um;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    throw ConfigError("bad grid spec: " + s);
  }
  if (g.n < 2 || !(g.spacing > 0.0)) throw ConfigError("bad grid spec: " + s);
  return g;
}

// Scan line with a target half-extent: explicit spec wins, else the base
// sample count scaled by the preset.
TransverseGrid scan_line(const GridSpec& spec, int base_n, double half_extent) {
  if (spec.n > 0) return TransverseGrid::line(spec.n, spec.spacing);
  const int n = std::max(16, static_cast<int>(std::lround(base_n * spec.scale)));
  return TransverseGrid::line(n, 2.0 * half_extent / n);
}

void require_thin_lens(double so, double si, double f) {
  if (std::abs(1.0 / so + 1.0 / si - 1.0 / f) > 1e-9 / f)
    throw GeometryError("thin-lens equation violated: 1/s_o + 1/s_i != 1/f");
}

// Fraction of cell i covered by [center - width/2, center + width/2].
double cell_coverage(const TransverseGrid& g, int i, double center, double width) {
  const double lo = std::max(g.x(i) - 0.5 * g.spacing, center - 0.5 * width);
  const double hi = std::min(g.x(i) + 0.5 * g.spacing, center + 0.5 * width);
  return std::max(0.0, hi - lo) / g.spacing;
}

// Slit transmission with fractionally covered edge cells.  Coherent
// apertures want the amplitude to carry the coverage; bucket masks are
// weighted by |A|^2, so there the coverage goes under a square root.
enum class EdgeWeight { amplitude, intensity };

std::vector<cplx> slit_mask_values(const TransverseGrid& g, double width, double center = 0.0,
                                   EdgeWeight edge = EdgeWeight::amplitude) {
  std::vector<cplx> t(g.count(), cplx(0.0, 0.0));
  for (int i = 0; i < g.nx; ++i) {
    const double cov = cell_coverage(g, i, center, width);
    t[static_cast<std::size_t>(i)] = edge == EdgeWeight::amplitude ? cov : std::sqrt(cov);
  }
  return t;
}

std::vector<cplx> double_slit_values(const TransverseGrid& g, double separation, double width) {
  std::vector<cplx> t(g.count(), cplx(0.0, 0.0));
  for (int i = 0; i < g.nx; ++i) {
    const double cov = cell_coverage(g, i, 0.5 * separation, width) +
                       cell_coverage(g, i, -0.5 * separation, width);
    t[static_cast<std::size_t>(i)] = std::min(1.0, cov);
  }
  return t;
}

CorrelationMap profile_map(const TransverseGrid& scan, std::vector<double> values,
                           CorrelationMap::Mode mode) {
  CorrelationMap map;
  map.mode = mode;
  map.axis_a.resize(static_cast<std::size_t>(scan.nx));
  for (int i = 0; i < scan.nx; ++i) map.axis_a[static_cast<std::size_t>(i)] = scan.x(i);
  map.values = std::move(values);
  map.normalize_peak();
  return map;
}

spdc::SpectralAmplitude spectrum_from(const json& p) {
  const std::string kind = p.contains("spectrum") ? p["spectrum"].get<std::string>() : "sinc2";
  if (kind == "flat") return spdc::Flat{get(p, "flat_cutoff_rad_per_ps") / units::ps};
  if (kind == "gaussian") return spdc::Gaussian{get(p, "gaussian_sigma_rad_per_ps") / units::ps};
  if (kind == "sinc2") {
    spdc::CrystalParams c;
    c.length = get(p, "crystal_length_mm") * units::mm;
    c.group_delay_mismatch = get(p, "D_fs_per_mm") * units::fs_per_mm;
    return spdc::SincTypeII{c};
  }
  if (kind == "sinc1") {
    spdc::CrystalParams c;
    c.length = get(p, "crystal_length_mm") * units::mm;
    c.group_velocity_dispersion = get(p, "Dprime_fs2_per_mm") * units::fs2_per_mm;
    return spdc::SincTypeI{c};
  }
  throw ConfigError("unknown spectrum kind: " + kind);
}

std::vector<double> tau_axis(double half_span, int n) {
  std::vector<double> tau(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    tau[static_cast<std::size_t>(i)] = -half_span + 2.0 * half_span * i / (n - 1);
  return tau;
}

double default_tau_half(const spdc::SpectralAmplitude& s) {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, spdc::Flat>) return 6.0 * pi / v.cutoff;
        else if constexpr (std::is_same_v<T, spdc::Gaussian>) return 6.0 / v.sigma;
        else if constexpr (std::is_same_v<T, spdc::SincTypeII>) return 1.5 * std::abs(v.crystal.dl());
        else return 40.0 * std::sqrt(std::abs(v.crystal.dpl()));
      },
      s);
}

} // namespace

io::Bitmap builtin_letters() {
  // Two block letters on a 28 x 56 canvas (0.125 mm cells -> 3.5 x 7 mm).
  io::Bitmap bm;
  bm.width = 28;
  bm.height = 56;
  bm.transmission.assign(28 * 56, 0.0);
  auto fill = [&bm](int x0, int x1, int y0, int y1) {
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) bm.transmission[static_cast<std::size_t>(y) * 28 + x] = 1.0;
  };
  // "A": top bar, two legs, crossbar (rows 0..27)
  fill(0, 27, 0, 3);
  fill(0, 3, 4, 27);
  fill(24, 27, 4, 27);
  fill(6, 21, 13, 16);
  // "B": spine, three bars, two right bellies (rows 28..55)
  fill(0, 3, 28, 55);
  fill(4, 25, 28, 31);
  fill(4, 25, 40, 43);
  fill(4, 27, 52, 55);
  fill(22, 27, 32, 39);
  fill(24, 27, 44, 51);
  return bm;
}

namespace {

// Object mask on its own pixel grid; bitmap row 0 maps to the top (+y).
AmplitudeMask mask_from_bitmap(const io::Bitmap& bm, double width, double height) {
  const double sx = width / bm.width;
  const double sy = height / bm.height;
  if (std::abs(sx - sy) > 1e-9 * sx)
    throw ConfigError("object bitmap pixels must be square (width/height vs pixel counts)");
  AmplitudeMask mask;
  mask.grid = TransverseGrid::plane(bm.width, bm.height, sx);
  mask.transmission.resize(mask.grid.count());
  for (int y = 0; y < bm.height; ++y)
    for (int x = 0; x < bm.width; ++x)
      mask.transmission[static_cast<std::size_t>(bm.height - 1 - y) * bm.width + x] =
          bm.at(x, y);
  return mask;
}

} // namespace

double subsystem_entropy(const std::vector<double>& weights) {
  if (weights.empty()) throw AllZeroSpectrum("entropy needs at least one weight");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w)) throw AllZeroSpectrum("weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw AllZeroSpectrum("all spectrum weights are zero");
  double s = 0.0;
  for (double w : weights) {
    if (w == 0.0) continue; // 0 ln 0 := 0
    const double pk = w / total;
    s -= pk * std::log(pk);
  }
  return s;
}

// ---------------------------------------------------------------------------
// classical-image
// ---------------------------------------------------------------------------

ScenarioResult classical_image(const json& p) {
  const std::string mode = get_str(p, "mode");
  if (mode != "incoherent" && mode != "coherent")
    throw ConfigError("mode must be incoherent or coherent");
  const double so = get(p, "so_mm") * units::mm;
  const double si = get(p, "si_mm") * units::mm;
  const double f = get(p, "f_mm") * units::mm;
  const double radius = get(p, "lens_radius_mm") * units::mm;
  const double lambda = get(p, "lambda_nm") * units::nm;
  require_thin_lens(so, si, f);
  const double m = si / so;
  const double omega = angular_frequency(lambda);
  const double na_k = (radius / so) * (omega / speed_of_light);

  // object sample points along the axis with weights
  const std::string object = get_str(p, "object");
  const double shift = get(p, "object_shift_mm") * units::mm;
  std::vector<std::pair<double, double>> pts; // (position, weight)
  double obj_half = std::abs(shift);
  if (object == "point") {
    pts = {{shift, 1.0}};
  } else if (object == "two-point") {
    const double sep = get(p, "separation_mm") * units::mm;
    pts = {{shift - 0.5 * sep, 1.0}, {shift + 0.5 * sep, 1.0}};
    obj_half += 0.5 * sep;
  } else if (object == "uniform") {
    const double w = get(p, "object_width_mm") * units::mm;
    const int nsub = 256;
    for (int k = 0; k < nsub; ++k)
      pts.push_back({shift - 0.5 * w + (k + 0.5) * w / nsub, w / nsub});
    obj_half += 0.5 * w;
  } else {
    throw ConfigError("object must be point, two-point or uniform");
  }

  const double psf_zero = 3.8317059702075123 * std::abs(m) / na_k;
  const double half_scan = 4.0 * psf_zero + std::abs(m) * obj_half;
  const TransverseGrid scan = scan_line(parse_grid(p), 2048, half_scan);

  std::vector<double> vals(static_cast<std::size_t>(scan.nx), 0.0);
  for (int i = 0; i < scan.nx; ++i) {
    const double xi = scan.x(i);
    if (mode == "incoherent") {
      double s = 0.0;
      for (const auto& [xo, w] : pts) {
        const double psf = somb(na_k * std::abs(xo + xi / m));
        s += w * psf * psf;
      }
      vals[static_cast<std::size_t>(i)] = s;
    } else {
      cplx s(0.0, 0.0);
      for (const auto& [xo, w] : pts)
        s += w * fresnel::gaussian_phase(xo * xo, omega / (speed_of_light * so)) *
             somb(na_k * std::abs(xo + xi / m));
      vals[static_cast<std::size_t>(i)] = std::norm(s);
    }
  }

  ScenarioResult r;
  r.name = "classical-image";
  r.params = p;
  r.primary = profile_map(scan, std::move(vals), CorrelationMap::Mode::coincident);
  r.primary.geometry["magnification"] = m;
  r.summary["magnification"] = m;
  r.summary["psf_first_zero_mm"] = psf_zero / units::mm;
  r.summary["peak_mm"] = analysis::peak_position(r.primary.axis_a, r.primary.values) / units::mm;
  r.summary["fwhm_mm"] = analysis::fwhm(r.primary.axis_a, r.primary.values) / units::mm;
  return r;
}

// ---------------------------------------------------------------------------
// lithography-fourier
// ---------------------------------------------------------------------------

namespace {

// Shared chain for the lithography Fourier-plane runs: object at the source,
// lens at s_o, detection on the focal plane.
struct FourierBench {
  TransverseGrid source;
  TransverseGrid lens_plane;
  TransverseGrid scan;
  OpticalArm arm;
};

FourierBench make_fourier_bench(double separation, double width, double so, double f,
                                double lambda, const GridSpec& spec) {
  FourierBench b;
  const double src_half = 0.5 * separation + 1.5 * width;
  b.source = TransverseGrid::line(512, 2.0 * src_half / 512);
  const double lens_half = 1.3 * lambda * so / width;
  const double period = lambda * f / separation;
  b.scan = scan_line(spec, 1201, 4.5 * period);
  // quadrature step bounded by the aliasing rule on both hops
  const double scan_half = 0.5 * b.scan.extent_x();
  const double h1 = lambda * so / (2.0 * lens_half) * 0.9;
  const double h2 = lambda * f / (2.0 * std::max(lens_half, scan_half)) * 0.9;
  const double hl = std::min(h1, h2);
  int nl = static_cast<int>(std::ceil(2.0 * lens_half / hl));
  nl = std::max(nl, 512);
  b.lens_plane = TransverseGrid::line(nl, 2.0 * lens_half / nl);
  b.arm.free_space(so, b.lens_plane).thin_lens(f).free_space(f);
  return b;
}

} // namespace

ScenarioResult lithography_fourier(const json& p) {
  const double separation = get(p, "slit_separation_mm") * units::mm;
  const double width = get(p, "slit_width_mm") * units::mm;
  const double f = get(p, "f_mm") * units::mm;
  const double so = get(p, "so_mm") * units::mm;
  const double lambda = get(p, "lambda_nm") * units::nm;
  if (!(separation > width)) throw ConfigError("slit separation must exceed slit width");

  const FourierBench b = make_fourier_bench(separation, width, so, f, lambda, parse_grid(p));

  // classical run: coherent field through the same chain
  SampledField field(b.source, lambda);
  field.amplitude = double_slit_values(b.source, separation, width);
  const SampledField focal = fresnel::propagate_arm(b.arm, std::move(field), b.scan);
  std::vector<double> classical(static_cast<std::size_t>(b.scan.nx));
  for (int i = 0; i < b.scan.nx; ++i)
    classical[static_cast<std::size_t>(i)] = std::norm(focal.amplitude[static_cast<std::size_t>(i)]);
  const double cpk = *std::max_element(classical.begin(), classical.end());
  if (cpk > 0.0)
    for (double& v : classical) v /= cpk;

  // two-photon run: both photons leave the same slit together
  BiphotonSetup setup;
  setup.spdc = spdc::SpdcConfig::degenerate(lambda, spdc::Flat{1e12});
  setup.source_grid = b.source;
  setup.source_mask = double_slit_values(b.source, separation, width);
  setup.arm_signal = b.arm;
  setup.arm_idler = b.arm;
  setup.wavelength_signal = lambda;
  setup.wavelength_idler = lambda;
  CorrelationMap two_photon = coincident_g2(setup, b.scan);

  ScenarioResult r;
  r.name = "lithography-fourier";
  r.params = p;
  r.primary = std::move(two_photon);
  r.extra_columns.push_back({"classical", std::move(classical)});

  const double period2 = analysis::fringe_period(r.primary.axis_a, r.primary.values);
  const double period1 = analysis::fringe_period(r.primary.axis_a, r.extra_columns[0].second);
  r.summary["classical_period_mm"] = period1 / units::mm;
  r.summary["two_photon_period_mm"] = period2 / units::mm;
  r.summary["period_ratio"] = period2 / period1;
  r.summary["classical_period_analytic_mm"] = lambda * f / separation / units::mm;
  return r;
}

// ---------------------------------------------------------------------------
// lithography-image
// ---------------------------------------------------------------------------

ScenarioResult lithography_image(const json& p) {
  const double separation = get(p, "slit_separation_mm") * units::mm;
  const double width = get(p, "slit_width_mm") * units::mm;
  const double so = get(p, "so_mm") * units::mm;
  const double si = get(p, "si_mm") * units::mm;
  const double f = get(p, "f_mm") * units::mm;
  const double radius = get(p, "lens_radius_mm") * units::mm;
  const double lambda = get(p, "lambda_nm") * units::nm;
  const double dl = get(p, "DL_fs") * units::fs;
  require_thin_lens(so, si, f);
  const double m = si / so;
  const double omega = angular_frequency(lambda);
  const double omega_p = 2.0 * omega;

  const double zero_classical = 3.8317059702075123 * std::abs(m) * speed_of_light * so /
                                (omega * radius);
  const double half_scan = std::abs(m) * (0.5 * separation + width) + 3.0 * zero_classical;
  const TransverseGrid scan = scan_line(parse_grid(p), 2048, half_scan);

  // image profiles: the pair diffracts at the pump frequency, so the
  // two-photon point-spread argument carries omega_p
  const TransverseGrid obj = TransverseGrid::line(512, (separation + 2.0 * width) / 512);
  const std::vector<cplx> a = double_slit_values(obj, separation, width);
  auto image_profile = [&](double w, auto psf) {
    std::vector<double> out(static_cast<std::size_t>(scan.nx));
    const double nak = (radius / so) * (w / speed_of_light);
    for (int i = 0; i < scan.nx; ++i) {
      cplx s(0.0, 0.0);
      for (int o = 0; o < obj.nx; ++o) {
        const cplx ao = a[static_cast<std::size_t>(o)]; // binary: A^2 == A
        if (ao == cplx(0.0, 0.0)) continue;
        const double xo = obj.x(o);
        s += ao * fresnel::gaussian_phase(xo * xo, w / (speed_of_light * so)) *
             psf(nak * std::abs(xo + scan.x(i) / m)) * obj.spacing;
      }
      out[static_cast<std::size_t>(i)] = std::norm(s);
    }
    const double pk = *std::max_element(out.begin(), out.end());
    if (pk > 0.0)
      for (double& v : out) v /= pk;
    return out;
  };
  auto psf_two_photon = [](double x) { return x < 1e-9 ? 1e9 : 2.0 * bessel_j1(x) / (x * x); };
  auto psf_classical = [](double x) { return somb(x); };
  std::vector<double> img2 = image_profile(omega_p, psf_two_photon);
  std::vector<double> img1 = image_profile(omega, psf_classical);

  // point-spread profiles for the resolution summary
  std::vector<double> xs(static_cast<std::size_t>(scan.nx));
  std::vector<double> psf2v(static_cast<std::size_t>(scan.nx)), psf1v(static_cast<std::size_t>(scan.nx));
  for (int i = 0; i < scan.nx; ++i) {
    xs[static_cast<std::size_t>(i)] = scan.x(i);
    const double x2 = (radius / so) * (omega_p / speed_of_light) * std::abs(scan.x(i) / m);
    const double x1 = (radius / so) * (omega / speed_of_light) * std::abs(scan.x(i) / m);
    psf2v[static_cast<std::size_t>(i)] = std::norm(psf_two_photon(std::max(x2, 1e-9)));
    psf1v[static_cast<std::size_t>(i)] = std::norm(psf_classical(x1));
  }
  const double z2 = analysis::first_minimum_after(xs, psf2v, 0.25 * scan.spacing);
  const double z1 = analysis::first_minimum_after(xs, psf1v, 0.25 * scan.spacing);

  // machinery cross-check: the SPDC bandwidth does not blur the two-photon
  // image (coincident point response, broadband vs monochromatic)
  spdc::CrystalParams crystal;
  crystal.length = 3.0 * units::mm;
  crystal.group_delay_mismatch = dl / crystal.length;
  BiphotonSetup bench;
  bench.spdc = spdc::SpdcConfig::degenerate(lambda, spdc::SincTypeII{crystal}, crystal);
  bench.source_grid = TransverseGrid::line(4, 2.0 * units::um);
  bench.source_mask = slit_mask_values(bench.source_grid, 3.0 * units::um);
  bench.wavelength_signal = lambda;
  bench.wavelength_idler = lambda;
  const double lens_half = std::min(1.2 * radius, 16.0 * units::mm);
  const double hl = lambda * so / (2.0 * lens_half) / 2.2;
  const int nl = std::max(512, static_cast<int>(std::ceil(2.0 * lens_half / hl)));
  const TransverseGrid lens_plane = TransverseGrid::line(nl, 2.0 * lens_half / nl);
  bench.arm_signal = OpticalArm()
                         .free_space(so, lens_plane)
                         .thin_lens(f, radius)
                         .free_space(si);
  bench.arm_idler = bench.arm_signal;
  const TransverseGrid psf_scan = TransverseGrid::line(481, 2.0 * zero_classical / 481);
  CorrelationMap mono = coincident_g2(bench, psf_scan);
  bench.spectral_nodes = 96;
  bench.spectral_half_width = std::min(12.0 * 2.0 * pi / dl, 0.45 * omega);
  CorrelationMap broad = coincident_g2(bench, psf_scan);
  const double w_mono = analysis::fwhm(mono.axis_a, mono.values);
  const double w_broad = analysis::fwhm(broad.axis_a, broad.values);

  ScenarioResult r;
  r.name = "lithography-image";
  r.params = p;
  r.primary = profile_map(scan, std::move(img2), CorrelationMap::Mode::coincident);
  r.extra_columns.push_back({"classical", std::move(img1)});
  r.summary["magnification"] = m;
  r.summary["psf_first_zero_two_photon_mm"] = z2 / units::mm;
  r.summary["psf_first_zero_classical_mm"] = z1 / units::mm;
  r.summary["psf_zero_ratio"] = z2 / z1;
  r.summary["image_peak_mm"] =
      std::abs(analysis::peak_position(r.primary.axis_a, r.primary.values)) / units::mm;
  r.summary["machinery_mono_fwhm_mm"] = w_mono / units::mm;
  r.summary["machinery_broadband_fwhm_mm"] = w_broad / units::mm;
  r.summary["broadband_width_ratio"] = w_broad / w_mono;
  return r;
}

// ---------------------------------------------------------------------------
// ghost-image
// ---------------------------------------------------------------------------

ScenarioResult ghost_image(const json& p) {
  const double d1 = get(p, "d1_mm") * units::mm;
  const double so = get(p, "so_mm") * units::mm;
  const double f = get(p, "f_mm") * units::mm;
  // s_i = d1 + d2 unfolded; an explicit si_mm wins over d2_mm
  const double si_given = get(p, "si_mm") * units::mm;
  const double d2 = si_given > 0.0 ? si_given - d1 : get(p, "d2_mm") * units::mm;
  if (!(d2 > 0.0)) throw GeometryError("idler leg d2 must be positive");
  const double lambda = get(p, "lambda_nm") * units::nm;
  const double factor = get(p, "scan_plane_factor");
  const double obj_w = get(p, "object_width_mm") * units::mm;
  const double obj_h = get(p, "object_height_mm") * units::mm;

  const double si = d1 + d2; // lens -> crystal -> detector, unfolded
  require_thin_lens(so, si, f);
  const double m = si / so;
  const double d2_actual = factor * si - d1;
  if (!(d2_actual > 0.0))
    throw GeometryError("scan plane factor places the detector before the crystal");

  io::Bitmap bm;
  const std::string path = p.contains("object") ? p["object"].get<std::string>() : "";
  bm = path.empty() ? builtin_letters() : io::load_pbm(path);
  const AmplitudeMask object = mask_from_bitmap(bm, obj_w, obj_h);

  // grids: everything separable, sized against kernel aliasing and the
  // source-sum phase step
  const double src_half = get(p, "source_half_mm") * units::mm;
  const double obj_half = 0.55 * std::max(obj_w, obj_h) + 0.3 * units::mm;
  const double scan_half = std::abs(m) * 0.55 * std::max(obj_w, obj_h) + 1.0 * units::mm;

  const GridSpec spec = parse_grid(p);
  const int n_scan = spec.n > 0 ? spec.n : std::max(32, static_cast<int>(std::lround(128 * spec.scale)));
  const double h_scan = spec.n > 0 ? spec.spacing : 2.0 * scan_half / n_scan;
  const TransverseGrid scan = TransverseGrid::plane(n_scan, n_scan, h_scan);
  const TransverseGrid obj_plane = TransverseGrid::plane(128, 128, 2.0 * obj_half / 128);

  // the crystal acts as the pupil; keep the lens window wide enough that its
  // source image is never clipped for any scan point
  const double pupil_ratio = d1 / (d1 + d2_actual);
  if (!(pupil_ratio < 0.9))
    throw GeometryError("crystal sits too close to the scan plane; shrink d1");
  const double lens_half =
      (src_half + scan_half * pupil_ratio) / (1.0 - pupil_ratio) + 1.0 * units::mm;

  const double lambda_over = pi * speed_of_light / angular_frequency(lambda); // lambda/2
  const double sum_slope = (src_half + obj_half) / (d1 + so) + (src_half + scan_half) / d2_actual;
  const double h_src = 0.8 * std::min({lambda * d1 / (2.0 * lens_half),
                                       lambda * d2_actual / (2.0 * std::max(src_half, scan_half)),
                                       2.0 * lambda_over / sum_slope});
  const int n_src =
      std::clamp(static_cast<int>(std::ceil(2.0 * src_half / h_src)), 256, 4096);
  const TransverseGrid source = TransverseGrid::plane(n_src, n_src, 2.0 * src_half / n_src);
  const double h_lens = 0.8 * lambda * so / (2.0 * std::max(lens_half, obj_half));
  const int n_lens = static_cast<int>(std::ceil(2.0 * lens_half / h_lens));
  const TransverseGrid lens_plane = TransverseGrid::plane(n_lens, n_lens, 2.0 * lens_half / n_lens);

  BiphotonSetup setup;
  setup.spdc = spdc::SpdcConfig::degenerate(lambda, spdc::Flat{1e12});
  setup.source_grid = source;
  // Gaussian pump spot: a hard-edged pupil would ring at the scan plane
  setup.apodization = {true, 0.5 * get(p, "pump_diameter_mm") * units::mm};
  setup.arm_signal = OpticalArm().free_space(d1, lens_plane).thin_lens(f).free_space(so);
  setup.arm_idler = OpticalArm().free_space(d2_actual);
  setup.wavelength_signal = lambda;
  setup.wavelength_idler = lambda;

  CorrelationMap rate = bucket_rate(setup, object, obj_plane, scan);
  rate.geometry["magnification_nominal"] = m;
  rate.geometry["scan_plane_factor"] = factor;

  // y-marginals of the rate map and of |A|^2, for the magnification fit
  std::vector<double> img_y(rate.axis_b.size(), 0.0);
  for (std::size_t ib = 0; ib < rate.axis_b.size(); ++ib)
    for (std::size_t ia = 0; ia < rate.axis_a.size(); ++ia)
      img_y[ib] += rate.values[ib * rate.axis_a.size() + ia];
  std::vector<double> obj_axis(static_cast<std::size_t>(object.grid.ny));
  std::vector<double> obj_y(static_cast<std::size_t>(object.grid.ny), 0.0);
  for (int y = 0; y < object.grid.ny; ++y) {
    obj_axis[static_cast<std::size_t>(y)] = object.grid.y(y);
    for (int x = 0; x < object.grid.nx; ++x)
      obj_y[static_cast<std::size_t>(y)] +=
          std::norm(object.transmission[static_cast<std::size_t>(y) * object.grid.nx + x]);
  }
  const analysis::ScaleFit fit = analysis::fit_magnification(
      rate.axis_b, img_y, obj_axis, obj_y, 0.4 * std::abs(m), 2.5 * std::abs(m));

  ScenarioResult r;
  r.name = "ghost-image";
  r.params = p;
  r.primary = std::move(rate);
  const analysis::BBox box = analysis::half_max_bbox(r.primary);
  r.summary["magnification_nominal"] = m;
  r.summary["magnification_fitted"] = fit.magnification;
  r.summary["inverted"] = fit.inverted ? 1.0 : 0.0;
  r.summary["fit_correlation"] = fit.correlation;
  r.summary["image_width_mm"] = (box.width_a + scan.spacing) / units::mm;
  r.summary["image_height_mm"] = (box.width_b + scan.spacing) / units::mm;
  r.summary["gradient_energy"] = analysis::gradient_energy(r.primary);
  return r;
}

// ---------------------------------------------------------------------------
// popper
// ---------------------------------------------------------------------------

ScenarioResult popper_run(const json& p) {
  const double slit_a = get(p, "slit_a_mm") * units::mm;
  const bool slit_b_open = p.contains("slit_b_open") && p["slit_b_open"].get<bool>();
  const double slit_b = slit_b_open ? 0.0 : get(p, "slit_b_mm") * units::mm;
  const double f = get(p, "f_mm") * units::mm;
  const double so = get(p, "so_mm") * units::mm;
  const double b1 = get(p, "b1_mm") * units::mm;
  const double b2 = get(p, "b2_mm") * units::mm;
  const double offset = get(p, "d2_offset_mm") * units::mm;
  const double lambda = get(p, "lambda_nm") * units::nm;
  const double pump_diameter = get(p, "pump_diameter_mm") * units::mm;
  const double lens_radius = get(p, "lens_radius_mm") * units::mm;

  // ghost-image condition for slit A at screen B, unit magnification
  require_thin_lens(so, b1 + b2, f);
  if (std::abs(so - (b1 + b2)) > 1e-9 * so)
    throw GeometryError("Popper geometry wants an equal-size image: s_o = b1 + b2");

  const double waist = 0.5 * pump_diameter; // 1/e^2 intensity diameter

  const TransverseGrid source = TransverseGrid::line(1024, 2.0 * 2.5 * waist / 1024);
  const double lens_half = 6.0 * units::mm;
  const TransverseGrid lens_plane = TransverseGrid::line(2048, 2.0 * lens_half / 2048);
  const TransverseGrid slit_a_plane = TransverseGrid::line(128, 0.8 * units::mm / 128);
  const TransverseGrid scan = scan_line(parse_grid(p), 1201, 6.0 * units::mm);

  BiphotonSetup setup;
  setup.spdc = spdc::SpdcConfig::degenerate(lambda, spdc::Flat{1e12});
  setup.source_grid = source;
  setup.apodization = {true, waist};
  setup.arm_signal =
      OpticalArm().free_space(b1, lens_plane).thin_lens(f, lens_radius).free_space(so);
  setup.wavelength_signal = lambda;
  setup.wavelength_idler = lambda;

  if (slit_b_open) {
    setup.arm_idler = OpticalArm().free_space(b2 + offset);
  } else {
    const TransverseGrid slit_b_plane = TransverseGrid::line(128, 1.0 * units::mm / 128);
    AmplitudeMask mb;
    mb.grid = slit_b_plane;
    mb.transmission = slit_mask_values(slit_b_plane, slit_b);
    setup.arm_idler =
        OpticalArm().free_space(b2, slit_b_plane).aperture(std::move(mb)).free_space(offset);
  }

  AmplitudeMask ma;
  ma.grid = slit_a_plane;
  ma.transmission = slit_mask_values(slit_a_plane, slit_a, 0.0, EdgeWeight::intensity);
  CorrelationMap rate = bucket_rate(setup, ma, slit_a_plane, scan);

  ScenarioResult r;
  r.name = "popper";
  r.params = p;
  r.primary = std::move(rate);
  r.summary["fwhm_mm"] = analysis::fwhm(r.primary.axis_a, r.primary.values) / units::mm;
  if (!slit_b_open)
    r.summary["diffraction_first_zero_analytic_mm"] =
        lambda * offset / slit_b / units::mm;
  return r;
}

// ---------------------------------------------------------------------------
// notch (Fourier spectroscopy of one SPDC photon)
// ---------------------------------------------------------------------------

ScenarioResult fourier_spectroscopy_notch(const json& p) {
  const double dl = get(p, "DL_fs") * units::fs;
  if (!(dl > 0.0)) throw ConfigError("DL must be positive");
  const double lambda = get(p, "lambda_nm") * units::nm;
  const int n_tau = static_cast<int>(get(p, "n_tau"));
  const int lobes = static_cast<int>(get(p, "quadrature_lobes"));
  if (n_tau < 3 || lobes < 8) throw ConfigError("n_tau >= 3 and quadrature_lobes >= 8 required");
  const double omega0 = angular_frequency(lambda);

  const std::vector<double> tau = tau_axis(2.0 * dl, n_tau);

  // midpoint sum of sinc^2(DL W / 2) e^{-i W tau}; even in W, so a cosine
  // recurrence over the positive nodes does it
  const int per_lobe = 6;
  const std::size_t mnodes = static_cast<std::size_t>(lobes) * per_lobe;
  const double dw = (2.0 * pi / dl) / per_lobe;
  std::vector<double> w(mnodes);
  for (std::size_t k = 0; k < mnodes; ++k) {
    const double x = 0.5 * dl * ((static_cast<double>(k) + 0.5) * dw);
    const double s = sinc(x);
    w[k] = s * s;
  }
  std::vector<double> env(tau.size());
  parallel_for(tau.size(), [&](std::size_t t0, std::size_t t1) {
    for (std::size_t t = t0; t < t1; ++t) {
      const double th = dw * tau[t];
      const double c2 = 2.0 * std::cos(th);
      double c_prev = std::cos(-0.5 * th); // node -1/2
      double c_cur = std::cos(0.5 * th);   // node +1/2
      double sum = 0.0;
      for (std::size_t k = 0; k < mnodes; ++k) {
        sum += w[k] * c_cur;
        const double c_next = c2 * c_cur - c_prev;
        c_prev = c_cur;
        c_cur = c_next;
      }
      env[t] = 2.0 * sum * dw;
    }
  });
  const double peak = *std::max_element(env.begin(), env.end());
  for (double& v : env) v /= peak;

  CorrelationMap map;
  map.mode = CorrelationMap::Mode::temporal;
  map.axis_a = tau;
  map.values.resize(tau.size());
  for (std::size_t t = 0; t < tau.size(); ++t)
    map.values[t] = 1.0 + std::cos(omega0 * tau[t]) * env[t];

  ScenarioResult r;
  r.name = "notch";
  r.params = p;
  r.primary = std::move(map);
  r.extra_columns.push_back({"envelope", env});

  // base half-width: first |tau| where the envelope stays below 1e-3
  double base = 2.0 * dl;
  for (std::size_t t = tau.size() / 2; t < tau.size(); ++t) {
    if (std::abs(env[t]) < 1e-3) {
      base = tau[t];
      break;
    }
  }
  r.summary["envelope_base_halfwidth_fs"] = base / units::fs;
  r.summary["DL_fs"] = dl / units::fs;
  std::vector<double> abs_env(env.size());
  for (std::size_t t = 0; t < env.size(); ++t) abs_env[t] = std::abs(env[t]);
  r.summary["envelope_fwhm_fs"] = analysis::fwhm(tau, abs_env) / units::fs;
  return r;
}

// ---------------------------------------------------------------------------
// entropy
// ---------------------------------------------------------------------------

ScenarioResult entropy_scenario(const json& p) {
  const spdc::SpectralAmplitude spectrum = spectrum_from(p);
  const int bins = static_cast<int>(get(p, "bins"));
  if (bins < 1) throw ConfigError("bins must be >= 1");
  const double lobes = get(p, "span_lobes");

  // span |Omega| <= lobes * 2 pi / DL for sinc spectra, else the effective
  // support
  double half = spdc::effective_support(spectrum).half_width;
  if (const auto* s2 = std::get_if<spdc::SincTypeII>(&spectrum))
    half = lobes * 2.0 * pi / std::abs(s2->crystal.dl());

  std::vector<double> centers(static_cast<std::size_t>(bins));
  std::vector<double> weights(static_cast<std::size_t>(bins));
  for (int k = 0; k < bins; ++k) {
    centers[static_cast<std::size_t>(k)] = -half + (k + 0.5) * 2.0 * half / bins;
    weights[static_cast<std::size_t>(k)] =
        spdc::mixed_state_weight(spectrum, centers[static_cast<std::size_t>(k)]);
  }
  const double s = subsystem_entropy(weights);

  CorrelationMap map;
  map.mode = CorrelationMap::Mode::temporal;
  map.axis_a = centers;
  double total = 0.0;
  for (double wv : weights) total += wv;
  map.values.resize(weights.size());
  for (std::size_t k = 0; k < weights.size(); ++k) map.values[k] = weights[k] / total;

  ScenarioResult r;
  r.name = "entropy";
  r.params = p;
  r.primary = std::move(map);
  r.summary["entropy_nats"] = s;
  r.summary["entropy_joint_pure_nats"] = subsystem_entropy({1.0});
  r.summary["bins"] = bins;
  return r;
}

// ---------------------------------------------------------------------------
// temporal-g2 / mixed-g2
// ---------------------------------------------------------------------------

ScenarioResult temporal_g2_scenario(const json& p) {
  const spdc::SpectralAmplitude spectrum = spectrum_from(p);
  const int n_tau = static_cast<int>(get(p, "n_tau"));
  const double half = p.contains("tau_half_fs") && p["tau_half_fs"].get<double>() > 0
                          ? p["tau_half_fs"].get<double>() * units::fs
                          : default_tau_half(spectrum);
  ScenarioResult r;
  r.name = "temporal-g2";
  r.params = p;
  r.primary = temporal_g2(spectrum, tau_axis(half, n_tau));
  r.summary["contrast"] = analysis::contrast(r.primary.values);
  r.summary["fwhm_fs"] = analysis::fwhm(r.primary.axis_a, r.primary.values) / units::fs;
  return r;
}

ScenarioResult mixed_g2_scenario(const json& p) {
  const spdc::SpectralAmplitude spectrum = spectrum_from(p);
  const int n_tau = static_cast<int>(get(p, "n_tau"));
  const double half = p.contains("tau_half_fs") && p["tau_half_fs"].get<double>() > 0
                          ? p["tau_half_fs"].get<double>() * units::fs
                          : default_tau_half(spectrum);
  ScenarioResult r;
  r.name = "mixed-g2";
  r.params = p;
  r.primary = mixed_temporal_g2(spectrum, tau_axis(half, n_tau));
  const auto [lo, hi] = std::minmax_element(r.primary.values.begin(), r.primary.values.end());
  r.summary["flatness_max_over_min_minus_1"] = *lo > 0.0 ? *hi / *lo - 1.0 : 0.0;
  r.summary["contrast"] = analysis::contrast(r.primary.values);
  r.summary["level"] = r.primary.geometry.at("mixed_level");
  return r;
}

// ---------------------------------------------------------------------------
// epr-stats
// ---------------------------------------------------------------------------

ScenarioResult epr_stats_scenario(const json& p, std::uint64_t seed) {
  const std::string model_name = get_str(p, "model");
  epr::ClassicalPairModel model;
  if (model_name == "state-one") {
    model = epr::StateOne{get(p, "momentum_spread"), get(p, "position_spread")};
  } else if (model_name == "state-two") {
    model = epr::StateTwo{get(p, "offset"), get(p, "position_spread"), get(p, "momentum_spread")};
  } else if (model_name == "state-three") {
    model = epr::StateThree{{get(p, "momentum_spread"), get(p, "position_spread")},
                            {get(p, "offset"), get(p, "position_spread"), get(p, "momentum_spread")}};
  } else if (model_name == "entangled") {
    model = epr::EntangledGaussian{get(p, "sum_spread"), get(p, "diff_spread"),
                                   get(p, "single_spread"), get(p, "offset")};
  } else {
    throw ConfigError("model must be state-one|state-two|state-three|entangled");
  }
  const std::size_t n = static_cast<std::size_t>(get(p, "pairs"));
  const auto samples = epr::sample_pairs(model, n, seed);
  epr::SpreadReport rep = epr::evaluate_inequalities(samples);
  rep.seed = seed;

  ScenarioResult r;
  r.name = "epr-stats";
  r.params = p;
  r.table = {{"dp1", rep.dp1},
             {"dp2", rep.dp2},
             {"dx1", rep.dx1},
             {"dx2", rep.dx2},
             {"dsum_p", rep.dsum_p},
             {"ddiff_x", rep.ddiff_x},
             {"classical_inequality", rep.classical_inequality ? 1.0 : 0.0},
             {"epr_inequality", rep.epr_inequality ? 1.0 : 0.0},
             {"pairs", static_cast<double>(rep.samples)},
             {"seed", static_cast<double>(rep.seed)}};
  for (const auto& [k, v] : r.table) r.summary[k] = v;
  return r;
}

// ---------------------------------------------------------------------------
// registry
// ---------------------------------------------------------------------------

namespace {

json defaults_classical_image() {
  return json{{"mode", "incoherent"}, {"object", "point"},       {"object_shift_mm", 0.0},
              {"separation_mm", 0.1}, {"object_width_mm", 1.0},  {"so_mm", 600.0},
              {"si_mm", 1200.0},      {"f_mm", 400.0},           {"lens_radius_mm", 10.0},
              {"lambda_nm", 702.2},   {"grid", "standard"}};
}

json defaults_lithography_fourier() {
  return json{{"slit_separation_mm", 0.25}, {"slit_width_mm", 0.05}, {"f_mm", 500.0},
              {"so_mm", 500.0},             {"lambda_nm", 916.0},    {"grid", "standard"}};
}

json defaults_lithography_image() {
  return json{{"slit_separation_mm", 0.25}, {"slit_width_mm", 0.05}, {"so_mm", 600.0},
              {"si_mm", 1200.0},            {"f_mm", 400.0},         {"lens_radius_mm", 10.0},
              {"lambda_nm", 916.0},         {"DL_fs", 1000.0},       {"grid", "standard"}};
}

json defaults_ghost_image() {
  return json{{"object", ""},           {"object_width_mm", 3.5}, {"object_height_mm", 7.0},
              {"d1_mm", 200.0},         {"so_mm", 600.0},         {"f_mm", 400.0},
              {"d2_mm", 1000.0},        {"si_mm", 0.0},           {"lambda_nm", 702.2},
              {"pump_diameter_mm", 4.0}, {"scan_plane_factor", 1.0},
              {"source_half_mm", 4.0},  {"grid", "standard"}};
}

json defaults_popper() {
  return json{{"slit_a_mm", 0.16},      {"slit_b_mm", 0.16},  {"slit_b_open", false},
              {"f_mm", 500.0},          {"so_mm", 1000.0},    {"b1_mm", 255.0},
              {"b2_mm", 745.0},         {"d2_offset_mm", 500.0}, {"lambda_nm", 702.2},
              {"pump_diameter_mm", 3.0}, {"lens_radius_mm", 12.5}, {"grid", "standard"}};
}

json defaults_notch() {
  return json{{"DL_fs", 1000.0}, {"lambda_nm", 702.2}, {"n_tau", 801}, {"quadrature_lobes", 200000}};
}

json defaults_entropy() {
  return json{{"spectrum", "sinc2"}, {"crystal_length_mm", 3.0}, {"D_fs_per_mm", 333.3333333333333},
              {"bins", 512},         {"span_lobes", 2.0}};
}

json defaults_temporal_g2() {
  return json{{"spectrum", "sinc2"},
              {"crystal_length_mm", 3.0},
              {"D_fs_per_mm", 333.3333333333333},
              {"flat_cutoff_rad_per_ps", 20.0},
              {"gaussian_sigma_rad_per_ps", 5.0},
              {"Dprime_fs2_per_mm", 3333.0},
              {"n_tau", 1024},
              {"tau_half_fs", 0.0}};
}

json defaults_epr_stats() {
  return json{{"model", "entangled"}, {"momentum_spread", 1.0}, {"position_spread", 1000.0},
              {"offset", 1.0},        {"sum_spread", 0.01},     {"diff_spread", 0.01},
              {"single_spread", 1.0}, {"pairs", 100000}};
}

} // namespace

const std::vector<ScenarioInfo>& registry() {
  static const std::vector<ScenarioInfo> reg = {
      {"classical-image", "incoherent or coherent thin-lens image with the somb point spread",
       defaults_classical_image, [](const json& p, std::uint64_t) { return classical_image(p); }},
      {"lithography-fourier", "double-slit Fourier-plane fringes, classical vs two-photon",
       defaults_lithography_fourier,
       [](const json& p, std::uint64_t) { return lithography_fourier(p); }},
      {"lithography-image", "double-slit image plane with the pump-frequency point spread",
       defaults_lithography_image,
       [](const json& p, std::uint64_t) { return lithography_image(p); }},
      {"ghost-image", "bucket-detector coincidence image of an object mask",
       defaults_ghost_image, [](const json& p, std::uint64_t) { return ghost_image(p); }},
      {"popper", "ghost-image realization of Popper's two-slit test",
       defaults_popper, [](const json& p, std::uint64_t) { return popper_run(p); }},
      {"notch", "Fourier-spectroscopy interferogram of one SPDC photon",
       defaults_notch, [](const json& p, std::uint64_t) { return fourier_spectroscopy_notch(p); }},
      {"entropy", "Von Neumann entropy of the marginal spectrum",
       defaults_entropy, [](const json& p, std::uint64_t) { return entropy_scenario(p); }},
      {"temporal-g2", "pure-state two-photon temporal correlation",
       defaults_temporal_g2, [](const json& p, std::uint64_t) { return temporal_g2_scenario(p); }},
      {"mixed-g2", "temporal correlation of the rival mixed state",
       defaults_temporal_g2, [](const json& p, std::uint64_t) { return mixed_g2_scenario(p); }},
      {"epr-stats", "Monte Carlo spreads and inequality verdicts for pair models",
       defaults_epr_stats,
       [](const json& p, std::uint64_t seed) { return epr_stats_scenario(p, seed); }},
  };
  return reg;
}

const ScenarioInfo& find_scenario(const std::string& name) {
  for (const auto& s : registry())
    if (s.name == name) return s;
  throw ConfigError("unknown scenario: " + name);
}

} // namespace biphoton::scenarios
