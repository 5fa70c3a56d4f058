#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "biphoton/analysis.hpp"
#include "biphoton/scenarios.hpp"
#include "biphoton/special.hpp"
#include "biphoton/units.hpp"
#include "oracles.hpp"

using namespace biphoton;
using namespace biphoton::scenarios;

namespace {

json with(json base, std::initializer_list<std::pair<std::string, json>> kv) {
  for (const auto& [k, v] : kv) base[k] = v;
  return base;
}

json defaults_of(const std::string& name) { return find_scenario(name).defaults(); }

} // namespace

TEST_CASE("incoherent point image reproduces the pupil point-spread function") {
  const ScenarioResult r = classical_image(defaults_of("classical-image"));
  // first zero where (R/s_o)(w/c) |x/m| hits the first J1 root
  const double root = oracles::j1_first_root();
  const double omega = angular_frequency(702.2 * units::nm);
  const double expect = root * (0.6 / 0.01) * (speed_of_light / omega) * 2.0;
  const double zero = analysis::first_minimum_after(r.primary.axis_a, r.primary.values,
                                                    0.5 * (r.primary.axis_a[1] - r.primary.axis_a[0]));
  CHECK(std::abs(zero - expect) <= r.primary.axis_a[1] - r.primary.axis_a[0]);

  SUBCASE("shifting the object shifts the image by -m delta") {
    const double delta = 0.2; // mm
    const ScenarioResult shifted =
        classical_image(with(defaults_of("classical-image"), {{"object_shift_mm", delta}}));
    CHECK(shifted.summary.at("peak_mm") == doctest::Approx(-2.0 * delta).epsilon(0.01));
  }

  SUBCASE("doubling the lens radius halves the first zero") {
    const ScenarioResult wide =
        classical_image(with(defaults_of("classical-image"), {{"lens_radius_mm", 20.0}}));
    CHECK(wide.summary.at("psf_first_zero_mm") ==
          doctest::Approx(0.5 * r.summary.at("psf_first_zero_mm")).epsilon(0.01));
    const double zero_wide = analysis::first_minimum_after(
        wide.primary.axis_a, wide.primary.values,
        0.5 * (wide.primary.axis_a[1] - wide.primary.axis_a[0]));
    CHECK(zero_wide == doctest::Approx(0.5 * zero).epsilon(0.01));
  }
}

TEST_CASE("coherent imaging") {
  SUBCASE("a point object yields the same |somb|^2 profile as incoherent") {
    const ScenarioResult inc = classical_image(defaults_of("classical-image"));
    const ScenarioResult coh =
        classical_image(with(defaults_of("classical-image"), {{"mode", "coherent"}}));
    for (std::size_t i = 0; i < inc.primary.values.size(); ++i)
      CHECK(coh.primary.values[i] == doctest::Approx(inc.primary.values[i]).epsilon(1e-9));
  }
  SUBCASE("two points below the resolution limit merge into one lobe") {
    // separation well below the psf first zero (51 um at these numbers)
    const ScenarioResult r = classical_image(with(
        defaults_of("classical-image"),
        {{"mode", "coherent"}, {"object", "two-point"}, {"separation_mm", 0.02}}));
    const auto& v = r.primary.values;
    int maxima = 0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
      if (v[i] > 0.5 && v[i] > v[i - 1] && v[i] >= v[i + 1]) ++maxima;
    CHECK(maxima == 1);
  }
  SUBCASE("an extended uniform object fills in approximately uniformly") {
    const ScenarioResult r = classical_image(with(
        defaults_of("classical-image"),
        {{"mode", "coherent"}, {"object", "uniform"}, {"object_width_mm", 1.0},
         {"lens_radius_mm", 25.0}}));
    double lo = 1.0;
    for (std::size_t i = 0; i < r.primary.values.size(); ++i)
      if (std::abs(r.primary.axis_a[i]) < 0.6 * units::mm) lo = std::min(lo, r.primary.values[i]);
    CHECK(lo > 0.5);
  }
}

TEST_CASE("double-slit fringes double their modulation in coincidences") {
  const ScenarioResult r = lithography_fourier(defaults_of("lithography-fourier"));
  CHECK(r.summary.at("period_ratio") == doctest::Approx(0.5).epsilon(0.02));
  CHECK(r.summary.at("classical_period_mm") ==
        doctest::Approx(r.summary.at("classical_period_analytic_mm")).epsilon(0.01));

  SUBCASE("the d/a = 5 missing order is suppressed in the classical pattern") {
    // classical profile rides a sinc^2 envelope with a zero on the 5th fringe
    const auto& axis = r.primary.axis_a;
    const auto& cls = r.extra_columns[0].second;
    const double period = r.summary.at("classical_period_mm") * units::mm;
    auto value_near = [&](double x) {
      std::size_t best = 0;
      for (std::size_t i = 0; i < axis.size(); ++i)
        if (std::abs(axis[i] - x) < std::abs(axis[best] - x)) best = i;
      return cls[best];
    };
    CHECK(value_near(2.0 * period) > 0.2);       // strong low order
    CHECK(value_near(5.0 * period) < 0.05);      // missing order (outside scan? clamped)
  }
}

TEST_CASE("fringe halving is stable across the slit and lens sweep") {
  for (const auto& [d, f] : std::vector<std::pair<double, double>>{
           {0.125, 250.0}, {0.25, 500.0}, {0.5, 1000.0}, {0.25, 250.0}}) {
    const ScenarioResult r = lithography_fourier(with(
        defaults_of("lithography-fourier"),
        {{"slit_separation_mm", d}, {"f_mm", f}, {"so_mm", f}}));
    CHECK(r.summary.at("period_ratio") > 0.49);
    CHECK(r.summary.at("period_ratio") < 0.51);
  }
}

TEST_CASE("image-plane point spread halves at the pump frequency") {
  const ScenarioResult r = lithography_image(defaults_of("lithography-image"));
  CHECK(r.summary.at("psf_zero_ratio") == doctest::Approx(0.5).epsilon(0.04));
  CHECK(r.summary.at("broadband_width_ratio") == doctest::Approx(1.0).epsilon(0.02));
  // slit images land at +/- m d/2
  CHECK(r.summary.at("image_peak_mm") > 0.15);
  CHECK(r.summary.at("image_peak_mm") < 0.3);
}

TEST_CASE("ghost image magnifies, inverts and blurs off focus") {
  const ScenarioResult g = ghost_image(defaults_of("ghost-image"));
  CHECK(g.summary.at("magnification_fitted") == doctest::Approx(2.0).epsilon(0.02));
  CHECK(g.summary.at("inverted") == 1.0);
  CHECK(g.summary.at("image_width_mm") == doctest::Approx(7.0).epsilon(0.03));
  CHECK(g.summary.at("image_height_mm") == doctest::Approx(14.0).epsilon(0.03));

  SUBCASE("unit magnification geometry") {
    const ScenarioResult r1 = ghost_image(with(
        defaults_of("ghost-image"), {{"so_mm", 800.0}, {"d2_mm", 600.0}}));
    CHECK(r1.summary.at("magnification_fitted") == doctest::Approx(1.0).epsilon(0.02));
    CHECK(r1.summary.at("image_width_mm") == doctest::Approx(3.5).epsilon(0.04));
  }

  SUBCASE("moving the scan plane blurs the image") {
    for (double factor : {0.75, 1.25}) {
      const ScenarioResult blur = ghost_image(
          with(defaults_of("ghost-image"), {{"scan_plane_factor", factor}}));
      CHECK(blur.summary.at("gradient_energy") < g.summary.at("gradient_energy"));
    }
  }

  SUBCASE("mirroring the object mirrors the image") {
    // builtin letters, flipped upside down, written to a temporary file
    const io::Bitmap letters = builtin_letters();
    const std::string path = "/tmp/biphoton_test_flipped.pbm";
    std::ofstream out(path);
    out << "P1\n" << letters.width << " " << letters.height << "\n";
    for (int y = letters.height - 1; y >= 0; --y) {
      for (int x = 0; x < letters.width; ++x)
        out << (letters.at(x, y) > 0.5 ? '1' : '0') << (x + 1 == letters.width ? '\n' : ' ');
    }
    out.close();
    const ScenarioResult flipped =
        ghost_image(with(defaults_of("ghost-image"), {{"object", path}}));
    // row reversal equals mirror-about-center plus a one-cell shift on the
    // mask grid, so the image obeys rate'(y) = rate(m*h_obj - y); check the
    // centroid relation and the preserved orientation fit
    const auto marginal_centroid = [](const CorrelationMap& map) {
      double mass = 0.0, my = 0.0;
      const std::size_t na = map.axis_a.size();
      for (std::size_t ib = 0; ib < map.axis_b.size(); ++ib)
        for (std::size_t ia = 0; ia < na; ++ia) {
          mass += map.values[ib * na + ia];
          my += map.values[ib * na + ia] * map.axis_b[ib];
        }
      return my / mass;
    };
    const double h_obj = 7.0 * units::mm / letters.height;
    const double cy = marginal_centroid(g.primary);
    const double cy_flipped = marginal_centroid(flipped.primary);
    CHECK(std::abs(cy_flipped - (2.0 * h_obj - cy)) < 0.08 * units::mm);
    CHECK(flipped.summary.at("inverted") == 1.0);
    CHECK(flipped.summary.at("magnification_fitted") == doctest::Approx(2.0).epsilon(0.02));
    std::remove(path.c_str());
  }
}

TEST_CASE("Popper runs: diffraction vs the conditioned image") {
  const ScenarioResult m1 = popper_run(defaults_of("popper"));
  const ScenarioResult m2 = popper_run(with(defaults_of("popper"), {{"slit_b_open", true}}));
  CHECK(m2.summary.at("fwhm_mm") < m1.summary.at("fwhm_mm"));

  // measurement 1 behaves like slit-B diffraction: the first minimum sits
  // near lambda d / a, smeared by the soft ghost illumination of the slit
  const double analytic = m1.summary.at("diffraction_first_zero_analytic_mm");
  const double zero =
      analysis::first_minimum_after(m1.primary.axis_a, m1.primary.values,
                                    0.5 * (m1.primary.axis_a[1] - m1.primary.axis_a[0])) /
      units::mm;
  CHECK(zero == doctest::Approx(analytic).epsilon(0.2));

  SUBCASE("the width inequality holds across slit-A widths") {
    for (double a : {0.08, 0.32}) {
      const ScenarioResult w1 = popper_run(with(defaults_of("popper"), {{"slit_a_mm", a}}));
      const ScenarioResult w2 = popper_run(
          with(defaults_of("popper"), {{"slit_a_mm", a}, {"slit_b_open", true}}));
      CHECK(w2.summary.at("fwhm_mm") < w1.summary.at("fwhm_mm"));
    }
  }
}

TEST_CASE("open-slit Popper profile matches the direct-quadrature route") {
  const ScenarioResult m2 = popper_run(with(defaults_of("popper"), {{"slit_b_open", true}}));
  // compare on a thinned copy of the scenario's scan axis
  std::vector<double> xs, impl;
  for (std::size_t i = 0; i < m2.primary.axis_a.size(); i += 4) {
    xs.push_back(m2.primary.axis_a[i]);
    impl.push_back(m2.primary.values[i]);
  }
  const std::vector<double> oracle = oracles::popper_m2_profile(
      xs, 0.16 * units::mm, 1.5 * units::mm, 0.255, 1.0, 0.5, 12.5 * units::mm, 1.245,
      702.2 * units::nm);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (impl[i] - oracle[i]) * (impl[i] - oracle[i]);
    den += oracle[i] * oracle[i];
  }
  CHECK(std::sqrt(num / den) < 1e-3);
}

TEST_CASE("spectroscopy interferogram has the triangular visibility envelope") {
  const ScenarioResult r = fourier_spectroscopy_notch(defaults_of("notch"));
  const auto& tau = r.primary.axis_a;
  const auto& env = r.extra_columns[0].second;
  const double dl = 1000.0 * units::fs;
  double worst_outside = 0.0;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (std::abs(tau[i]) >= dl) worst_outside = std::max(worst_outside, std::abs(env[i]));
    if (std::abs(tau[i]) < dl) {
      // linear in between: envelope = 1 - |tau|/DL
      CHECK(env[i] == doctest::Approx(1.0 - std::abs(tau[i]) / dl).epsilon(0.001).scale(1.0));
    }
  }
  CHECK(worst_outside < 1e-6);
  // global maximum of the interferogram sits at zero path difference
  const std::size_t mid = tau.size() / 2;
  for (double v : r.primary.values) CHECK(v <= r.primary.values[mid] + 1e-12);
  // half visibility at half the base
  CHECK(r.summary.at("envelope_fwhm_fs") == doctest::Approx(1000.0).epsilon(0.01));
}

TEST_CASE("subsystem entropy of diagonal weights") {
  CHECK(subsystem_entropy({1.0}) == 0.0);
  CHECK(subsystem_entropy({1.0, 1.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(subsystem_entropy({0.5, 0.0, 0.5}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(subsystem_entropy({0.0, 0.0}), AllZeroSpectrum);
  CHECK_THROWS_AS(subsystem_entropy({}), AllZeroSpectrum);
  CHECK_THROWS_AS(subsystem_entropy({-1.0, 2.0}), AllZeroSpectrum);
}

TEST_CASE("marginal spectrum entropy matches the high-resolution oracle") {
  const ScenarioResult r = entropy_scenario(defaults_of("entropy"));
  // regression constant from a bin-integrated Simpson oracle
  CHECK(r.summary.at("entropy_nats") == doctest::Approx(5.369269346757418).epsilon(1e-3));
  CHECK(r.summary.at("entropy_joint_pure_nats") == 0.0);

  // recompute the oracle here: integrate sinc^2 over each of the 512 bins
  const int bins = 512;
  std::vector<double> p(bins);
  double total = 0.0;
  for (int k = 0; k < bins; ++k) {
    const double lo = -2.0 * pi + 4.0 * pi * k / bins;
    const double hi = lo + 4.0 * pi / bins;
    p[static_cast<std::size_t>(k)] = oracles::adaptive_simpson(
        [](double u) {
          const double s = u == 0.0 ? 1.0 : std::sin(u) / u;
          return s * s;
        },
        lo, hi, 1e-12);
    total += p[static_cast<std::size_t>(k)];
  }
  double s_oracle = 0.0;
  for (double v : p) {
    const double pk = v / total;
    if (pk > 0.0) s_oracle -= pk * std::log(pk);
  }
  CHECK(s_oracle == doctest::Approx(5.369269346757418).epsilon(1e-9));
  CHECK(r.summary.at("entropy_nats") == doctest::Approx(s_oracle).epsilon(1e-3));

  SUBCASE("every multi-bin marginal carries positive entropy") {
    for (int b : {2, 16, 128}) {
      const ScenarioResult rb = entropy_scenario(with(defaults_of("entropy"), {{"bins", b}}));
      CHECK(rb.summary.at("entropy_nats") > 0.0);
    }
  }
}

TEST_CASE("identical configurations reproduce bit-identical primary outputs") {
  const ScenarioResult a = ghost_image(defaults_of("ghost-image"));
  const ScenarioResult b = ghost_image(defaults_of("ghost-image"));
  REQUIRE(a.primary.values.size() == b.primary.values.size());
  for (std::size_t i = 0; i < a.primary.values.size(); ++i)
    CHECK(a.primary.values[i] == b.primary.values[i]);

  const ScenarioResult e1 = epr_stats_scenario(defaults_of("epr-stats"), 1234);
  const ScenarioResult e2 = epr_stats_scenario(defaults_of("epr-stats"), 1234);
  for (std::size_t i = 0; i < e1.table.size(); ++i)
    CHECK(e1.table[i].second == e2.table[i].second);
}

TEST_CASE("scenario registry carries the stable identifiers") {
  CHECK(registry().size() == 10);
  CHECK_NOTHROW(find_scenario("ghost-image"));
  CHECK_NOTHROW(find_scenario("popper"));
  CHECK_THROWS_AS(find_scenario("nope"), ConfigError);
}

TEST_CASE("geometry violations are rejected") {
  CHECK_THROWS_AS(classical_image(with(defaults_of("classical-image"), {{"si_mm", 1000.0}})),
                  GeometryError);
  CHECK_THROWS_AS(ghost_image(with(defaults_of("ghost-image"), {{"so_mm", 650.0}})),
                  GeometryError);
  CHECK_THROWS_AS(popper_run(with(defaults_of("popper"), {{"b1_mm", 300.0}})), GeometryError);
}
