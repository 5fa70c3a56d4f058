// Python bindings for the main operations: special functions, free-space
// propagation, temporal correlations, pair statistics and scenario runs.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "biphoton/correlator.hpp"
#include "biphoton/epr.hpp"
#include "biphoton/fresnel.hpp"
#include "biphoton/scenarios.hpp"
#include "biphoton/special.hpp"
#include "biphoton/units.hpp"
#include "biphoton/version.hpp"

namespace py = pybind11;
using namespace biphoton;

namespace {

py::dict map_to_dict(const CorrelationMap& map) {
  py::dict out;
  out["axis_a"] = py::array_t<double>(static_cast<py::ssize_t>(map.axis_a.size()),
                                      map.axis_a.data());
  if (!map.axis_b.empty())
    out["axis_b"] = py::array_t<double>(static_cast<py::ssize_t>(map.axis_b.size()),
                                        map.axis_b.data());
  out["values"] = py::array_t<double>(static_cast<py::ssize_t>(map.values.size()),
                                      map.values.data());
  return out;
}

TransverseGrid grid_from(int n, double spacing, double center) {
  return TransverseGrid::line(n, spacing, center);
}

} // namespace

PYBIND11_MODULE(_biphoton, m) {
  m.doc() = "Two-photon correlation simulations: Fresnel propagation of SPDC pairs";
  m.attr("__version__") = version_string;

  m.def("somb", py::vectorize(&somb), "2 J1(x) / x with somb(0) = 1");
  m.def("bessel_j1", py::vectorize(&bessel_j1));
  m.def(
      "gaussian_phase",
      [](double displacement_sq, double curvature) {
        return fresnel::gaussian_phase(displacement_sq, curvature);
      },
      py::arg("displacement_sq"), py::arg("curvature"),
      "exp(i curvature/2 * displacement_sq)");

  m.def(
      "free_propagate",
      [](py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> amp,
         double spacing, double wavelength, double distance, int out_n, double out_spacing,
         double out_center) {
        if (amp.ndim() != 1) throw std::invalid_argument("1-D amplitude expected");
        SampledField f(grid_from(static_cast<int>(amp.shape(0)), spacing, 0.0), wavelength);
        std::copy(amp.data(), amp.data() + amp.shape(0), f.amplitude.begin());
        const SampledField out =
            fresnel::free_propagate(f, distance, grid_from(out_n, out_spacing, out_center));
        py::array_t<std::complex<double>> res(static_cast<py::ssize_t>(out.amplitude.size()));
        std::copy(out.amplitude.begin(), out.amplitude.end(), res.mutable_data());
        return res;
      },
      py::arg("amplitude"), py::arg("spacing"), py::arg("wavelength"), py::arg("distance"),
      py::arg("out_n"), py::arg("out_spacing"), py::arg("out_center") = 0.0,
      "Huygens-Fresnel propagation of a 1-D sampled field");

  m.def(
      "temporal_g2",
      [](const std::string& kind, double scale, py::array_t<double> tau) {
        spdc::SpectralAmplitude s;
        if (kind == "flat") {
          s = spdc::Flat{scale};
        } else if (kind == "gaussian") {
          s = spdc::Gaussian{scale};
        } else if (kind == "sinc2") {
          spdc::CrystalParams c;
          c.length = 3.0 * units::mm;
          c.group_delay_mismatch = scale / c.length; // scale = D*L in seconds
          s = spdc::SincTypeII{c};
        } else {
          throw std::invalid_argument("kind must be flat|gaussian|sinc2");
        }
        std::vector<double> grid(tau.data(), tau.data() + tau.shape(0));
        return map_to_dict(temporal_g2(s, grid));
      },
      py::arg("kind"), py::arg("scale"), py::arg("tau"),
      "Pure-state |F{f}|^2 over a tau grid; scale is the cutoff (rad/s), sigma "
      "(rad/s) or D*L (s) depending on kind");

  m.def(
      "sample_pairs",
      [](const std::string& model, std::size_t n, std::uint64_t seed, py::kwargs kw) {
        epr::ClassicalPairModel m;
        auto get = [&kw](const char* k, double fallback) {
          return kw.contains(k) ? kw[k].cast<double>() : fallback;
        };
        if (model == "state-one") {
          m = epr::StateOne{get("momentum_spread", 1.0), get("position_spread", 1000.0)};
        } else if (model == "state-two") {
          m = epr::StateTwo{get("offset", 1.0), get("position_spread", 1000.0),
                            get("momentum_spread", 1000.0)};
        } else if (model == "state-three") {
          m = epr::StateThree{{get("momentum_spread", 1.0), get("position_spread", 1000.0)},
                              {get("offset", 1.0), get("position_spread", 1000.0),
                               get("momentum_spread", 1000.0)}};
        } else if (model == "entangled") {
          m = epr::EntangledGaussian{get("sum_spread", 0.01), get("diff_spread", 0.01),
                                     get("single_spread", 1.0), get("offset", 0.0)};
        } else {
          throw std::invalid_argument("unknown pair model: " + model);
        }
        const auto samples = epr::sample_pairs(m, n, seed);
        py::array_t<double> arr({static_cast<py::ssize_t>(n), py::ssize_t{4}});
        auto view = arr.mutable_unchecked<2>();
        for (std::size_t k = 0; k < n; ++k) {
          view(static_cast<py::ssize_t>(k), 0) = samples[k].x1;
          view(static_cast<py::ssize_t>(k), 1) = samples[k].x2;
          view(static_cast<py::ssize_t>(k), 2) = samples[k].p1;
          view(static_cast<py::ssize_t>(k), 3) = samples[k].p2;
        }
        return arr;
      },
      py::arg("model"), py::arg("n"), py::arg("seed"),
      "Deterministic correlated pair draws, columns (x1, x2, p1, p2)");

  m.def(
      "evaluate_inequalities",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> arr) {
        if (arr.ndim() != 2 || arr.shape(1) != 4)
          throw std::invalid_argument("expected an (n, 4) array of (x1, x2, p1, p2)");
        std::vector<epr::PairSample> samples(static_cast<std::size_t>(arr.shape(0)));
        auto view = arr.unchecked<2>();
        for (py::ssize_t k = 0; k < arr.shape(0); ++k)
          samples[static_cast<std::size_t>(k)] = {view(k, 0), view(k, 1), view(k, 2), view(k, 3)};
        const epr::SpreadReport r = epr::evaluate_inequalities(samples);
        py::dict out;
        out["dp1"] = r.dp1;
        out["dp2"] = r.dp2;
        out["dx1"] = r.dx1;
        out["dx2"] = r.dx2;
        out["dsum_p"] = r.dsum_p;
        out["ddiff_x"] = r.ddiff_x;
        out["classical_inequality"] = r.classical_inequality;
        out["epr_inequality"] = r.epr_inequality;
        return out;
      },
      py::arg("samples"));

  m.def("subsystem_entropy", &scenarios::subsystem_entropy, py::arg("weights"),
        "Von Neumann entropy of a diagonal weight array, in nats");

  m.def("list_scenarios", [] {
    py::list out;
    for (const auto& s : scenarios::registry()) out.append(s.name);
    return out;
  });

  m.def(
      "run_scenario",
      [](const std::string& name, const std::string& params_json, std::uint64_t seed) {
        const auto& info = scenarios::find_scenario(name);
        scenarios::json params = info.defaults();
        if (!params_json.empty()) {
          const auto overrides = scenarios::json::parse(params_json);
          for (const auto& [k, v] : overrides.items()) {
            if (!params.contains(k)) throw ConfigError("unknown parameter: " + k);
            params[k] = v;
          }
        }
        const scenarios::ScenarioResult r = info.run(params, seed);
        py::dict out;
        out["name"] = r.name;
        out["params"] = r.params.dump();
        if (r.has_map()) out["map"] = map_to_dict(r.primary);
        py::dict summary;
        for (const auto& [k, v] : r.summary) summary[py::str(k)] = v;
        out["summary"] = summary;
        py::dict table;
        for (const auto& [k, v] : r.table) table[py::str(k)] = v;
        out["table"] = table;
        return out;
      },
      py::arg("name"), py::arg("params_json") = std::string(), py::arg("seed") = 0,
      "Run a named scenario with JSON parameter overrides");

  py::register_exception<ConfigError>(m, "ScenarioConfigError");
  py::register_exception<GeometryError>(m, "GeometryError");
  py::register_exception<SamplingViolation>(m, "SamplingViolationError");
}
