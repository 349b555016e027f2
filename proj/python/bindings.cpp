#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fluxchemo/chemo.hpp"
#include "fluxchemo/config.hpp"
#include "fluxchemo/cutoff.hpp"
#include "fluxchemo/errors.hpp"
#include "fluxchemo/harness.hpp"
#include "fluxchemo/kernel.hpp"
#include "fluxchemo/params.hpp"
#include "fluxchemo/pde2d.hpp"
#include "fluxchemo/potential.hpp"
#include "fluxchemo/radialfp.hpp"

namespace py = pybind11;
using namespace fluxchemo;

namespace {

Params params_from_text(const std::string& text) { return params_from_config(parse_config(text)); }

py::dict run_radial(const Params& p, double dr, double T_max, std::vector<double> probes,
                    bool chemotaxis, bool stop_at_half) {
  RadialSimulation sim(p, make_radial_initial(p, dr, default_half_width(p)), chemotaxis);
  RunConfig cfg;
  cfg.T_max = T_max;
  cfg.probes = std::move(probes);
  Diagnostics d;
  {
    py::gil_scoped_release release;
    d = stop_at_half ? run(sim, cfg, stop_at_half_mass(p.theta)) : run(sim, cfg);
  }
  py::dict out;
  out["times"] = py::array(py::cast(d.times));
  out["mass1"] = py::array(py::cast(d.mass1));
  out["mass2"] = py::array(py::cast(d.mass2));
  out["h"] = py::array(py::cast(d.h));
  out["cumulative_h"] = py::array(py::cast(d.cumulative_h));
  out["probe_radii"] = py::array(py::cast(d.probe_radii));
  out["local_mass"] = py::array(py::cast(d.M_probe));
  out["half_time"] = half_time(d, p.theta);
  out["conservation_failures"] = d.conservation_failures;
  return out;
}

py::dict point_to_dict(const PointResult& r) {
  py::dict d;
  d["index"] = r.index;
  d["params"] = r.params;
  d["regime"] = std::string(to_string(r.regime));
  d["seed"] = r.has_seed ? py::object(py::int_(r.seed)) : py::object(py::none());
  d["tau"] = r.tau;
  d["tau_censored"] = r.tau_censored;
  d["tau_D"] = r.tau_D;
  d["tau_D_censored"] = r.tau_D_censored;
  d["bound"] = r.bound.total();
  d["error"] = r.error;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Flux-limited chemotaxis with absorbing reaction: solvers and verification tools";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<RegimeError>(m, "RegimeError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ResolutionError>(m, "ResolutionError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<Params>(m, "Params")
      .def_static(
          "make",
          [](double chi, double v0, double eps, double theta, double sigma, double M0, double L,
             std::optional<double> delta, double delta0, bool check) {
            return Params::make(chi, v0, eps, theta, sigma, M0, L, delta, delta0,
                                check ? RegimeCheck::enforce : RegimeCheck::skip);
          },
          py::arg("chi"), py::arg("v0"), py::arg("eps"), py::arg("theta"), py::arg("sigma"),
          py::arg("M0"), py::arg("L"), py::arg("delta") = py::none(), py::arg("delta0") = 0.05,
          py::arg("check_regime") = true)
      .def_static(
          "from_gamma",
          [](double gamma, double v0, double eps, double theta, double sigma, double M0, double L,
             bool check) {
            return Params::from_gamma(gamma, v0, eps, theta, sigma, M0, L,
                                      check ? RegimeCheck::enforce : RegimeCheck::skip);
          },
          py::arg("gamma"), py::arg("v0"), py::arg("eps"), py::arg("theta"), py::arg("sigma"),
          py::arg("M0"), py::arg("L"), py::arg("check_regime") = true)
      .def_static("from_config", &params_from_text, py::arg("text"))
      .def_readonly("chi", &Params::chi)
      .def_readonly("v0", &Params::v0)
      .def_readonly("eps", &Params::eps)
      .def_readonly("theta", &Params::theta)
      .def_readonly("sigma", &Params::sigma)
      .def_readonly("gamma", &Params::gamma)
      .def_readonly("M0", &Params::M0)
      .def_readonly("L", &Params::L)
      .def_readonly("beta", &Params::beta)
      .def_readonly("delta", &Params::delta)
      .def_readonly("delta0", &Params::delta0)
      .def_readonly("R0", &Params::R0)
      .def_readonly("r0", &Params::r0)
      .def_property_readonly("regime", [](const Params& p) { return std::string(to_string(classify(p))); })
      .def("to_config", &params_to_config)
      .def("__repr__", [](const Params& p) {
        return "Params(gamma=" + std::to_string(p.gamma) + ", v0=" + std::to_string(p.v0) +
               ", eps=" + std::to_string(p.eps) + ", M0=" + std::to_string(p.M0) +
               ", L=" + std::to_string(p.L) + ")";
      });

  m.def("regime_violation", &regime_violation, py::arg("params"));
  m.def("bound_terms", [](const Params& p) {
    const BoundTerms b = bound_terms(p);
    return py::dict(py::arg("transport") = b.transport, py::arg("equilibration") = b.equilibration,
                    py::arg("reaction") = b.reaction, py::arg("total") = b.total());
  });

  m.def(
      "cutoff",
      [](const Params& p, py::array_t<double> z) {
        const Cutoff psi(p);
        return py::vectorize([&psi](double x) { return psi(x); })(z);
      },
      py::arg("params"), py::arg("z"));

  py::class_<PotentialH>(m, "Potential")
      .def(py::init(&build_potential), py::arg("params"))
      .def("dH", py::vectorize(&PotentialH::dH))
      .def("H", py::vectorize(&PotentialH::H))
      .def_property_readonly("R0", &PotentialH::R0)
      .def_property_readonly("r0", &PotentialH::r0);

  m.def("extremal_drift",
        [](double r, double theta, double sigma) { return extremal_drift(r, DensityFamilySpec{theta}, sigma); },
        py::arg("r"), py::arg("theta"), py::arg("sigma") = 1.0);
  m.def("brute_force_extremal",
        [](double r, double theta, double sigma) {
          return brute_force_extremal(r, DensityFamilySpec{theta}, sigma);
        },
        py::arg("r"), py::arg("theta"), py::arg("sigma") = 1.0);
  m.def("boundary_lower_bound", &boundary_lower_bound, py::arg("gamma"));

  m.def("erfc", py::vectorize(&fluxchemo::erfc));
  m.def("kernel_bound_factor", py::vectorize(&kernel_bound_factor), py::arg("d"), py::arg("tau"),
        py::arg("B"));
  m.def(
      "gamma_lower_bound",
      [](double x1, double x2, double y1, double y2, double t, double s, double B) {
        return gamma_lower_bound(KernelBoundQuery{x1, x2, y1, y2, t, s, B});
      },
      py::arg("x1"), py::arg("x2"), py::arg("y1"), py::arg("y2"), py::arg("t"), py::arg("s") = 0.0,
      py::arg("B") = 0.0);
  m.def("heat_kernel_2d", &heat_kernel_2d, py::arg("dx"), py::arg("dy"), py::arg("t"));
  m.def(
      "harnack_constant",
      [](double C3, double v0) {
        const HarnackResult r = harnack_constant(C3, v0);
        return py::dict(py::arg("a") = r.a, py::arg("d1") = r.d1, py::arg("d2") = r.d2,
                        py::arg("diagnostic") = r.diagnostic);
      },
      py::arg("C3"), py::arg("v0") = 1.0);
  m.def("c2_series", &c2_series);

  m.def(
      "half_time",
      [](const Params& p, const std::string& backend, double resolution, double T_max, bool chemotaxis) {
        py::gil_scoped_release release;
        const HalfTime h = measure_half_time(p, backend_from_string(backend), resolution, T_max, chemotaxis);
        return std::make_pair(h.tau, h.censored);
      },
      py::arg("params"), py::arg("backend") = "radial", py::arg("resolution") = 1.0 / 16.0,
      py::arg("T_max") = 1e5, py::arg("chemotaxis") = true,
      "Half-time and a censoring flag (censored values equal T_max).");
  m.def("run_radial", &run_radial, py::arg("params"), py::arg("dr") = 1.0 / 16.0, py::arg("T_max") = 1e4,
        py::arg("probes") = std::vector<double>{}, py::arg("chemotaxis") = true,
        py::arg("stop_at_half") = true);

  m.def(
      "sweep",
      [](const std::string& config_text, int workers) {
        SweepSpec spec = sweep_spec_from_config(parse_config(config_text));
        if (workers > 0) spec.workers = workers;
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = run_sweep(spec);
        }
        py::list out;
        for (const PointResult& p : r.points) out.append(point_to_dict(p));
        return out;
      },
      py::arg("config_text"), py::arg("workers") = 0);
}
