#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bfi/config.hpp"
#include "bfi/dynamics.hpp"
#include "bfi/error.hpp"
#include "bfi/logsobolev.hpp"
#include "bfi/measures.hpp"
#include "bfi/pl.hpp"
#include "bfi/poincare.hpp"
#include "bfi/sweep.hpp"

namespace py = pybind11;
using namespace bfi;

namespace {

Params to_params(const py::dict& d) {
  Params out;
  for (auto [k, v] : d) out[py::str(k)] = py::str(v);
  return out;
}

py::dict estimate_dict(const ConstantEstimate& e) {
  py::dict d;
  d["value"] = e.value;
  d["lower"] = e.lower;
  d["upper"] = e.upper;
  d["method"] = to_string(e.method);
  d["divergent"] = e.divergent;
  d["diagnostics"] = e.diagnostics;
  return d;
}

py::dict row_dict(const SweepRow& r) {
  py::dict d;
  d["t"] = r.t;
  d["poincare_spectral"] = r.poincare_spectral;
  d["poincare_over_t"] = r.poincare_over_t;
  d["lyapunov_bound"] = r.lyapunov_bound;
  d["ls_lower"] = r.ls_lower;
  d["ls_variational"] = r.ls_variational;
  d["ls_upper"] = r.ls_upper;
  d["ls_variational_over_t"] = r.ls_variational_over_t;
  d["laplace_gap"] = r.laplace_gap;
  d["rescaled_var"] = r.rescaled_var;
  d["x0"] = r.x0;
  d["sigma"] = r.sigma;
  d["ok"] = r.ok;
  d["error"] = r.error;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Temperature-scaled functional-inequality constants of Gibbs measures";

  static py::exception<PreconditionError> precondition(m, "PreconditionError", PyExc_ValueError);
  static py::exception<NumericalError> numerical(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const PreconditionError& e) {
      py::set_error(precondition, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical, e.what());
    }
  });

  py::class_<Potential, std::shared_ptr<Potential>>(m, "Potential")
      .def_readonly("name", &Potential::name)
      .def_readonly("dim", &Potential::dim)
      .def("__call__", [](const Potential& p, const std::vector<double>& x) {
        require(x.size() == p.dim, "point dimension mismatch");
        return p.f(x);
      })
      .def("__repr__", [](const Potential& p) { return "<Potential " + p.name + ">"; });

  m.def("potential", [](const std::string& name, const py::dict& params) {
        return std::const_pointer_cast<Potential>(get_potential(name, to_params(params)));
      }, py::arg("name"), py::arg("params") = py::dict());
  m.def("registered_potentials", &registered_potentials);

  py::class_<GibbsGrid>(m, "GibbsGrid")
      .def_property_readonly("t", &GibbsGrid::temperature)
      .def_property_readonly("size", &GibbsGrid::size)
      .def_property_readonly("dim", &GibbsGrid::dim)
      .def_property_readonly("log_Z", &GibbsGrid::log_Z)
      .def_property_readonly("weights", [](const GibbsGrid& g) {
        return std::vector<double>(g.weights().begin(), g.weights().end());
      })
      .def_property_readonly("points", [](const GibbsGrid& g) {
        return std::vector<double>(g.points().begin(), g.points().end());
      });

  m.def("gibbs", [](std::shared_ptr<Potential> p, double t, double resolution) {
        return build_gibbs(p, t, resolution);
      }, py::arg("potential"), py::arg("t"), py::arg("resolution") = 200.0);
  m.def("laplace_gap", py::overload_cast<const GibbsGrid&>(&laplace_gap));
  m.def("rescaled_variance", [](const GibbsGrid& g) { return rescaled_moments(g).var_z; });

  m.def("pl_constant_static", [](std::shared_ptr<Potential> p, double resolution) {
        return estimate_dict(pl_constant_static(*p, resolution));
      }, py::arg("potential"), py::arg("resolution") = 1000.0);
  m.def("pl_constant_dynamic",
        [](std::shared_ptr<Potential> p, const std::vector<std::vector<double>>& inits, double horizon,
           double step) { return estimate_dict(pl_constant_dynamic(*p, inits, horizon, step)); },
        py::arg("potential"), py::arg("inits"), py::arg("horizon") = 2.0, py::arg("step") = 1e-3);

  m.def("poincare_spectral", [](const GibbsGrid& g) { return estimate_dict(poincare_spectral(g)); });
  m.def("muckenhoupt_bracket", [](const GibbsGrid& g) {
    auto b = muckenhoupt_bracket(g);
    return py::make_tuple(b.lower, b.upper);
  });
  m.def("lyapunov_bound",
        [](double c_pl, double L0, double L1, double alpha, double r0, double k, double t) {
          return lyapunov_bound_formula(LyapunovParams::make(c_pl, L0, L1, alpha, r0, k, t));
        },
        py::arg("c_pl"), py::arg("L0"), py::arg("L1"), py::arg("alpha"), py::arg("r0"), py::arg("k"),
        py::arg("t"));

  m.def("ls_lower_bound", [](const GibbsGrid& g) { return estimate_dict(ls_lower_bound_search(g)); });
  m.def("ls_variational",
        [](const GibbsGrid& g, double x0, double sigma, std::size_t iters, double step) {
          return estimate_dict(ls_variational(g, TestDensity::gaussian(g, x0, sigma), iters, step));
        },
        py::arg("grid"), py::arg("x0"), py::arg("sigma"), py::arg("iters") = 500, py::arg("step") = 0.05);
  m.def("ls_upper_bound", [](const GibbsGrid& g) { return estimate_dict(ls_upper_bound(g)); });

  m.def("langevin",
        [](std::shared_ptr<Potential> p, double t, std::size_t particles, double dt, double burn_in,
           std::uint64_t seed) {
          EnsembleConfig c;
          c.particles = particles;
          c.dt = dt;
          c.burn_in = burn_in;
          c.seed = seed;
          return langevin_run(p, t, c).particles;
        },
        py::arg("potential"), py::arg("t"), py::arg("particles") = 1000, py::arg("dt") = 1e-3,
        py::arg("burn_in") = 0.0, py::arg("seed") = 1);

  m.def("run_sweep", [](const std::string& config_text) {
    SweepResult r;
    {
      py::gil_scoped_release release;
      r = run_sweep(Config::parse_string(config_text));
    }
    py::list rows;
    for (const auto& row : r.rows) rows.append(row_dict(row));
    py::dict summary;
    summary["cbls_estimate"] = r.summary.cbls_estimate;
    summary["cap_estimate"] = r.summary.cap_estimate;
    summary["cpl_static"] = r.summary.cpl_static;
    summary["lambda_min"] = r.summary.lambda_min;
    summary["cbls_clamped"] = r.summary.cbls_clamped;
    summary["note"] = r.summary.note;
    py::dict out;
    out["potential"] = r.potential;
    out["rows"] = rows;
    out["summary"] = summary;
    out["csv"] = render_sweep(r, OutputFormat::csv);
    return out;
  }, py::arg("config_text"));
}
