#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "polarpic/driver.hpp"
#include "polarpic/parallel.hpp"

namespace py = pybind11;
using namespace polarpic;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const std::vector<double>& v) {
  Array a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

Array to_grid(const std::vector<double>& v, const GridSpec& g) {
  Array a({static_cast<py::ssize_t>(g.m_r), static_cast<py::ssize_t>(g.m_theta)});
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

std::vector<double> from_array(const Array& a) {
  return std::vector<double>(a.data(), a.data() + a.size());
}

py::dict ensemble_dict(const ParticleEnsemble& e) {
  py::dict d;
  d["r"] = to_array(e.r);
  d["theta"] = to_array(e.theta);
  d["v_r"] = to_array(e.v_r);
  d["v_theta"] = to_array(e.v_theta);
  return d;
}

ParticleEnsemble make_ensemble(const Array& r, const Array& theta, const Array& v_r,
                               const Array& v_theta) {
  const auto n = r.size();
  if (theta.size() != n || v_r.size() != n || v_theta.size() != n)
    throw DomainError("particle arrays differ in length");
  ParticleEnsemble e;
  e.r = from_array(r);
  e.theta = from_array(theta);
  e.v_r = from_array(v_r);
  e.v_theta = from_array(v_theta);
  return e;
}

GridSpec grid_of(const Array& rho, double r_min, double r_max) {
  if (rho.ndim() != 2) throw DomainError("grid values must be a 2-D (m_r, m_theta) array");
  GridSpec g{{r_min, r_max}, static_cast<int>(rho.shape(0)), static_cast<int>(rho.shape(1))};
  g.validate();
  return g;
}

RunConfig config_of(const std::string& json) {
  RunConfig c = parse_config(json);
  c.validate();
  return c;
}

py::dict record_series(const RunResult& res) {
  const auto n = static_cast<py::ssize_t>(res.series.size());
  const auto k = static_cast<py::ssize_t>(res.control_cells);
  Array t(n), eb(n), rho_b(n), mode(n), cost(n), b({n, k});
  for (py::ssize_t s = 0; s < n; ++s) {
    const auto& rec = res.series[static_cast<std::size_t>(s)];
    t.mutable_at(s) = rec.t;
    eb.mutable_at(s) = rec.boundary.energy;
    rho_b.mutable_at(s) = rec.boundary.mass_fraction;
    mode.mutable_at(s) = rec.mode_amp;
    cost.mutable_at(s) = rec.cost.total();
    for (py::ssize_t c = 0; c < k; ++c) b.mutable_at(s, c) = rec.b_cells[static_cast<std::size_t>(c)];
  }
  py::dict d;
  d["t"] = t;
  d["E_b"] = eb;
  d["rho_b"] = rho_b;
  d["mode_amp"] = mode;
  d["J"] = cost;
  d["B"] = b;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Polar-coordinate particle-in-cell Vlasov-Poisson solver with feedback control.";

  auto base = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IntegrationError>(m, "IntegrationError", PyExc_RuntimeError);
  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);
  (void)base;

  m.def("preset_names", [] {
    std::vector<std::string> names;
    for (const auto& p : presets()) names.push_back(p.name);
    return names;
  });
  m.def("preset_json", [](const std::string& name) { return to_json(preset_config(name)); });
  m.def("default_json", [] { return to_json(RunConfig{}); });
  m.def("normalize_json", [](const std::string& json) { return to_json(config_of(json)); },
        "Parses, validates and re-emits a configuration document.");
  m.def("config_keys", &config_keys);
  m.def("set_threads", &set_thread_count, py::arg("threads"));

  m.def(
      "sample_diocotron",
      [](std::size_t n, std::uint64_t seed, double alpha, int k, double center, double width,
         double r_min, double r_max) {
        const InitialConditionSpec spec{alpha, k, center, width, seed};
        return ensemble_dict(sample_diocotron(spec, n, {r_min, r_max}));
      },
      py::arg("n"), py::arg("seed") = 1, py::arg("alpha") = 0.3, py::arg("k") = 3,
      py::arg("center") = 6.5, py::arg("width") = 4.0, py::arg("r_min") = 5.0,
      py::arg("r_max") = 8.0);

  m.def(
      "deposit_density",
      [](const Array& r, const Array& theta, int m_r, int m_theta, double r_min, double r_max) {
        const GridSpec g{{r_min, r_max}, m_r, m_theta};
        ParticleEnsemble e = make_ensemble(r, theta, Array(r.size()), Array(r.size()));
        return to_grid(deposit_density(e, g), g);
      },
      py::arg("r"), py::arg("theta"), py::arg("m_r") = 64, py::arg("m_theta") = 64,
      py::arg("r_min") = 5.0, py::arg("r_max") = 8.0);

  m.def(
      "solve_poisson",
      [](const Array& rho, double r_min, double r_max, double background) {
        const GridSpec g = grid_of(rho, r_min, r_max);
        return to_grid(solve_poisson(from_array(rho), g, background), g);
      },
      py::arg("rho"), py::arg("r_min") = 5.0, py::arg("r_max") = 8.0,
      py::arg("background") = 0.0);

  m.def(
      "efield",
      [](const Array& phi, double r_min, double r_max) {
        const GridSpec g = grid_of(phi, r_min, r_max);
        std::vector<double> er(g.size()), et(g.size());
        compute_efield(from_array(phi), g, er, et);
        return py::make_tuple(to_grid(er, g), to_grid(et, g));
      },
      py::arg("phi"), py::arg("r_min") = 5.0, py::arg("r_max") = 8.0);

  m.def(
      "strategy_two_pointwise",
      [](const Array& r, const Array& theta, const Array& v_r, const Array& v_theta,
         const Array& e_r, const std::string& weights_json, double h) {
        const ParticleEnsemble e = make_ensemble(r, theta, v_r, v_theta);
        const RunConfig c = parse_config(weights_json);
        return to_array(strategy_two_pointwise(e, from_array(e_r), c.weights, ensemble_means(e), h));
      },
      py::arg("r"), py::arg("theta"), py::arg("v_r"), py::arg("v_theta"), py::arg("e_r"),
      py::arg("weights_json"), py::arg("h"),
      "Particle-level law; weights are read from a configuration document.");

  m.def(
      "boundary_thermal_energy",
      [](const Array& r, const Array& theta, const Array& v_r, const Array& v_theta, int m_r,
         int m_theta, double r_min, double r_max) {
        const GridSpec g{{r_min, r_max}, m_r, m_theta};
        const auto b = boundary_thermal_energy(make_ensemble(r, theta, v_r, v_theta), g);
        py::dict d;
        d["E_b"] = b.energy;
        d["rho_b"] = b.mass_fraction;
        d["U_b_r"] = b.mean_v_r;
        d["U_b_theta"] = b.mean_v_theta;
        return d;
      },
      py::arg("r"), py::arg("theta"), py::arg("v_r"), py::arg("v_theta"), py::arg("m_r") = 64,
      py::arg("m_theta") = 64, py::arg("r_min") = 5.0, py::arg("r_max") = 8.0);

  m.def(
      "mode_amplitude",
      [](const Array& rho, int k, double r_min, double r_max) {
        return mode_amplitude(from_array(rho), grid_of(rho, r_min, r_max), k);
      },
      py::arg("rho"), py::arg("k") = 3, py::arg("r_min") = 5.0, py::arg("r_max") = 8.0);

  m.def(
      "run",
      [](const std::string& json, const std::string& out_dir) {
        const RunConfig c = config_of(json);
        RunResult res;
        {
          py::gil_scoped_release release;
          res = run(c);
          if (!out_dir.empty()) write_run_outputs(res, c, out_dir);
        }
        py::dict d = record_series(res);
        py::list snaps;
        for (const auto& s : res.snapshots) {
          py::dict item;
          item["t"] = s.t;
          item["tag"] = s.tag;
          item["rho"] = to_grid(s.rho, res.grid);
          snaps.append(item);
        }
        d["snapshots"] = snaps;
        d["final_state"] = ensemble_dict(res.final_state);
        return d;
      },
      py::arg("config_json"), py::arg("out_dir") = "",
      "Runs a simulation; files are written when out_dir is given.");

  m.def(
      "convergence_study",
      [](const std::string& json, const std::vector<int>& steps, int reference) {
        const RunConfig c = config_of(json);
        ConvergenceTable t;
        {
          py::gil_scoped_release release;
          t = convergence_study(c, steps, reference);
        }
        py::dict d;
        std::vector<double> h, err;
        for (const auto& row : t.rows) {
          h.push_back(row.h);
          err.push_back(row.error);
        }
        d["steps"] = steps;
        d["h"] = to_array(h);
        d["error"] = to_array(err);
        d["ratios"] = to_array(t.ratios);
        d["slope"] = t.slope;
        d["reference_steps"] = t.reference_steps;
        return d;
      },
      py::arg("config_json"), py::arg("steps"), py::arg("reference_steps"));

  py::class_<Simulation>(m, "Simulation")
      .def(py::init([](const std::string& json) { return Simulation(config_of(json)); }),
           py::arg("config_json"))
      .def(
          "step",
          [](Simulation& s) -> py::object {
            const auto rec = s.step(true);
            py::dict d;
            d["t"] = rec->t;
            d["E_b"] = rec->boundary.energy;
            d["mode_amp"] = rec->mode_amp;
            d["J"] = rec->cost.total();
            d["B"] = to_array(rec->b_cells);
            return d;
          },
          "Advances one step and returns its diagnostics record.")
      .def_property_readonly("time", &Simulation::time)
      .def_property_readonly("step_index", &Simulation::step_index)
      .def_property_readonly("state", [](const Simulation& s) { return ensemble_dict(s.state()); })
      .def_property_readonly("density",
                             [](const Simulation& s) { return to_grid(s.density(), s.grid()); })
      .def_property_readonly("applied_b_cells",
                             [](const Simulation& s) { return to_array(s.applied_b_cells()); });
}
