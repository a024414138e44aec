// Copyright 2026 The homowit Authors
// SPDX-License-Identifier: Apache-2.0

#include "homowit/bounds.hpp"
#include "homowit/fock.hpp"
#include "homowit/homodyne.hpp"
#include "homowit/pipeline.hpp"
#include "homowit/serialization.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

namespace py = pybind11;
using namespace homowit;

namespace {

// Structured results cross the boundary as JSON text; the Python package
// decodes them.
std::string bound_json(double p_star, const std::string& mode, double delta_p_star, double eps11, double eps12) {
  BoundRequest r;
  r.p_star = p_star;
  r.mode = parse_bound_mode(mode);
  r.delta_p_star = delta_p_star;
  if (eps11 != 0.0 || eps12 != 0.0) r.angle_errors = std::array<double, 2>{eps11, eps12};
  return io::bound_result_to_json(separable_bound(r)).dump();
}

std::string witness_json(const std::vector<std::pair<std::string, std::string>>& settings) {
  RunConfig config;
  for (const auto& [k, v] : settings) config.set(k, v);
  config.validate();
  io::Json out = io::Json::array();
  for (const auto& rep : run_witness(config)) out.push_back(report_to_json(rep));
  return out.dump();
}

py::dict records_dict(double theta_deg, std::size_t events, double eta_a, double eta_b, std::uint64_t seed) {
  RunConfig config;
  config.events = events;
  config.eta_a = eta_a;
  config.eta_b = eta_b;
  config.seed = seed;
  config.validate();
  const auto recs = simulate_records(theta_deg, config);
  std::vector<std::int64_t> id;
  std::vector<int> sa, sb;
  std::vector<double> xa, xb;
  for (const auto& r : recs) {
    id.push_back(r.event_id);
    sa.push_back(r.setting_a);
    sb.push_back(r.setting_b);
    xa.push_back(r.x_a);
    xb.push_back(r.x_b);
  }
  py::dict d;
  d["event_id"] = id;
  d["setting_a"] = sa;
  d["setting_b"] = sb;
  d["x_a"] = xa;
  d["x_b"] = xb;
  return d;
}

}  // namespace

PYBIND11_MODULE(_homowit, m) {
  m.doc() = "Native core of homowit";
  m.attr("TSIRELSON") = kTsirelson;

  m.def(
      "tunable_state",
      [](double theta_deg, int dim, double eta_a, double eta_b) {
        return apply_loss(make_tunable_state(theta_deg, dim), eta_a, eta_b).matrix();
      },
      py::arg("theta_deg"), py::arg("dim") = kDefaultModeDim, py::arg("eta_a") = 1.0, py::arg("eta_b") = 1.0);
  m.def(
      "analytic_chsh",
      [](const CMatrix& rho, int dim_a, int dim_b) { return analytic_chsh(BipartiteFockState(dim_a, dim_b, rho)); },
      py::arg("rho"), py::arg("dim_a"), py::arg("dim_b"));
  m.def(
      "partial_transpose",
      [](const CMatrix& rho, int dim_a, int dim_b) { return partial_transpose(rho, dim_a, dim_b, Party::B); },
      py::arg("rho"), py::arg("dim_a"), py::arg("dim_b"));
  m.def("simulate_records", &records_dict, py::arg("theta_deg"), py::arg("events"), py::arg("eta_a") = 1.0,
        py::arg("eta_b") = 1.0, py::arg("seed") = 1);
  m.def("bound_json", &bound_json, py::arg("p_star"), py::arg("mode") = "qubit", py::arg("delta_p_star") = 0.0,
        py::arg("eps11") = 0.0, py::arg("eps12") = 0.0, py::call_guard<py::gil_scoped_release>());
  m.def(
      "verdict_json",
      [](double s_obs, double s_stderr, double bq, double bf) {
        return io::verdict_to_json(verdict(s_obs, s_stderr, bq, bf)).dump();
      },
      py::arg("s_obs"), py::arg("s_stderr"), py::arg("bound_qubit_ppt"), py::arg("bound_full_ppt"));
  m.def("witness_json", &witness_json, py::arg("settings"), py::call_guard<py::gil_scoped_release>());

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
}
