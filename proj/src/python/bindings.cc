#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "oddac/analysis.h"
#include "oddac/controller.h"
#include "oddac/errors.h"
#include "oddac/harness.h"
#include "oddac/plant.h"
#include "oddac/window.h"

namespace py = pybind11;
using namespace oddac;

namespace {

Eigen::MatrixXd stack_rows(const RunLog& log, bool inputs) {
  const int w = inputs ? log.m : log.n;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(log.rows.size()), w);
  for (std::size_t k = 0; k < log.rows.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) =
        (inputs ? log.rows[k].u : log.rows[k].x).transpose();
  }
  return out;
}

py::dict certificate_dict(const GainCertificate& c) {
  py::dict d;
  d["status"] = to_string(c.status);
  d["margin"] = c.margin;
  d["margin_upper_bound"] = c.margin_upper_bound;
  d["iterations"] = c.iterations;
  d["note"] = c.note;
  if (c.status == SolveStatus::kFeasible) {
    d["K"] = c.K;
    d["P"] = c.P;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Online data-driven adaptive control for LTV systems";
  m.attr("__version__") = ODDAC_VERSION;

  py::register_exception<Error>(m, "OddacError", PyExc_ValueError);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_readonly("horizon", &Scenario::horizon)
      .def_readonly("x0", &Scenario::x0)
      .def_property_readonly("lipschitz", [](const Scenario& s) { return s.cfg.L; })
      .def_property_readonly("T", [](const Scenario& s) { return s.cfg.T; })
      .def_property_readonly("v_bar", [](const Scenario& s) { return s.cfg.v_bar; })
      .def("A", [](const Scenario& s, int t) { return s.plant->A(t); })
      .def("B", [](const Scenario& s, int t) { return s.plant->B(t); })
      .def("to_json", &scenario_to_json)
      .def("hash", &scenario_hash)
      .def("__repr__", [](const Scenario& s) { return "<Scenario " + s.name + ">"; });

  m.def("load_scenario", &resolve_scenario, py::arg("source"),
        "paper-ltv, paper-lti or a JSON file path");
  m.def("scenario_from_json", &scenario_from_json, py::arg("text"));

  py::class_<RunResult>(m, "RunResult")
      .def_property_readonly("states", [](const RunResult& r) { return stack_rows(r.log, false); })
      .def_property_readonly("inputs", [](const RunResult& r) { return stack_rows(r.log, true); })
      .def_property_readonly("norm_x",
                             [](const RunResult& r) {
                               std::vector<double> v;
                               for (const auto& row : r.log.rows) v.push_back(row.norm_x);
                               return v;
                             })
      .def_property_readonly("modes",
                             [](const RunResult& r) {
                               std::vector<std::string> v;
                               for (const auto& row : r.log.rows) v.push_back(row.mode);
                               return v;
                             })
      .def_property_readonly("updates",
                             [](const RunResult& r) {
                               py::list out;
                               for (const auto& u : r.updates) {
                                 py::dict d = certificate_dict(u.cert);
                                 d["time"] = u.time;
                                 d["accepted"] = u.accepted;
                                 out.append(d);
                               }
                               return out;
                             })
      .def("csv", [](const RunResult& r) {
        std::ostringstream os;
        write_csv(r.log, os);
        return os.str();
      });

  m.def(
      "run",
      [](Scenario sc, std::optional<std::string> mode, std::optional<std::uint64_t> seed) {
        if (mode) sc.mode = parse_run_mode(*mode);
        if (seed) sc.cfg.seed = *seed;
        py::gil_scoped_release release;
        return run(sc);
      },
      py::arg("scenario"), py::arg("mode") = py::none(), py::arg("seed") = py::none());

  m.def(
      "analyze",
      [](const Scenario& sc, const RunResult& r) {
        const StabilityReport rep = analyze(r.log, r.updates, *sc.plant, sc.cfg);
        py::dict d;
        d["passed"] = rep.passed();
        d["violations"] = rep.violations.size();
        d["B_bar"] = rep.B_bar;
        d["mu"] = rep.mu;
        d["initial_gain_margin"] = rep.initial_gain_margin;
        d["report"] = format_report(rep);
        return d;
      },
      py::arg("scenario"), py::arg("result"));

  m.def(
      "solve_window",
      [](const Scenario& sc, const Eigen::MatrixXd& X, const Eigen::MatrixXd& U,
         const Eigen::MatrixXd& X_plus) {
        if (X.cols() != U.cols() || X.cols() != X_plus.cols() || X.rows() != X_plus.rows()) {
          throw DimensionError("X, U, X_plus need matching shapes (one column per sample)");
        }
        DataWindow w(static_cast<int>(X.cols()), 0);
        for (Eigen::Index j = 0; j < X.cols(); ++j) w.push_sample(X.col(j), U.col(j), X_plus.col(j));
        const DataMatrices d = build_data_matrices(w, sc.cfg.L);
        const auto prog =
            build_gain_program(sc.cfg, d.scaled(data_normalization(d)), sc.cfg.Q0, sc.cfg.K0);
        return certificate_dict(solve(*prog, *backend_from_env()));
      },
      py::arg("scenario"), py::arg("X"), py::arg("U"), py::arg("X_plus"));

  m.def("estimate_lipschitz", [](const Scenario& sc) { return estimate_lipschitz(*sc.plant); });
  m.def("check_dwell", &check_dwell, py::arg("mu"), py::arg("lambda_"), py::arg("T"));
}
