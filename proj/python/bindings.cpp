#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hoferlab/errors.hpp"
#include "hoferlab/experiments.hpp"
#include "hoferlab/expr.hpp"
#include "hoferlab/flow.hpp"
#include "hoferlab/hofer.hpp"
#include "hoferlab/orbits.hpp"

namespace py = pybind11;
using namespace hoferlab;

namespace {

Surface surface(const std::string& kind, double area) {
  if (kind == "plane") return Surface::plane();
  if (kind == "torus") return Surface::torus(area > 0 ? area : 1.0);
  if (kind == "sphere") return Surface::sphere(area > 0 ? area : 4.0 * M_PI);
  throw Error(ErrorKind::SchemaError, "unknown surface kind '" + kind + "'");
}

HamiltonianPath path(const std::string& text, const std::string& kind, double area,
                     const std::optional<std::vector<double>>& box) {
  const Surface s = surface(kind, area);
  if (!box) return HamiltonianPath::parse(s, text);
  if (box->size() != 4) throw Error(ErrorKind::SchemaError, "box must be [x0, x1, y0, y1]");
  return HamiltonianPath::parse(s, text, Box{(*box)[0], (*box)[1], (*box)[2], (*box)[3]});
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "hoferlab native core";
  m.attr("__version__") = HOFERLAB_VERSION;

  py::register_exception<Error>(m, "HoferlabError", PyExc_RuntimeError);

  m.def("canonical", [](const std::string& s) { return expr::print(expr::parse(s)); },
        "Canonical text of a DSL expression.");
  m.def("evaluate", [](const std::string& s, double x, double y, double z, double t) {
    return expr::ScalarField::parse(s).value({x, y, z, t});
  }, py::arg("text"), py::arg("x") = 0.0, py::arg("y") = 0.0, py::arg("z") = 0.0, py::arg("t") = 0.0);

  m.def("length", [](const std::string& text, const std::string& kind, double area,
                     const std::optional<std::vector<double>>& box) { return length(path(text, kind, area, box)); },
        py::arg("text"), py::arg("surface") = "plane", py::arg("area") = 0.0, py::arg("box") = py::none());
  m.def("calabi", [](const std::string& text, const std::optional<std::vector<double>>& box) {
    return calabi(path(text, "plane", 0.0, box)).value;
  }, py::arg("text"), py::arg("box") = py::none());
  m.def("flow_point", [](const std::string& text, std::vector<double> x0, double t1, const std::string& kind,
                         double area) {
    x0.resize(3, 0.0);
    const Eigen::Vector3d y = flow_point(path(text, kind, area, std::nullopt), {x0[0], x0[1], x0[2]}, 0.0, t1);
    return std::vector<double>{y.x(), y.y(), y.z()};
  }, py::arg("text"), py::arg("x0"), py::arg("t1") = 1.0, py::arg("surface") = "plane", py::arg("area") = 0.0);
  m.def("minimal_period", [](const std::string& text, std::vector<double> x0, double horizon,
                             const std::optional<std::vector<double>>& box) {
    x0.resize(3, 0.0);
    ReturnOptions o;
    o.horizon = horizon;
    return minimal_positive_period(path(text, "plane", 0.0, box), {x0[0], x0[1], x0[2]}, o);
  }, py::arg("text"), py::arg("x0"), py::arg("horizon") = 2.0, py::arg("box") = py::none());

  m.def("experiment_names", &experiment_names);
  m.def("experiment_description", &experiment_description);
  m.def("run_experiment_json", [](const std::string& name, int grid, std::optional<double> tol) {
    ExperimentOptions o;
    o.grid = grid;
    o.tol = tol;
    py::gil_scoped_release release;
    return run_experiment(name, o).to_json().dump();
  }, py::arg("name"), py::arg("grid") = 0, py::arg("tol") = py::none());
  m.def("run_scenario_json", [](const std::string& text) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::SchemaError, e.what());
    }
    py::gil_scoped_release release;
    return reports_json(run_scenario(j));
  });
}
