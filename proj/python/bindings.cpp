#include <sstream>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "netflow/commands.hpp"
#include "netflow/evolution.hpp"
#include "netflow/expr.hpp"
#include "netflow/graph.hpp"
#include "netflow/scenario.hpp"
#include "netflow/spectral.hpp"

namespace py = pybind11;

namespace {

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

netflow::cli::Options options(std::optional<std::size_t> grid, bool force) {
  netflow::cli::Options o;
  o.resolution = grid;
  o.force = force;
  return o;
}

}  // namespace

PYBIND11_MODULE(_netflow, m) {
  m.doc() = "Linear transport flows on networks with time-periodic weights";

  py::register_exception<netflow::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<netflow::ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<netflow::GraphError>(m, "GraphError", PyExc_ValueError);
  py::register_exception<netflow::HypothesisError>(m, "HypothesisError", PyExc_RuntimeError);

  py::class_<netflow::Expr>(m, "Expr")
      .def("__call__", &netflow::Expr::operator(), py::arg("value"))
      .def("__str__", [](const netflow::Expr& e) { return netflow::to_string(e); })
      .def("__repr__", [](const netflow::Expr& e) { return "Expr('" + netflow::to_string(e) + "')"; })
      .def("__eq__", [](const netflow::Expr& a, const netflow::Expr& b) { return a == b; })
      .def_property_readonly("is_one_periodic", [](const netflow::Expr& e) { return netflow::is_one_periodic(e); });

  m.def("parse_expr", [](const std::string& src, char variable) { return netflow::parse_expr(src, variable); },
        py::arg("source"), py::arg("variable") = 't');

  py::class_<netflow::NetworkGraph>(m, "NetworkGraph")
      .def_property_readonly("n", &netflow::NetworkGraph::vertex_count)
      .def_property_readonly("m", &netflow::NetworkGraph::edge_count)
      .def_property_readonly("phi_minus", &netflow::NetworkGraph::phi_minus)
      .def_property_readonly("phi_plus", &netflow::NetworkGraph::phi_plus)
      .def("line_graph_adjacency", [](const netflow::NetworkGraph& g) { return netflow::line_graph_adjacency(g).b; });

  m.def("build_graph", &netflow::build_graph, py::arg("edges"), py::arg("n"));
  m.def("is_strongly_connected", py::overload_cast<const netflow::Pattern&>(&netflow::is_strongly_connected),
        py::arg("pattern"));
  m.def("cyclic_index", py::overload_cast<const netflow::Pattern&>(&netflow::cyclic_index), py::arg("pattern"));
  m.def("peripheral_count", &netflow::peripheral_count, py::arg("matrix"), py::arg("eps") = 1e-6);

  py::class_<netflow::Scenario>(m, "Scenario")
      .def_property_readonly("m", [](const netflow::Scenario& s) { return s.graph.edge_count(); })
      .def_property_readonly("start", [](const netflow::Scenario& s) { return s.start; })
      .def_property_readonly("resolution", [](const netflow::Scenario& s) { return s.resolution; })
      .def("matrix_at", [](const netflow::Scenario& s, double t) { return s.matrix.at(t); }, py::arg("t"))
      .def("evaluate", [](const netflow::Scenario& s, double t, double x) {
             return netflow::evaluate_evolution(s.matrix, s.initial, s.start, t, x);
           }, py::arg("t"), py::arg("x"))
      .def("propagate", [](const netflow::Scenario& s, double t, std::optional<std::size_t> n) {
             return netflow::propagate(s.matrix, s.initial, s.start, t, n.value_or(s.resolution)).values;
           }, py::arg("t"), py::arg("n") = py::none())
      .def("oracle", [](const netflow::Scenario& s, double t, std::size_t n, double dt) {
             return netflow::oracle_characteristics(s.matrix, s.initial, s.start, t, n, dt).values;
           }, py::arg("t"), py::arg("n"), py::arg("dt"))
      .def("validate", [](const netflow::Scenario& s) {
             return to_python(netflow::cli::validate(s, {}).report);
           })
      .def("period", [](const netflow::Scenario& s, bool force) {
             const auto r = netflow::cli::period(s, options(std::nullopt, force));
             if (r.exit_code != 0) throw netflow::HypothesisError(r.report.value("error", "period failed"));
             return to_python(r.report);
           }, py::arg("force") = false)
      .def("simulate", [](const netflow::Scenario& s, double t_end, std::optional<std::size_t> n, bool force) {
             std::ostringstream csv;
             const auto r = netflow::cli::simulate(s, t_end, csv, options(n, force));
             if (r.exit_code != 0) throw std::invalid_argument(r.report.dump());
             return py::make_tuple(to_python(r.report), csv.str());
           }, py::arg("t_end"), py::arg("n") = py::none(), py::arg("force") = false)
      .def("converge", [](const netflow::Scenario& s, int tau, double horizon, double stride,
                          std::optional<std::size_t> n) {
             const auto trace = netflow::convergence_diagnostic(s.matrix, s.initial, s.start, tau, horizon,
                                                                n.value_or(s.resolution), stride);
             py::list points;
             for (const auto& p : trace.points) points.append(py::make_tuple(p.elapsed, p.delta));
             return points;
           }, py::arg("tau"), py::arg("horizon"), py::arg("stride") = 0.5, py::arg("n") = py::none());

  m.def("load_scenario", [](const std::string& path) { return netflow::load_scenario(path); }, py::arg("path"));
  m.def("parse_scenario", [](const std::string& text) {
    return netflow::parse_scenario(nlohmann::json::parse(text));
  }, py::arg("json_text"));
}
