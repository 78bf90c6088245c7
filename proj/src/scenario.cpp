#include "netflow/scenario.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>

namespace netflow {

ScenarioError::ScenarioError(std::string pointer, const std::string& message)
    : std::runtime_error((pointer.empty() ? std::string("/") : pointer) + ": " + message), pointer_(std::move(pointer)) {}

namespace {

using nlohmann::json;

std::string escape(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

const json& require(const json& obj, const std::string& key, const std::string& at) {
  if (!obj.contains(key)) throw ScenarioError(at, "missing required key '" + key + "'");
  return obj.at(key);
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& at) {
  if (!obj.is_object()) throw ScenarioError(at, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ScenarioError(at + "/" + escape(key), "unknown key '" + key + "'");
  }
}

int as_int(const json& v, const std::string& at) {
  if (!v.is_number_integer()) throw ScenarioError(at, "expected an integer");
  return v.get<int>();
}

double as_double(const json& v, const std::string& at) {
  if (!v.is_number()) throw ScenarioError(at, "expected a number");
  return v.get<double>();
}

std::size_t as_count(const json& v, const std::string& at) {
  if (!v.is_number_integer() || v.get<long long>() < 1) throw ScenarioError(at, "expected a positive integer");
  return v.get<std::size_t>();
}

Expr as_expr(const json& v, const std::string& at, char variable) {
  if (v.is_number()) {
    const double d = v.get<double>();
    return d < 0 ? Expr::unary(UnaryOp::Neg, Expr::number(-d)) : Expr::number(d);
  }
  if (!v.is_string()) throw ScenarioError(at, "expected an expression string");
  try {
    return parse_expr(v.get<std::string>(), variable);
  } catch (const ParseError& e) {
    throw ScenarioError(at, e.what());
  }
}

IndexPair parse_key(const std::string& key, const std::string& at) {
  const auto comma = key.find(',');
  if (comma == std::string::npos) throw ScenarioError(at, "key '" + key + "' must have the form \"a,b\"");
  auto parse_part = [&](std::string_view part) {
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size()) {
      throw ScenarioError(at, "key '" + key + "' must have the form \"a,b\"");
    }
    return v;
  };
  const std::string_view view(key);
  return {parse_part(view.substr(0, comma)), parse_part(view.substr(comma + 1))};
}

NetworkGraph parse_graph(const json& doc) {
  const json& g = require(doc, "graph", "");
  check_keys(g, {"n", "edges"}, "/graph");
  const int n = as_int(require(g, "n", "/graph"), "/graph/n");
  if (n < 1) throw ScenarioError("/graph/n", "need at least one vertex");
  const json& edges = require(g, "edges", "/graph");
  if (!edges.is_array() || edges.empty()) throw ScenarioError("/graph/edges", "expected a nonempty array");
  std::vector<Edge> list;
  for (std::size_t j = 0; j < edges.size(); ++j) {
    const std::string at = "/graph/edges/" + std::to_string(j);
    const json& e = edges[j];
    if (!e.is_array() || e.size() != 2) throw ScenarioError(at, "expected [tail, head]");
    const int tail = as_int(e[0], at + "/0");
    const int head = as_int(e[1], at + "/1");
    if (tail < 1 || tail > n) throw ScenarioError(at + "/0", "unknown vertex " + std::to_string(tail));
    if (head < 1 || head > n) throw ScenarioError(at + "/1", "unknown vertex " + std::to_string(head));
    list.push_back({tail, head});
  }
  return NetworkGraph(n, std::move(list));
}

std::vector<JunctionAllocation> parse_junctions(const json& arr, const NetworkGraph& graph) {
  if (!arr.is_array() || arr.empty()) throw ScenarioError("/junctions", "expected a nonempty array");
  std::vector<JunctionAllocation> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string at = "/junctions/" + std::to_string(i);
    const json& jn = arr[i];
    check_keys(jn, {"vertex", "in", "out", "matrix"}, at);
    const int vertex = as_int(require(jn, "vertex", at), at + "/vertex");
    if (vertex < 1 || vertex > graph.vertex_count()) {
      throw ScenarioError(at + "/vertex", "unknown vertex " + std::to_string(vertex));
    }
    JunctionAllocation junction;
    for (const char* side : {"in", "out"}) {
      const json& list = require(jn, side, at);
      const std::string list_at = at + "/" + side;
      if (!list.is_array() || list.empty()) throw ScenarioError(list_at, "expected a nonempty array of edges");
      for (std::size_t k = 0; k < list.size(); ++k) {
        const std::string edge_at = list_at + "/" + std::to_string(k);
        const int edge = as_int(list[k], edge_at);
        if (edge < 1 || edge > graph.edge_count()) throw ScenarioError(edge_at, "unknown edge " + std::to_string(edge));
        const Edge& e = graph.edges()[static_cast<std::size_t>(edge - 1)];
        const bool incoming = side[0] == 'i';
        if ((incoming ? e.head : e.tail) != vertex) {
          throw ScenarioError(edge_at, "edge " + std::to_string(edge) + (incoming ? " does not end" : " does not start") +
                                           " at vertex " + std::to_string(vertex));
        }
        (incoming ? junction.incoming : junction.outgoing).push_back(edge);
      }
    }
    const json& matrix = require(jn, "matrix", at);
    if (!matrix.is_array() || matrix.size() != junction.incoming.size()) {
      throw ScenarioError(at + "/matrix", "expected one row per incoming edge");
    }
    for (std::size_t r = 0; r < matrix.size(); ++r) {
      const std::string row_at = at + "/matrix/" + std::to_string(r);
      if (!matrix[r].is_array() || matrix[r].size() != junction.outgoing.size()) {
        throw ScenarioError(row_at, "expected one entry per outgoing edge");
      }
      std::vector<std::optional<Expr>> row;
      for (std::size_t c = 0; c < matrix[r].size(); ++c) {
        Expr e = as_expr(matrix[r][c], row_at + "/" + std::to_string(c), 't');
        const bool zero = !e.depends_on_variable() && e(0.0) == 0.0;
        row.push_back(zero ? std::nullopt : std::optional<Expr>(std::move(e)));
      }
      junction.entries.push_back(std::move(row));
    }
    out.push_back(std::move(junction));
  }
  return out;
}

InitialData parse_initial(const json& doc, int m) {
  std::vector<Profile> profiles(static_cast<std::size_t>(m), Expr());
  if (!doc.contains("initial")) return InitialData(std::move(profiles));
  const json& init = doc.at("initial");
  if (!init.is_object()) throw ScenarioError("/initial", "expected an object keyed by edge");
  for (const auto& [key, value] : init.items()) {
    const std::string at = "/initial/" + escape(key);
    int edge = 0;
    const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), edge);
    if (ec != std::errc() || ptr != key.data() + key.size() || edge < 1 || edge > m) {
      throw ScenarioError(at, "unknown edge '" + key + "'");
    }
    auto& slot = profiles[static_cast<std::size_t>(edge - 1)];
    if (value.is_object()) {
      check_keys(value, {"breaks", "values"}, at);
      try {
        slot = PiecewiseConstant(require(value, "breaks", at).get<std::vector<double>>(),
                                 require(value, "values", at).get<std::vector<double>>());
      } catch (const json::exception& e) {
        throw ScenarioError(at, std::string("expected numeric arrays: ") + e.what());
      } catch (const std::invalid_argument& e) {
        throw ScenarioError(at, e.what());
      }
    } else {
      slot = as_expr(value, at, 'x');
    }
  }
  return InitialData(std::move(profiles));
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  check_keys(doc, {"name", "description", "graph", "mode", "weights", "junctions", "initial", "s", "N",
                   "validation_grid", "period_samples", "tolerances", "allow_nonperiodic"},
             "");
  NetworkGraph graph = [&] {
    try {
      return parse_graph(doc);
    } catch (const GraphError& e) {
      throw ScenarioError("/graph", e.what());
    }
  }();
  const LineGraphAdjacency b = line_graph_adjacency(graph);

  const json& mode_value = require(doc, "mode", "");
  if (!mode_value.is_string()) throw ScenarioError("/mode", "expected \"flow\" or \"atf\"");
  const std::string mode_name = mode_value.get<std::string>();
  if (mode_name != "flow" && mode_name != "atf") throw ScenarioError("/mode", "expected \"flow\" or \"atf\"");
  const MatrixKind mode = mode_name == "flow" ? MatrixKind::Flow : MatrixKind::Allocation;

  bool allow_nonperiodic = false;
  if (doc.contains("allow_nonperiodic")) {
    if (!doc["allow_nonperiodic"].is_boolean()) throw ScenarioError("/allow_nonperiodic", "expected a boolean");
    allow_nonperiodic = doc["allow_nonperiodic"].get<bool>();
  }

  std::vector<JunctionAllocation> junctions;
  std::optional<TimeVaryingMatrix> matrix;
  if (doc.contains("weights") && doc.contains("junctions")) {
    throw ScenarioError("/junctions", "give either weights or junctions, not both");
  }
  if (doc.contains("junctions")) {
    if (mode != MatrixKind::Allocation) throw ScenarioError("/junctions", "junction blocks require mode \"atf\"");
    junctions = parse_junctions(doc["junctions"], graph);
    try {
      matrix.emplace(embed_junctions(b, junctions, allow_nonperiodic));
    } catch (const ScheduleError& e) {
      throw ScenarioError("/junctions", e.what());
    }
  } else {
    const json& weights = require(doc, "weights", "");
    if (!weights.is_object()) throw ScenarioError("/weights", "expected an object");
    std::map<IndexPair, Expr> entries;
    for (const auto& [key, value] : weights.items()) {
      const std::string at = "/weights/" + escape(key);
      const IndexPair idx = parse_key(key, at);
      if (mode == MatrixKind::Flow) {
        if (idx.first < 1 || idx.first > graph.vertex_count()) throw ScenarioError(at, "unknown vertex in key '" + key + "'");
        if (idx.second < 1 || idx.second > graph.edge_count()) throw ScenarioError(at, "unknown edge in key '" + key + "'");
        if (graph.phi_minus()(idx.first - 1, idx.second - 1) == 0) {
          throw ScenarioError(at, "edge " + std::to_string(idx.second) + " does not leave vertex " +
                                      std::to_string(idx.first) + " (key '" + key + "')");
        }
      } else {
        if (idx.first < 1 || idx.first > graph.edge_count() || idx.second < 1 || idx.second > graph.edge_count()) {
          throw ScenarioError(at, "unknown edge in key '" + key + "'");
        }
        if (b.b(idx.first - 1, idx.second - 1) == 0) {
          throw ScenarioError(at, "edge " + std::to_string(idx.second) + " does not feed edge " +
                                      std::to_string(idx.first) + " (key '" + key + "')");
        }
      }
      entries.emplace(idx, as_expr(value, at, 't'));
    }
    try {
      matrix.emplace(mode == MatrixKind::Flow ? assemble_weighted_adjacency(graph, entries, allow_nonperiodic)
                                              : assemble_allocation(b, entries, allow_nonperiodic));
    } catch (const ScheduleError& e) {
      throw ScenarioError("/weights", e.what());
    }
  }

  InitialData initial = parse_initial(doc, graph.edge_count());

  Scenario scenario{std::move(graph), mode, std::move(*matrix), std::move(junctions), std::move(initial)};
  if (doc.contains("s")) scenario.start = as_double(doc["s"], "/s");
  if (doc.contains("N")) scenario.resolution = as_count(doc["N"], "/N");
  if (doc.contains("validation_grid")) scenario.validation_grid = as_count(doc["validation_grid"], "/validation_grid");
  if (doc.contains("period_samples")) scenario.period_samples = as_count(doc["period_samples"], "/period_samples");
  if (doc.contains("tolerances")) {
    const json& tol = doc["tolerances"];
    check_keys(tol, {"stochastic", "zero", "eigen"}, "/tolerances");
    if (tol.contains("stochastic")) scenario.tolerances.stochastic = as_double(tol["stochastic"], "/tolerances/stochastic");
    if (tol.contains("zero")) scenario.tolerances.zero = as_double(tol["zero"], "/tolerances/zero");
    if (tol.contains("eigen")) scenario.tolerances.eigen = as_double(tol["eigen"], "/tolerances/eigen");
  }
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

}  // namespace netflow
