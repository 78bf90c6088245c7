#include "netflow/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace netflow {

namespace {

std::string key_name(IndexPair key) { return "(" + std::to_string(key.first) + "," + std::to_string(key.second) + ")"; }

}  // namespace

double reduce_period(double t) {
  double r = t - std::floor(t);
  if (r >= 1.0) r = 0.0;
  return r;
}

TimeVaryingMatrix::TimeVaryingMatrix(Pattern structure, std::vector<std::optional<Expr>> entries, MatrixKind kind,
                                     bool allow_nonperiodic)
    : dim_(static_cast<std::size_t>(structure.rows())),
      structure_(std::move(structure)),
      entries_(std::move(entries)),
      kind_(kind),
      periodic_(true) {
  if (structure_.rows() != structure_.cols() || dim_ == 0) throw ScheduleError("matrix structure must be square");
  if (entries_.size() != dim_ * dim_) throw ScheduleError("entry count does not match dimension");
  for (std::size_t k = 0; k < dim_; ++k) {
    for (std::size_t l = 0; l < dim_; ++l) {
      const auto& e = entries_[k * dim_ + l];
      if (!e) continue;
      if (structure_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) == 0) {
        throw ScheduleError("entry " + key_name({static_cast<int>(k + 1), static_cast<int>(l + 1)}) +
                            " lies outside the network's line-graph adjacency");
      }
      if (!is_one_periodic(*e)) {
        if (!allow_nonperiodic) {
          throw ScheduleError("entry " + key_name({static_cast<int>(k + 1), static_cast<int>(l + 1)}) + " '" +
                              to_string(*e) + "' is not structurally 1-periodic");
        }
        periodic_ = false;
      }
    }
  }
}

Eigen::MatrixXd TimeVaryingMatrix::at(double t) const {
  const double tau = periodic_ ? reduce_period(t) : t;
  const auto n = static_cast<Eigen::Index>(dim_);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < dim_; ++k)
    for (std::size_t l = 0; l < dim_; ++l)
      if (const auto& e = entries_[k * dim_ + l])
        out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = (*e)(tau);
  return out;
}

std::vector<double> TimeVaryingMatrix::trig_zero_times() const {
  std::vector<double> all;
  for (const auto& e : entries_) {
    if (!e) continue;
    const auto z = netflow::trig_zero_times(*e);
    all.insert(all.end(), z.begin(), z.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }),
            all.end());
  return all;
}

TimeVaryingMatrix assemble_weighted_adjacency(const NetworkGraph& g, const std::map<IndexPair, Expr>& weights,
                                              bool allow_nonperiodic) {
  const auto m = static_cast<std::size_t>(g.edge_count());
  std::vector<std::optional<Expr>> entries(m * m);
  for (const auto& [key, w] : weights) {
    const auto [vertex, edge] = key;
    if (vertex < 1 || vertex > g.vertex_count() || edge < 1 || edge > g.edge_count() ||
        g.phi_minus()(vertex - 1, edge - 1) == 0) {
      throw ScheduleError("weight " + key_name(key) + " given for a vertex that is not the tail of the edge");
    }
    // Row `edge` receives weight w from every edge k ending in `vertex`.
    for (std::size_t k = 0; k < m; ++k) {
      if (g.edges()[k].head == vertex) entries[static_cast<std::size_t>(edge - 1) * m + k] = w;
    }
  }
  return TimeVaryingMatrix(line_graph_adjacency(g).b, std::move(entries), MatrixKind::Flow, allow_nonperiodic);
}

TimeVaryingMatrix assemble_allocation(const LineGraphAdjacency& b, const std::map<IndexPair, Expr>& entries,
                                      bool allow_nonperiodic) {
  const auto m = static_cast<std::size_t>(b.b.rows());
  std::vector<std::optional<Expr>> slots(m * m);
  for (const auto& [key, e] : entries) {
    const auto [k, l] = key;
    if (k < 1 || l < 1 || static_cast<std::size_t>(k) > m || static_cast<std::size_t>(l) > m) {
      throw ScheduleError("allocation entry " + key_name(key) + " is out of range");
    }
    if (b.b(k - 1, l - 1) == 0) {
      throw ScheduleError("support violation: allocation entry " + key_name(key) +
                          " routes between edges that do not meet at a vertex");
    }
    slots[static_cast<std::size_t>(k - 1) * m + static_cast<std::size_t>(l - 1)] = e;
  }
  return TimeVaryingMatrix(b.b, std::move(slots), MatrixKind::Allocation, allow_nonperiodic);
}

TimeVaryingMatrix embed_junctions(const LineGraphAdjacency& b, const std::vector<JunctionAllocation>& junctions,
                                  bool allow_nonperiodic) {
  const auto m = static_cast<int>(b.b.rows());
  std::vector<int> owner(static_cast<std::size_t>(m), -1);
  std::vector<std::optional<Expr>> slots(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));

  for (std::size_t jn = 0; jn < junctions.size(); ++jn) {
    const auto& junction = junctions[jn];
    const std::string name = "junction " + std::to_string(jn + 1);
    if (junction.incoming.empty() || junction.outgoing.empty()) throw ScheduleError(name + " has no edges");
    if (junction.entries.size() != junction.incoming.size()) {
      throw ScheduleError(name + ": matrix needs one row per incoming edge");
    }
    std::set<int> outgoing;
    for (int k : junction.outgoing) {
      if (k < 1 || k > m) throw ScheduleError(name + ": outgoing edge " + std::to_string(k) + " out of range");
      if (!outgoing.insert(k).second) throw ScheduleError(name + ": outgoing edge " + std::to_string(k) + " repeated");
    }
    for (std::size_t i = 0; i < junction.incoming.size(); ++i) {
      const int l = junction.incoming[i];
      if (l < 1 || l > m) throw ScheduleError(name + ": incoming edge " + std::to_string(l) + " out of range");
      auto& own = owner[static_cast<std::size_t>(l - 1)];
      if (own >= 0) {
        throw ScheduleError("edge " + std::to_string(l) + " is incoming at junctions " + std::to_string(own + 1) +
                            " and " + std::to_string(jn + 1));
      }
      own = static_cast<int>(jn);
      std::set<int> successors;
      for (int k = 1; k <= m; ++k)
        if (b.b(k - 1, l - 1) != 0) successors.insert(k);
      if (successors != outgoing) {
        throw ScheduleError(name + ": outgoing edges do not match the edges leaving the head of edge " +
                            std::to_string(l));
      }
      const auto& row = junction.entries[i];
      if (row.size() != junction.outgoing.size()) {
        throw ScheduleError(name + ": matrix row " + std::to_string(i + 1) + " needs one entry per outgoing edge");
      }
      for (std::size_t j = 0; j < row.size(); ++j) {
        const int k = junction.outgoing[j];
        slots[static_cast<std::size_t>(k - 1) * static_cast<std::size_t>(m) + static_cast<std::size_t>(l - 1)] =
            row[j];
      }
    }
  }
  for (int l = 0; l < m; ++l) {
    if (owner[static_cast<std::size_t>(l)] < 0) {
      throw ScheduleError("edge " + std::to_string(l + 1) + " is not incoming at any junction");
    }
  }
  return TimeVaryingMatrix(b.b, std::move(slots), MatrixKind::Allocation, allow_nonperiodic);
}

std::vector<double> junction_row_sums(const JunctionAllocation& junction, double t) {
  std::vector<double> sums;
  for (const auto& row : junction.entries) {
    double s = 0.0;
    for (const auto& e : row)
      if (e) s += (*e)(t);
    sums.push_back(s);
  }
  return sums;
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::vector<double> uniform_grid(std::size_t count) {
  if (count < 2) return {0.0};
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) grid[k] = static_cast<double>(k) / static_cast<double>(count - 1);
  return grid;
}

ValidationReport validate_stochastic(const TimeVaryingMatrix& m, const std::vector<double>& grid, double tol) {
  if (grid.empty()) throw std::invalid_argument("validation grid is empty");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

  CheckResult negativity{"nonnegativity", true, 0.0, std::nullopt};
  CheckResult sums{"column_sums", true, 0.0, std::nullopt};
  for (double t : grid) {
    const Eigen::MatrixXd a = m.at(t);
    for (Eigen::Index l = 0; l < a.cols(); ++l) {
      for (Eigen::Index k = 0; k < a.rows(); ++k) {
        const double v = a(k, l);
        if (-v > negativity.worst || !negativity.witness) {
          negativity.worst = std::max(negativity.worst, -v);
          negativity.witness =
              Witness{t, static_cast<std::size_t>(k + 1), static_cast<std::size_t>(l + 1), v};
        }
      }
      const double s = a.col(l).sum();
      const double dev = std::abs(s - 1.0);
      if (dev > sums.worst || !sums.witness || std::isnan(dev)) {
        sums.worst = std::isnan(dev) ? INFINITY : std::max(sums.worst, dev);
        sums.witness = Witness{t, 0, static_cast<std::size_t>(l + 1), s};
      }
    }
  }
  negativity.passed = negativity.worst <= tol;
  sums.passed = sums.worst <= tol;
  return {{negativity, sums}, grid};
}

Pattern support_pattern(const TimeVaryingMatrix& m, double t, double zero_tol) {
  const Eigen::MatrixXd a = m.at(t);
  return (a.array().abs() > zero_tol).cast<int>();
}

double regularity_diagnostic(const TimeVaryingMatrix& m, const std::vector<double>& grid) {
  if (grid.size() < 2) throw std::invalid_argument("regularity grid needs at least two points");
  Eigen::MatrixXd variation = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.dim()), static_cast<Eigen::Index>(m.dim()));
  Eigen::MatrixXd prev = m.at(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    Eigen::MatrixXd cur = m.at(grid[i]);
    variation += (cur - prev).cwiseAbs();
    prev = std::move(cur);
  }
  return variation.maxCoeff();
}

}  // namespace netflow
