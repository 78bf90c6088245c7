#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "netflow/expr.hpp"
#include "netflow/graph.hpp"

namespace netflow {

class ScheduleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class MatrixKind { Flow, Allocation };

/// 1-based (row, column) or (vertex, edge) key.
using IndexPair = std::pair<int, int>;

/// Square matrix of weight expressions over the edges of a network, with
/// the static line-graph adjacency it must stay inside.
class TimeVaryingMatrix {
 public:
  /// Throws ScheduleError if an entry lies outside `structure` or, unless
  /// `allow_nonperiodic`, is not structurally 1-periodic.
  TimeVaryingMatrix(Pattern structure, std::vector<std::optional<Expr>> entries, MatrixKind kind,
                    bool allow_nonperiodic = false);

  std::size_t dim() const { return dim_; }
  MatrixKind kind() const { return kind_; }
  bool periodic() const { return periodic_; }
  const Pattern& structure() const { return structure_; }

  /// 0-based access; empty means the zero expression.
  const std::optional<Expr>& entry(std::size_t row, std::size_t col) const { return entries_[row * dim_ + col]; }

  /// Numeric matrix at time t. Periodic matrices are evaluated at t mod 1.
  Eigen::MatrixXd at(double t) const;

  /// Sorted zeros in [0, 1) of trig factors appearing in any entry.
  std::vector<double> trig_zero_times() const;

 private:
  std::size_t dim_;
  Pattern structure_;
  std::vector<std::optional<Expr>> entries_;
  MatrixKind kind_;
  bool periodic_;
};

/// Representative of t in [0, 1).
double reduce_period(double t);

/// B_w(t) = (Phi_w^-(t))^T Phi^+ from per-(vertex, outgoing edge) weights.
TimeVaryingMatrix assemble_weighted_adjacency(const NetworkGraph& g, const std::map<IndexPair, Expr>& weights,
                                              bool allow_nonperiodic = false);

/// Network allocation matrix from per-(outgoing edge k, incoming edge l) entries.
TimeVaryingMatrix assemble_allocation(const LineGraphAdjacency& b, const std::map<IndexPair, Expr>& entries,
                                      bool allow_nonperiodic = false);

struct JunctionAllocation {
  std::vector<int> incoming;  // 1-based edge indices, p of them
  std::vector<int> outgoing;  // q of them
  /// p x q; entries[i][j] routes incoming[i] into outgoing[j]. Empty = 0.
  std::vector<std::vector<std::optional<Expr>>> entries;
};

/// Places the transpose of every junction matrix into the network allocation matrix.
TimeVaryingMatrix embed_junctions(const LineGraphAdjacency& b, const std::vector<JunctionAllocation>& junctions,
                                  bool allow_nonperiodic = false);

/// Row sums of a junction matrix at time t.
std::vector<double> junction_row_sums(const JunctionAllocation& junction, double t);

struct Witness {
  double time = 0.0;
  std::size_t row = 0;  // 1-based; 0 when not applicable
  std::size_t col = 0;  // 1-based
  double value = 0.0;
};

struct CheckResult {
  std::string name;
  bool passed = true;
  double worst = 0.0;
  std::optional<Witness> witness;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  std::vector<double> grid;

  bool passed() const;
};

/// k / (count - 1) for k = 0 .. count - 1.
std::vector<double> uniform_grid(std::size_t count);

/// Nonnegativity and unit column sums at every grid time.
ValidationReport validate_stochastic(const TimeVaryingMatrix& m, const std::vector<double>& grid, double tol);

/// 1 where |M(t)(k, l)| > zero_tol.
Pattern support_pattern(const TimeVaryingMatrix& m, double t, double zero_tol = 1e-12);

/// max over entries of the discrete total variation along `grid`.
double regularity_diagnostic(const TimeVaryingMatrix& m, const std::vector<double>& grid);

}  // namespace netflow
