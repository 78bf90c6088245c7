#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "netflow/expr.hpp"
#include "netflow/schedule.hpp"

namespace netflow {

/// Step profile on [0, 1]: values[i] holds on [breaks[i-1], breaks[i]).
/// Breaks are strictly increasing interior points; values.size() == breaks.size() + 1.
/// A point exactly on a break takes the right-hand value.
class PiecewiseConstant {
 public:
  PiecewiseConstant(std::vector<double> breaks, std::vector<double> values);

  double operator()(double x) const;
  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
};

using Profile = std::variant<Expr, PiecewiseConstant>;

/// Initial densities f_1..f_m on [0, 1].
class InitialData {
 public:
  /// One profile per edge; expressions are in the variable x.
  explicit InitialData(std::vector<Profile> profiles);
  /// Arbitrary vector-valued density, e.g. an already evolved state.
  InitialData(std::size_t m, std::function<Eigen::VectorXd(double)> fn);

  std::size_t size() const { return m_; }
  Eigen::VectorXd operator()(double x) const;

  /// Smallest component over the midpoint grid of resolution n.
  double min_on_grid(std::size_t n) const;

 private:
  std::size_t m_;
  std::function<Eigen::VectorXd(double)> fn_;
};

/// Samples u_j(x_r, t) at midpoints x_r = (r + 1/2) / N.
struct EdgeDensityField {
  std::size_t resolution = 0;
  Eigen::MatrixXd values;  // m x N
  double time = 0.0;
  double origin = 0.0;

  double x(std::size_t r) const { return (static_cast<double>(r) + 0.5) / static_cast<double>(resolution); }
};

struct MassReport {
  Eigen::VectorXd per_edge;
  double total = 0.0;
};

/// u(x, t) = M(t + x)^k f(x + t - s - k), k = floor(x + t - s).
Eigen::VectorXd evaluate_evolution(const TimeVaryingMatrix& m, const InitialData& f, double s, double t, double x);

/// evaluate_evolution at every midpoint of an N-cell grid.
EdgeDensityField propagate(const TimeVaryingMatrix& m, const InitialData& f, double s, double t, std::size_t n);

/// Midpoint-rule L1 masses.
MassReport l1_norm(const EdgeDensityField& u);

/// sup-norm of u(1 - eps, t) - M(t) u(eps, t).
double boundary_residual(const TimeVaryingMatrix& m, const InitialData& f, double s, double t, double eps);

/// Direct simulation of the transport equation on a fine grid of cell width
/// dt = 1 / (N q): every step moves the samples one cell toward x = 0 and
/// refills the cell at x = 1 from the boundary condition with M sampled at
/// the start of the step. First order in dt.
EdgeDensityField oracle_characteristics(const TimeVaryingMatrix& m, const InitialData& f, double s, double t,
                                        std::size_t n, double dt);

/// Initial data that evaluates U(t, s) f, for chaining evolutions.
InitialData evolved_state(const TimeVaryingMatrix& m, const InitialData& f, double s, double t);

/// CSV with header `edge,x,value,t,s`.
void write_field_csv(std::ostream& out, const EdgeDensityField& u);

}  // namespace netflow
