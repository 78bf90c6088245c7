#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "netflow/evolution.hpp"
#include "netflow/graph.hpp"
#include "netflow/schedule.hpp"

namespace netflow {

/// A hypothesis of the asymptotic theory (stochasticity, strong
/// connectivity of G_t) does not hold.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Number of eigenvalues with |lambda| >= 1 - eps, with multiplicity.
/// Throws HypothesisError if a column sum deviates from 1 by more than 1e-9.
int peripheral_count(const Eigen::MatrixXd& a, double eps = 1e-6);

std::uint64_t pattern_hash(const Pattern& p);

struct PeriodSample {
  double time = 0.0;
  std::uint64_t pattern_hash = 0;
  int cyclic_index = 0;
  int peripheral_count = 0;
  /// The full m x m pattern is reducible (edges without inflow were dropped).
  bool reducible_full_pattern = false;
};

struct DistinctPattern {
  std::uint64_t hash = 0;
  Pattern pattern;
  std::vector<int> active_edges;  // 1-based edges of G_t
  int cyclic_index = 0;
  std::vector<double> times;
};

struct PeriodReport {
  std::vector<PeriodSample> samples;
  std::vector<DistinctPattern> patterns;
  int tau = 1;
};

/// 64 equispaced times in [0, 1) together with the zeros of every trig
/// factor and refined near-zeros of every entry.
std::vector<double> default_sample_times(const TimeVaryingMatrix& m, std::size_t equispaced = 64,
                                         double zero_tol = 1e-12);

/// tau = lcm over sample times of the cyclic index of G_t, where G_t keeps
/// the edges that receive inflow at time t. Throws HypothesisError if some
/// G_t is not strongly connected.
PeriodReport asymptotic_period(const TimeVaryingMatrix& m, const std::vector<double>& sample_times,
                               double zero_tol = 1e-12, double eigen_eps = 1e-6);

/// If the support never leaves the static adjacency, the period is the
/// cyclic index of the static network; otherwise nothing.
std::optional<int> strictly_positive_shortcut(const TimeVaryingMatrix& m, const std::vector<double>& sample_times,
                                              double zero_tol = 1e-12);

struct ConvergencePoint {
  double elapsed = 0.0;
  double delta = 0.0;
};

struct ConvergenceTrace {
  std::vector<ConvergencePoint> points;
  /// Least-squares rate of log(delta) decay; empty if fewer than two points
  /// are above the roundoff floor.
  std::optional<double> rate;
  int tau = 1;
};

/// delta(t) = || u(t + tau) - u(t) ||_1 for t = s, s + stride, ..., s + horizon.
ConvergenceTrace convergence_diagnostic(const TimeVaryingMatrix& m, const InitialData& f, double s, int tau,
                                        double horizon, std::size_t n, double stride);

/// `t,delta` rows; t is elapsed time.
void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace);

}  // namespace netflow
