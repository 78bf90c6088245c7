#include "netflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "format.hpp"

namespace netflow {

int peripheral_count(const Eigen::MatrixXd& a, double eps) {
  if (a.rows() != a.cols() || a.rows() == 0) throw std::invalid_argument("matrix must be square and nonempty");
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2)");
  for (Eigen::Index l = 0; l < a.cols(); ++l) {
    const double s = a.col(l).sum();
    if (!(std::abs(s - 1.0) <= 1e-9)) {
      throw HypothesisError("matrix is not column-stochastic: column " + std::to_string(l + 1) + " sums to " +
                            detail::format_double(s));
    }
  }
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue computation did not converge");
  const auto& ev = solver.eigenvalues();
  int count = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) >= 1.0 - eps) ++count;
  return count;
}

std::uint64_t pattern_hash(const Pattern& p) {
  // FNV-1a over the shape and the entries in column-major order.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  mix(static_cast<std::uint64_t>(p.rows()));
  mix(static_cast<std::uint64_t>(p.cols()));
  for (Eigen::Index i = 0; i < p.size(); ++i) mix(p.data()[i] != 0 ? 1U : 0U);
  return h;
}

namespace {

// Golden-section minimisation of |e| on [lo, hi].
double refine_abs_minimum(const Expr& e, double lo, double hi) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = std::abs(e(c)), fd = std::abs(e(d));
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = std::abs(e(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = std::abs(e(d));
    }
  }
  return fc < fd ? c : d;
}

}  // namespace

std::vector<double> default_sample_times(const TimeVaryingMatrix& m, std::size_t equispaced, double zero_tol) {
  std::vector<double> times;
  for (std::size_t k = 0; k < equispaced; ++k) times.push_back(static_cast<double>(k) / static_cast<double>(equispaced));
  const auto zeros = m.trig_zero_times();
  times.insert(times.end(), zeros.begin(), zeros.end());

  // Entries may vanish where no single trig factor does (e.g. 1 - cos(2 pi t)).
  constexpr std::size_t scan = 1024;
  for (std::size_t k = 0; k < m.dim(); ++k) {
    for (std::size_t l = 0; l < m.dim(); ++l) {
      const auto& e = m.entry(k, l);
      if (!e || !e->depends_on_variable()) continue;
      std::vector<double> v(scan + 1);
      for (std::size_t i = 0; i <= scan; ++i) v[i] = std::abs((*e)(static_cast<double>(i) / scan));
      for (std::size_t i = 0; i <= scan; ++i) {
        const double left = v[i == 0 ? scan - 1 : i - 1];
        const double right = v[i == scan ? 1 : i + 1];
        if (v[i] > left || v[i] > right || v[i] > 1e-2) continue;
        const double lo = (static_cast<double>(i) - 1.0) / scan;
        const double hi = (static_cast<double>(i) + 1.0) / scan;
        const double t = refine_abs_minimum(*e, lo, hi);
        if (std::abs((*e)(t)) <= zero_tol) times.push_back(reduce_period(t));
      }
    }
  }
  for (double& t : times) t = reduce_period(t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              times.end());
  return times;
}

PeriodReport asymptotic_period(const TimeVaryingMatrix& m, const std::vector<double>& sample_times, double zero_tol,
                               double eigen_eps) {
  if (sample_times.empty()) throw std::invalid_argument("no sample times given");
  PeriodReport report;
  std::map<std::uint64_t, std::size_t> seen;
  for (double t : sample_times) {
    const Eigen::MatrixXd a = m.at(t);
    const Pattern pattern = (a.array().abs() > zero_tol).cast<int>();
    const std::uint64_t hash = pattern_hash(pattern);

    auto it = seen.find(hash);
    if (it == seen.end()) {
      DistinctPattern distinct;
      distinct.hash = hash;
      distinct.pattern = pattern;
      const auto active = active_nodes(pattern);
      const Pattern sub = restrict_pattern(pattern, active);
      if (!is_strongly_connected(sub)) {
        throw HypothesisError("the network G_t at t = " + detail::format_double(t) +
                              " is not strongly connected");
      }
      distinct.cyclic_index = cyclic_index(sub);
      for (int j : active) distinct.active_edges.push_back(j + 1);
      it = seen.emplace(hash, report.patterns.size()).first;
      report.patterns.push_back(std::move(distinct));
    }
    DistinctPattern& distinct = report.patterns[it->second];
    distinct.times.push_back(t);

    PeriodSample sample;
    sample.time = t;
    sample.pattern_hash = hash;
    sample.cyclic_index = distinct.cyclic_index;
    sample.peripheral_count = peripheral_count(a, eigen_eps);
    sample.reducible_full_pattern = !is_strongly_connected(pattern);
    report.samples.push_back(sample);
  }
  report.tau = 1;
  for (const auto& p : report.patterns) report.tau = std::lcm(report.tau, p.cyclic_index);
  return report;
}

std::optional<int> strictly_positive_shortcut(const TimeVaryingMatrix& m, const std::vector<double>& sample_times,
                                              double zero_tol) {
  const Pattern structure = (m.structure().array() != 0).cast<int>();
  for (double t : sample_times) {
    if (support_pattern(m, t, zero_tol) != structure) return std::nullopt;
  }
  if (!is_strongly_connected(structure)) return std::nullopt;
  return cyclic_index(structure);
}

ConvergenceTrace convergence_diagnostic(const TimeVaryingMatrix& m, const InitialData& f, double s, int tau,
                                        double horizon, std::size_t n, double stride) {
  if (tau < 1) throw std::invalid_argument("period must be a positive integer");
  if (!(horizon >= 2.0 * tau)) throw std::invalid_argument("horizon must be at least twice the period");
  if (!(stride > 0.0)) throw std::invalid_argument("stride must be positive");

  const auto count = static_cast<std::size_t>(std::floor(horizon / stride + 1e-9)) + 1;
  const double shift_steps = static_cast<double>(tau) / stride;
  const auto shift = static_cast<std::size_t>(std::llround(shift_steps));
  const bool aligned = std::abs(shift_steps - static_cast<double>(shift)) < 1e-9;

  auto field_at = [&](double elapsed) { return propagate(m, f, s, s + elapsed, n).values; };

  std::vector<Eigen::MatrixXd> fields;
  if (aligned) {
    fields.reserve(count + shift);
    for (std::size_t j = 0; j < count + shift; ++j) fields.push_back(field_at(static_cast<double>(j) * stride));
  }

  ConvergenceTrace trace;
  trace.tau = tau;
  for (std::size_t j = 0; j < count; ++j) {
    const double elapsed = static_cast<double>(j) * stride;
    double delta = 0.0;
    if (aligned) {
      delta = (fields[j + shift] - fields[j]).cwiseAbs().sum();
    } else {
      delta = (field_at(elapsed + tau) - field_at(elapsed)).cwiseAbs().sum();
    }
    trace.points.push_back({elapsed, delta / static_cast<double>(n)});
  }

  double peak = 0.0;
  for (const auto& p : trace.points) peak = std::max(peak, p.delta);
  const double mass = l1_norm(propagate(m, f, s, s, n)).total;
  const double floor = std::max({peak * 1e-12, mass * 1e-12, 1e-300});
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t used = 0;
  for (const auto& p : trace.points) {
    if (!(p.delta > floor)) continue;
    const double y = std::log(p.delta);
    sx += p.elapsed;
    sy += y;
    sxx += p.elapsed * p.elapsed;
    sxy += p.elapsed * y;
    ++used;
  }
  if (used >= 2) {
    const double k = static_cast<double>(used);
    const double denom = k * sxx - sx * sx;
    if (denom > 0.0) trace.rate = -(k * sxy - sx * sy) / denom;
  }
  return trace;
}

void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace) {
  out << "t,delta\n";
  for (const auto& p : trace.points) out << detail::format_double(p.elapsed) << ',' << detail::format_double(p.delta) << '\n';
}

}  // namespace netflow
