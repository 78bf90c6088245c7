#include "netflow/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "format.hpp"
#include "parallel.hpp"

namespace netflow {

PiecewiseConstant::PiecewiseConstant(std::vector<double> breaks, std::vector<double> values)
    : breaks_(std::move(breaks)), values_(std::move(values)) {
  if (values_.size() != breaks_.size() + 1) {
    throw std::invalid_argument("piecewise profile needs exactly one more value than breakpoints");
  }
  for (std::size_t i = 0; i < breaks_.size(); ++i) {
    if (!(breaks_[i] > 0.0 && breaks_[i] < 1.0)) throw std::invalid_argument("breakpoints must lie in (0, 1)");
    if (i > 0 && !(breaks_[i] > breaks_[i - 1])) throw std::invalid_argument("breakpoints must be increasing");
  }
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("piecewise values must be finite");
}

double PiecewiseConstant::operator()(double x) const {
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  return values_[static_cast<std::size_t>(it - breaks_.begin())];
}

InitialData::InitialData(std::vector<Profile> profiles) : m_(profiles.size()) {
  if (profiles.empty()) throw std::invalid_argument("initial data needs at least one edge");
  fn_ = [profiles = std::move(profiles)](double x) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(profiles.size()));
    for (std::size_t j = 0; j < profiles.size(); ++j) {
      v(static_cast<Eigen::Index>(j)) = std::visit([x](const auto& p) { return p(x); }, profiles[j]);
    }
    return v;
  };
}

InitialData::InitialData(std::size_t m, std::function<Eigen::VectorXd(double)> fn) : m_(m), fn_(std::move(fn)) {}

Eigen::VectorXd InitialData::operator()(double x) const { return fn_(x); }

double InitialData::min_on_grid(std::size_t n) const {
  double lo = INFINITY;
  for (std::size_t r = 0; r < n; ++r) {
    lo = std::min(lo, fn_((static_cast<double>(r) + 0.5) / static_cast<double>(n)).minCoeff());
  }
  return lo;
}

namespace {

void check_dims(const TimeVaryingMatrix& m, const InitialData& f) {
  if (m.dim() != f.size()) {
    throw std::invalid_argument("initial data has " + std::to_string(f.size()) + " edges, matrix has " +
                                std::to_string(m.dim()));
  }
  if (!m.periodic()) throw std::invalid_argument("the explicit evolution formula needs a 1-periodic matrix");
}

Eigen::VectorXd apply_power(const Eigen::MatrixXd& a, long long k, Eigen::VectorXd v) {
  if (k == 0) return v;
  if (k == 1) return a * v;
  Eigen::MatrixXd base = a;
  while (k > 0) {
    if (k & 1) v = base * v;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return v;
}

Eigen::VectorXd evaluate_unchecked(const TimeVaryingMatrix& m, const InitialData& f, double s, double t, double x) {
  const double d = x + (t - s);
  const double kf = std::floor(d);
  double xi = d - kf;
  if (xi >= 1.0) xi = 0.0;
  const auto k = static_cast<long long>(kf);
  if (k == 0) return f(xi);
  return apply_power(m.at(t + x), k, f(xi));
}

}  // namespace

Eigen::VectorXd evaluate_evolution(const TimeVaryingMatrix& m, const InitialData& f, double s, double t, double x) {
  check_dims(m, f);
  if (!(t >= s)) throw std::invalid_argument("query time precedes the start time");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("position must lie in [0, 1]");
  return evaluate_unchecked(m, f, s, t, x);
}

EdgeDensityField propagate(const TimeVaryingMatrix& m, const InitialData& f, double s, double t, std::size_t n) {
  check_dims(m, f);
  if (!(t >= s)) throw std::invalid_argument("query time precedes the start time");
  if (n == 0) throw std::invalid_argument("grid resolution must be positive");
  EdgeDensityField u;
  u.resolution = n;
  u.time = t;
  u.origin = s;
  u.values.resize(static_cast<Eigen::Index>(m.dim()), static_cast<Eigen::Index>(n));
  detail::parallel_for(n, 64, [&](std::size_t r) {
    u.values.col(static_cast<Eigen::Index>(r)) = evaluate_unchecked(m, f, s, t, u.x(r));
  });
  return u;
}

MassReport l1_norm(const EdgeDensityField& u) {
  MassReport report;
  report.per_edge = u.values.cwiseAbs().rowwise().sum() / static_cast<double>(u.resolution);
  report.total = report.per_edge.sum();
  return report;
}

double boundary_residual(const TimeVaryingMatrix& m, const InitialData& f, double s, double t, double eps) {
  if (!(eps > 0.0 && eps <= 1e-3)) throw std::invalid_argument("eps must lie in (0, 1/1000]");
  const Eigen::VectorXd outflow_end = evaluate_evolution(m, f, s, t, 1.0 - eps);
  const Eigen::VectorXd inflow_end = evaluate_evolution(m, f, s, t, eps);
  return (outflow_end - m.at(t) * inflow_end).lpNorm<Eigen::Infinity>();
}

EdgeDensityField oracle_characteristics(const TimeVaryingMatrix& m, const InitialData& f, double s, double t,
                                        std::size_t n, double dt) {
  check_dims(m, f);
  if (!(t >= s)) throw std::invalid_argument("query time precedes the start time");
  if (n == 0 || !(dt > 0.0)) throw std::invalid_argument("resolution and step must be positive");

  const double q_real = 1.0 / (static_cast<double>(n) * dt);
  const auto q = static_cast<std::size_t>(std::llround(q_real));
  if (q == 0 || std::abs(q_real - static_cast<double>(q)) > 1e-9 * q_real) {
    throw std::invalid_argument("step does not divide the grid spacing 1/N");
  }
  const double steps_real = (t - s) / dt;
  const auto steps = static_cast<long long>(std::llround(steps_real));
  if (std::abs(steps_real - static_cast<double>(steps)) > 1e-6) {
    throw std::invalid_argument("elapsed time is not a whole number of steps");
  }

  const std::size_t cells = n * q;
  const double h = 1.0 / static_cast<double>(cells);
  const auto dim = static_cast<Eigen::Index>(m.dim());
  Eigen::MatrixXd ring(dim, static_cast<Eigen::Index>(cells));
  for (std::size_t i = 0; i < cells; ++i) ring.col(static_cast<Eigen::Index>(i)) = f((static_cast<double>(i) + 0.5) * h);

  // Logical cell i lives in physical column (head + i) % cells.
  std::size_t head = 0;
  for (long long step = 0; step < steps; ++step) {
    const double tau = s + static_cast<double>(step) * h;
    const auto col = static_cast<Eigen::Index>(head);
    ring.col(col) = m.at(tau) * ring.col(col);
    head = (head + 1) % cells;
  }

  auto cell = [&](std::size_t i) { return ring.col(static_cast<Eigen::Index>((head + i) % cells)); };
  EdgeDensityField u;
  u.resolution = n;
  u.time = t;
  u.origin = s;
  u.values.resize(dim, static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (q % 2 == 1) {
      u.values.col(static_cast<Eigen::Index>(r)) = cell(r * q + (q - 1) / 2);
    } else {
      u.values.col(static_cast<Eigen::Index>(r)) = 0.5 * (cell(r * q + q / 2 - 1) + cell(r * q + q / 2));
    }
  }
  return u;
}

InitialData evolved_state(const TimeVaryingMatrix& m, const InitialData& f, double s, double t) {
  check_dims(m, f);
  if (!(t >= s)) throw std::invalid_argument("query time precedes the start time");
  return InitialData(f.size(), [m, f, s, t](double x) { return evaluate_unchecked(m, f, s, t, x); });
}

void write_field_csv(std::ostream& out, const EdgeDensityField& u) {
  out << "edge,x,value,t,s\n";
  const std::string t = detail::format_double(u.time);
  const std::string s = detail::format_double(u.origin);
  for (Eigen::Index j = 0; j < u.values.rows(); ++j) {
    for (std::size_t r = 0; r < u.resolution; ++r) {
      out << (j + 1) << ',' << detail::format_double(u.x(r)) << ','
          << detail::format_double(u.values(j, static_cast<Eigen::Index>(r))) << ',' << t << ',' << s << '\n';
    }
  }
}

}  // namespace netflow
