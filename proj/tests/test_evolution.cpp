#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "netflow/evolution.hpp"
#include "test_support.hpp"

using namespace netflow;
using test_support::constant_matrix;
using test_support::cycle_pattern;
using test_support::example1_matrix;
using test_support::example2_matrix;

namespace {

InitialData uniform_profile(std::size_t m, const char* expr) {
  return InitialData(std::vector<Profile>(m, Profile(parse_expr(expr, 'x'))));
}

InitialData distinct_profiles(std::size_t m) {
  std::vector<Profile> profiles;
  for (std::size_t j = 0; j < m; ++j) {
    const std::string e = std::to_string(j + 1) + " + 0.5*cos(2*pi*x) + 0.25*sin(" + std::to_string(2 * (j % 3 + 1)) + "*pi*x)";
    profiles.emplace_back(parse_expr(e, 'x'));
  }
  return InitialData(std::move(profiles));
}

/// Steps aligned to the 1/N grid with random values on every edge.
InitialData random_steps(std::mt19937_64& rng, std::size_t m, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> value(lo, hi);
  std::vector<Profile> profiles;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> breaks, values;
    for (std::size_t r = 1; r < n; r += 7) breaks.push_back(static_cast<double>(r) / static_cast<double>(n));
    for (std::size_t i = 0; i <= breaks.size(); ++i) values.push_back(value(rng));
    profiles.emplace_back(PiecewiseConstant(breaks, values));
  }
  return InitialData(std::move(profiles));
}

TimeVaryingMatrix self_loop() { return constant_matrix(cycle_pattern(1)); }

}  // namespace

TEST_CASE("piecewise constant profiles") {
  const PiecewiseConstant p({0.25, 0.75}, {0.0, 4.0, 0.0});
  CHECK(p(0.1) == 0.0);
  CHECK(p(0.25) == 4.0);
  CHECK(p(0.5) == 4.0);
  CHECK(p(0.75) == 0.0);
  CHECK_THROWS_AS(PiecewiseConstant({0.5, 0.25}, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseConstant({0.5}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(PiecewiseConstant({1.0}, {1, 2}), std::invalid_argument);
}

TEST_CASE("a self-loop with unit weight is a pure shift") {
  const auto m = self_loop();
  const auto f = uniform_profile(1, "x");
  CHECK(evaluate_evolution(m, f, 0.0, 0.0, 0.3)(0) == doctest::Approx(0.3));
  CHECK(evaluate_evolution(m, f, 0.0, 0.5, 0.0)(0) == doctest::Approx(0.5));
  CHECK(evaluate_evolution(m, f, 0.0, 0.5, 0.75)(0) == doctest::Approx(0.25));
  CHECK(evaluate_evolution(m, f, 2.0, 2.5, 0.0)(0) == doctest::Approx(0.5));
}

TEST_CASE("three-cycle returns to the initial state after three periods") {
  const auto m = constant_matrix(cycle_pattern(3));
  const auto f = distinct_profiles(3);
  const auto u0 = propagate(m, f, 0.0, 0.0, 64);
  const auto u3 = propagate(m, f, 0.0, 3.0, 64);
  CHECK((u3.values - u0.values).cwiseAbs().maxCoeff() < 1e-12);
  const auto u1 = propagate(m, f, 0.0, 1.0, 64);
  CHECK((u1.values - u0.values).cwiseAbs().maxCoeff() > 0.5);
}

TEST_CASE("two-cycle swaps the edges after one unit of time") {
  const auto m = constant_matrix(cycle_pattern(2));
  const auto f = distinct_profiles(2);
  for (double x : {0.1, 0.5, 0.9}) {
    const Eigen::VectorXd u = evaluate_evolution(m, f, 0.0, 1.0, x);
    CHECK(u(0) == doctest::Approx(f(x)(1)));
    CHECK(u(1) == doctest::Approx(f(x)(0)));
  }
}

TEST_CASE("argument checks") {
  const auto m = example1_matrix();
  const auto f = uniform_profile(6, "1");
  CHECK_THROWS_AS(evaluate_evolution(m, f, 1.0, 0.5, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_evolution(m, f, 0.0, 0.5, 1.2), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_evolution(m, uniform_profile(5, "1"), 0.0, 0.5, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(boundary_residual(m, f, 0.0, 0.5, 0.01), std::invalid_argument);
}

TEST_CASE("l1 norm by the midpoint rule") {
  EdgeDensityField u;
  u.resolution = 400;
  u.values.resize(2, 400);
  for (std::size_t r = 0; r < 400; ++r) {
    u.values(0, static_cast<Eigen::Index>(r)) = 2.0 * u.x(r);
    u.values(1, static_cast<Eigen::Index>(r)) = -1.0;
  }
  const auto mass = l1_norm(u);
  CHECK(mass.per_edge(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mass.per_edge(1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mass.total == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("mass is conserved") {
  std::mt19937_64 rng(3);
  const std::size_t n = 400;
  for (const auto& m : {example1_matrix(), example2_matrix()}) {
    const auto f = random_steps(rng, m.dim(), n, 0.0, 3.0);
    const double mass0 = l1_norm(propagate(m, f, 0.0, 0.0, n)).total;
    for (double t : {0.3, 1.0, 2.71, 10.05}) {
      const double mass = l1_norm(propagate(m, f, 0.0, t, n)).total;
      CHECK(std::abs(mass - mass0) / mass0 < 1e-12);
    }
  }
}

TEST_CASE("boundary condition holds for the evolved state") {
  const auto m = example1_matrix();
  const auto f = distinct_profiles(6);
  for (double t : {0.3, 1.7, 4.2}) CHECK(boundary_residual(m, f, 0.0, t, 1e-6) < 1e-4);
  const auto m2 = example2_matrix();
  for (double t : {1.25, 3.6}) CHECK(boundary_residual(m2, distinct_profiles(10), 0.0, t, 1e-6) < 1e-4);
}

TEST_CASE("zero data stays zero") {
  const auto u = propagate(example2_matrix(), uniform_profile(10, "0"), 0.0, 7.3, 100);
  CHECK(u.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cocycle property") {
  const auto m = example2_matrix();
  const auto f = distinct_profiles(10);
  const double s = 0.2, r = 1.45, t = 3.1;
  const auto g = evolved_state(m, f, s, r);
  int compared = 0;
  for (int i = 0; i <= 200; ++i) {
    const double x = i / 200.0;
    // Skip points where a characteristic crosses the boundary in either leg.
    const auto near_line = [](double v) { return std::abs(v - std::round(v)) < 1e-9; };
    if (near_line(x + t - s) || near_line(x + t - r)) continue;
    const Eigen::VectorXd chained = evaluate_evolution(m, g, r, t, x);
    const Eigen::VectorXd direct = evaluate_evolution(m, f, s, t, x);
    CHECK((chained - direct).cwiseAbs().maxCoeff() < 1e-12);
    ++compared;
  }
  CHECK(compared > 190);
}

TEST_CASE("property: nonnegative data stays nonnegative and l1 never grows") {
  std::mt19937_64 rng(23);
  const std::size_t n = 140;
  std::uniform_real_distribution<double> time(0.0, 6.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = trial % 2 ? example1_matrix() : example2_matrix();
    const auto positive = random_steps(rng, m.dim(), n, 0.0, 2.0);
    const double t = time(rng);
    CHECK(propagate(m, positive, 0.0, t, n).values.minCoeff() >= 0.0);

    const auto signed_data = random_steps(rng, m.dim(), n, -1.0, 1.0);
    const double before = l1_norm(propagate(m, signed_data, 0.0, 0.0, n)).total;
    const double after = l1_norm(propagate(m, signed_data, 0.0, t, n)).total;
    CHECK(after <= before + 1e-12);
  }
}

TEST_CASE("oracle is exact for constant matrices over whole periods") {
  const auto m = constant_matrix(cycle_pattern(3));
  const auto f = uniform_profile(3, "1 + x");
  for (double dt : {1.0 / 500.0, 1.0 / 1000.0}) {
    const auto oracle = oracle_characteristics(m, f, 0.0, 1.0, 100, dt);
    const auto exact = propagate(m, f, 0.0, 1.0, 100);
    CHECK((oracle.values - exact.values).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("oracle converges to the explicit solution") {
  const auto m = example1_matrix();
  const auto f = distinct_profiles(6);
  const std::size_t n = 400;
  const double t = 2.0;
  const auto exact = propagate(m, f, 0.0, t, n);
  std::vector<double> errors;
  for (double dt : {1.0 / 2000.0, 1.0 / 4000.0, 1.0 / 8000.0}) {
    const auto oracle = oracle_characteristics(m, f, 0.0, t, n, dt);
    errors.push_back((oracle.values - exact.values).cwiseAbs().maxCoeff());
  }
  for (std::size_t i = 1; i < errors.size(); ++i) {
    CHECK(errors[i] < errors[i - 1]);
    CHECK(std::log2(errors[i - 1] / errors[i]) > 0.8);
  }
  CHECK(errors.back() < 1e-3);
}

TEST_CASE("oracle rejects steps that do not fit the grid") {
  const auto m = example1_matrix();
  const auto f = uniform_profile(6, "1");
  CHECK_THROWS_AS(oracle_characteristics(m, f, 0.0, 1.0, 400, 1.0 / 3000.0), std::invalid_argument);
  CHECK_THROWS_AS(oracle_characteristics(m, f, 0.0, 1.0001, 400, 1.0 / 2000.0), std::invalid_argument);
}

TEST_CASE("field csv") {
  const auto u = propagate(constant_matrix(cycle_pattern(2)), uniform_profile(2, "1"), 0.0, 0.5, 4);
  std::ostringstream out;
  write_field_csv(out, u);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "edge,x,value,t,s");
  std::getline(in, line);
  CHECK(line == "1,0.125,1,0.5,0");
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 8);
}
