#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "netflow/commands.hpp"
#include "netflow/evolution.hpp"
#include "netflow/scenario.hpp"
#include "netflow/spectral.hpp"

using namespace netflow;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

Scenario bundled(const char* name) {
  return load_scenario(std::filesystem::path(NETFLOW_SCENARIO_DIR) / name);
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

Outcome example1() {
  const Scenario s = bundled("example1.json");
  cli::Options opts;
  opts.tol = 1e-12;
  opts.validation_grid = 1001;
  const auto v = cli::validate(s, opts);
  const auto p = cli::period(s, opts);
  const int tau = p.report.value("tau", 0);
  const auto& shortcut = p.report["shortcut"];
  const bool via_shortcut = shortcut["applied"].get<bool>() && shortcut["tau"] == 1;
  const bool ok = v.exit_code == 0 && tau == 1 && via_shortcut;
  return {ok, fmt("validate=%d tau=%d shortcut_tau=%s", v.exit_code, tau, shortcut["tau"].dump().c_str())};
}

Outcome example2() {
  const Scenario s = bundled("example2.json");
  const auto v = cli::validate(s, {});
  const auto p = cli::period(s, {});
  bool all_two = true;
  for (const auto& pat : p.report["patterns"]) all_two = all_two && pat["cyclic_index"] == 2;
  const std::size_t distinct = p.report["distinct_patterns"].get<std::size_t>();
  const int tau = p.report.value("tau", 0);
  const bool ok = v.exit_code == 0 && distinct == 3 && all_two && tau == 2;
  return {ok, fmt("validate=%d patterns=%zu all_index_2=%d tau=%d", v.exit_code, distinct, all_two, tau)};
}

Outcome junction() {
  const Scenario s = bundled("junction.json");
  const Eigen::MatrixXd a = s.matrix.at(0.0);
  const double c1 = std::abs(a.col(0).sum() - 1.0);
  const double c2 = std::abs(a.col(1).sum() - 1.0);
  const bool entries = std::abs(a(2, 0) - 0.5) < 1e-15 && std::abs(a(3, 0) - 1.0 / 3.0) < 1e-15 &&
                       std::abs(a(4, 0) - 1.0 / 6.0) < 1e-15 && a(2, 1) == 0.0 && std::abs(a(3, 1) - 0.25) < 1e-15 &&
                       std::abs(a(4, 1) - 0.75) < 1e-15;
  return {entries && c1 <= 1e-15 && c2 <= 1e-15, fmt("|colsum(e1)-1|=%.1e |colsum(e2)-1|=%.1e", c1, c2)};
}

InitialData ones(std::size_t m) { return InitialData(std::vector<Profile>(m, Profile(Expr::number(1.0)))); }

struct OracleErrors {
  double errors[3];
  double order;
  double scale;
};

OracleErrors oracle_errors(const Scenario& s, const InitialData& f, double elapsed) {
  const std::size_t n = 400;
  const double t = s.start + elapsed;
  const auto exact = propagate(s.matrix, f, s.start, t, n);
  OracleErrors out{};
  int i = 0;
  for (double dt : {1.0 / 2000.0, 1.0 / 4000.0, 1.0 / 8000.0}) {
    const auto oracle = oracle_characteristics(s.matrix, f, s.start, t, n, dt);
    out.errors[i++] = (oracle.values - exact.values).cwiseAbs().maxCoeff();
  }
  out.order = std::log2(out.errors[0] / out.errors[2]) / 2.0;
  out.scale = exact.values.cwiseAbs().maxCoeff();
  return out;
}

Outcome oracle_order() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"example1.json", "example2.json"}) {
    const Scenario s = bundled(name);
    for (double elapsed : {0.5, 1.0, 3.7}) {
      const auto e = oracle_errors(s, ones(s.matrix.dim()), elapsed);
      const bool monotone = e.errors[1] < e.errors[0] && e.errors[2] < e.errors[1];
      ok = ok && monotone && std::abs(e.order - 1.0) <= 0.2 && e.errors[2] < 1e-3;
      detail += fmt("%s t-s=%.1f order=%.3f err=%.2e; ", name, elapsed, e.order, e.errors[2]);
    }
  }
  const Scenario s2 = bundled("example2.json");
  const auto g = oracle_errors(s2, s2.initial, 3.7);
  detail += fmt("example2.json scenario data t-s=3.7 order=%.3f err=%.2e rel=%.2e", g.order, g.errors[2],
                g.errors[2] / g.scale);
  return {ok, detail};
}

std::string num(double v) { return fmt("%.17g", v); }

/// Random strongly connected network with stochastic trig weights and
/// nonnegative steps aligned to the 1/N grid.
nlohmann::json random_scenario(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> vertices(1, 5);
  const int nv = vertices(rng);
  std::uniform_int_distribution<int> extra(0, std::max(0, 8 - nv));
  const int m = nv + extra(rng);
  std::vector<int> order(static_cast<std::size_t>(nv));
  for (int i = 0; i < nv; ++i) order[static_cast<std::size_t>(i)] = i + 1;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < nv; ++i) edges.emplace_back(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>((i + 1) % nv)]);
  std::uniform_int_distribution<int> pick(1, nv);
  while (static_cast<int>(edges.size()) < m) edges.emplace_back(pick(rng), pick(rng));

  nlohmann::json doc;
  doc["graph"] = {{"n", nv}, {"edges", edges}};
  doc["mode"] = "flow";
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::uniform_int_distribution<int> freq(1, 3);
  nlohmann::json weights = nlohmann::json::object();
  for (int v = 1; v <= nv; ++v) {
    std::vector<int> out;
    for (int e = 0; e < m; ++e)
      if (edges[static_cast<std::size_t>(e)].first == v) out.push_back(e + 1);
    const auto key = [v](int e) { return std::to_string(v) + "," + std::to_string(e); };
    if (out.size() == 1) {
      weights[key(out[0])] = "1";
      continue;
    }
    // Base shares sum to 1 - a; the swing a moves between the first two edges.
    const double a = 0.5 * unit(rng);
    std::vector<double> base(out.size());
    double total = 0;
    for (double& b : base) total += (b = unit(rng));
    for (double& b : base) b *= (1.0 - a) / total;
    const std::string k = std::to_string(freq(rng));
    weights[key(out[0])] = num(base[0]) + " + " + num(a) + "*cos(" + k + "*pi*t)^2";
    weights[key(out[1])] = num(base[1]) + " + " + num(a) + "*sin(" + k + "*pi*t)^2";
    for (std::size_t i = 2; i < out.size(); ++i) weights[key(out[i])] = num(base[i]);
  }
  doc["weights"] = weights;

  nlohmann::json initial = nlohmann::json::object();
  std::uniform_int_distribution<std::size_t> cell(1, n - 1);
  std::uniform_real_distribution<double> value(0.0, 4.0);
  for (int e = 1; e <= m; ++e) {
    std::vector<double> breaks;
    for (int i = 0; i < 5; ++i) breaks.push_back(static_cast<double>(cell(rng)) / static_cast<double>(n));
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    std::vector<double> values;
    for (std::size_t i = 0; i <= breaks.size(); ++i) values.push_back(value(rng));
    initial[std::to_string(e)] = {{"breaks", breaks}, {"values", values}};
  }
  doc["initial"] = initial;
  doc["s"] = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  doc["N"] = n;
  return doc;
}

Outcome conservation() {
  std::mt19937_64 rng(2024);
  const std::size_t n = 200;
  double worst_drift = 0, worst_min = INFINITY;
  int failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Scenario s = parse_scenario(random_scenario(rng, n));
    if (!validate_stochastic(s.matrix, uniform_grid(101), 1e-12).passed()) ++failures;
    const double mass0 = l1_norm(propagate(s.matrix, s.initial, s.start, s.start, n)).total;
    const auto u = propagate(s.matrix, s.initial, s.start, s.start + 10.0, n);
    const double drift = std::abs(l1_norm(u).total - mass0) / mass0;
    worst_drift = std::max(worst_drift, drift);
    worst_min = std::min(worst_min, u.values.minCoeff());
  }
  const bool ok = failures == 0 && worst_drift <= 1e-9 && worst_min >= -1e-12;
  return {ok, fmt("scenarios=100 invalid=%d max_drift=%.2e min_density=%.2e", failures, worst_drift, worst_min)};
}

/// Irreducible pattern: a random strongly connected base, or a layered
/// pattern whose arcs only go from one layer to the next (cyclic index = layers).
Pattern random_irreducible(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(1, 10);
  const int m = size(rng);
  Pattern p = Pattern::Zero(m, m);
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (int i = 0; i < m; ++i) p(perm[static_cast<std::size_t>((i + 1) % m)], perm[static_cast<std::size_t>(i)]) = 1;
  std::bernoulli_distribution coin(0.25);
  if (rng() % 2 == 0) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (coin(rng)) p(i, j) = 1;
  } else {
    // Layer of node perm[i] is i mod h, where h divides m so the cycle respects the layers.
    std::vector<int> divisors;
    for (int h = 1; h <= m; ++h)
      if (m % h == 0) divisors.push_back(h);
    const int h = divisors[rng() % divisors.size()];
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if ((i + 1) % h == j % h && coin(rng)) p(perm[static_cast<std::size_t>(j)], perm[static_cast<std::size_t>(i)]) = 1;
  }
  return p;
}

Outcome spectral_consistency() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  int mismatches = 0, imprimitive = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Pattern p = random_irreducible(rng);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p.rows(), p.cols());
    for (Eigen::Index l = 0; l < p.cols(); ++l) {
      for (Eigen::Index k = 0; k < p.rows(); ++k)
        if (p(k, l)) a(k, l) = weight(rng);
      a.col(l) /= a.col(l).sum();
    }
    const int h = cyclic_index(p);
    if (h > 1) ++imprimitive;
    if (peripheral_count(a, 1e-6) != h) ++mismatches;
  }
  return {mismatches == 0, fmt("matrices=200 imprimitive=%d mismatches=%d", imprimitive, mismatches)};
}

Outcome identity_cocycle() {
  std::mt19937_64 rng(7);
  const std::size_t n = 400;
  double identity_err = 0, cocycle_err = 0;
  for (const char* name : {"example1.json", "example2.json"}) {
    const Scenario sc = bundled(name);
    const auto& m = sc.matrix;
    std::uniform_real_distribution<double> start(0.0, 3.0), gap(0.0, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
      const double s = start(rng);
      const auto u = propagate(m, sc.initial, s, s, n);
      for (std::size_t r = 0; r < n; ++r) {
        const Eigen::VectorXd f = sc.initial(u.x(r));
        identity_err = std::max(identity_err, (u.values.col(static_cast<Eigen::Index>(r)) - f).cwiseAbs().maxCoeff());
      }
      const double t1 = s + gap(rng);
      const double t2 = t1 + gap(rng);
      const InitialData mid = evolved_state(m, sc.initial, s, t1);
      const auto chained = propagate(m, mid, t1, t2, n);
      const auto direct = propagate(m, sc.initial, s, t2, n);
      for (std::size_t r = 0; r < n; ++r) {
        const double x = u.x(r);
        const auto near_line = [](double v) { return std::abs(v - std::round(v)) < 1e-9; };
        if (near_line(x + t2 - s) || near_line(x + t2 - t1)) continue;
        const auto c = static_cast<Eigen::Index>(r);
        cocycle_err = std::max(cocycle_err, (chained.values.col(c) - direct.values.col(c)).cwiseAbs().maxCoeff());
      }
    }
  }
  return {identity_err == 0.0 && cocycle_err <= 1e-12,
          fmt("identity_max=%.1e cocycle_max=%.2e", identity_err, cocycle_err)};
}

Outcome asymptotic() {
  const std::size_t n = 200;
  const Scenario s1 = bundled("example1.json");
  const Scenario s2 = bundled("example2.json");
  const auto t1 = convergence_diagnostic(s1.matrix, ones(s1.matrix.dim()), s1.start, 1, 100.0, n, 0.5);
  const auto t2 = convergence_diagnostic(s2.matrix, ones(s2.matrix.dim()), s2.start, 2, 100.0, n, 0.5);
  const auto wrong = convergence_diagnostic(s2.matrix, s2.initial, s2.start, 1, 100.0, n, 0.5);
  auto first_below = [](const ConvergenceTrace& t) {
    for (const auto& p : t.points)
      if (p.delta < 1e-6) return p.elapsed;
    return static_cast<double>(INFINITY);
  };
  double wrong_min = INFINITY;
  for (const auto& p : wrong.points) wrong_min = std::min(wrong_min, p.delta);
  const double e1 = first_below(t1), e2 = first_below(t2);
  const bool ok = std::isfinite(e1) && std::isfinite(e2) && wrong_min > 1e-3;
  return {ok, fmt("ex1 tau=1 below 1e-6 at t=%.1f (delta(100)=%.2e, rate=%.4f); ex2 tau=2 below 1e-6 at t=%.1f; "
                  "ex2 tau=1 min delta=%.3e",
                  e1, t1.points.back().delta, t1.rate.value_or(0.0), e2, wrong_min)};
}

Outcome parser() {
  const char* round_trip[30] = {
      "1", "0.25", "pi", "t", "-t", "t^2", "sin(pi*t)", "cos(pi*t)^2", "0.25 + 0.5*cos(pi*t)^2",
      "sin(pi*t)^2/2", "1/3", "1 - 2 - 3", "1 - (2 - 3)", "2*(t + 1)", "(t + 1)^3", "-(t^2)", "-t^2",
      "cos(2*pi*t + 1)", "sin(pi*(t + 0.5))", "1/(2 + cos(pi*t))", "t*t*t", "t/2/3", "t/(2/3)", "pi*t - pi",
      "0.5 - 0.25*sin(pi*t)^2", "1e-3*t", "cos(-t)", "((t))", "2^10", "sin(cos(sin(t)))"};
  int rt_ok = 0;
  for (const char* src : round_trip) {
    const Expr e = parse_expr(src);
    const Expr back = parse_expr(to_string(e));
    if (back == e && to_string(back) == to_string(e)) ++rt_ok;
  }
  struct Bad {
    const char* src;
    ParseError::Kind kind;
    std::size_t offset;
  };
  const Bad malformed[10] = {{"cos(", ParseError::Kind::Syntax, 4},
                             {"", ParseError::Kind::Syntax, 0},
                             {"1 +", ParseError::Kind::Syntax, 3},
                             {"(1 + 2", ParseError::Kind::Syntax, 6},
                             {"1 2", ParseError::Kind::Syntax, 2},
                             {"tan(t)", ParseError::Kind::Lexical, 0},
                             {"t + y", ParseError::Kind::Lexical, 4},
                             {"2 # 3", ParseError::Kind::Lexical, 2},
                             {"t^1.5", ParseError::Kind::NonIntegerExponent, 2},
                             {"sin t", ParseError::Kind::Syntax, 4}};
  int bad_ok = 0;
  for (const auto& b : malformed) {
    try {
      parse_expr(b.src);
    } catch (const ParseError& e) {
      if (e.kind() == b.kind && e.offset() == b.offset) ++bad_ok;
    }
  }
  const Expr w = parse_expr("0.25 + 0.5*cos(pi*t)^2");
  const double d0 = std::abs(w(0.0) - 0.75), dh = std::abs(w(0.5) - 0.25);
  const bool ok = rt_ok == 30 && bad_ok == 10 && d0 <= 1e-15 && dh <= 1e-15;
  return {ok, fmt("round_trip=%d/30 malformed=%d/10 |w(0)-0.75|=%.1e |w(1/2)-0.25|=%.1e", rt_ok, bad_ok, d0, dh)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expected_failures;
  for (int i = 1; i + 1 < argc; i += 2)
    if (std::string(argv[i]) == "--expect-fail") expected_failures.insert(std::stoi(argv[i + 1]));

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double budget_seconds;
  };
  const Criterion criteria[] = {{1, "example 1 reproduction", example1, 1.0},
                                {2, "example 2 reproduction", example2, 1.0},
                                {3, "junction embedding", junction, INFINITY},
                                {4, "exact formula vs characteristics oracle", oracle_order, 60.0},
                                {5, "conservation and positivity", conservation, 120.0},
                                {6, "spectral-combinatorial consistency", spectral_consistency, INFINITY},
                                {7, "identity and cocycle", identity_cocycle, INFINITY},
                                {8, "asymptotic periodicity", asymptotic, INFINITY},
                                {9, "parser suite", parser, INFINITY}};
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out{false, ""};
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = seconds < c.budget_seconds;
    const bool pass = out.passed && in_budget;
    if (!pass && !expected_failures.contains(c.id)) ++failed;
    std::printf("%s criterion %d (%s): %s [%.2fs%s]%s\n", pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(),
                seconds, in_budget ? "" : " over budget",
                !pass && expected_failures.contains(c.id) ? " (known failure)" : "");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
