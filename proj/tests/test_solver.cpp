#include <catch_amalgamated.hpp>

#include "gmf/solver.hpp"

using namespace gmf;

namespace {

struct Setup {
  ScenarioEnsemble e;
  GBrownianPaths paths;
};

Setup make_setup(std::size_t paths = 64, std::size_t steps = 32, std::uint64_t seed = 5,
                 double lo = 0.7, double hi = 1.3) {
  auto s = SigmaSet::interval(lo, hi);
  TimeGrid g(0.0, 1.0, steps);
  auto e = ScenarioEnsemble::make(s, g, default_controls(s, g), paths, seed);
  auto bp = synthesize(e);
  return {std::move(e), std::move(bp)};
}

SmoothBundle smooth_1d() {
  ReferenceFunctional ell{0, {1.0}};
  return SmoothBundle(1, 1, ell, {{0.3, 0.2, 0.1, 0.15}}, {{0.1, 0.05, 0.0, 0.1}},
                      {{0.25, 0.1, 0.2, 0.05}});
}

double max_abs_diff(const ProcessTensor& a, const ProcessTensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

}  // namespace

TEST_CASE("zero coefficients keep the state constant") {
  auto su = make_setup();
  ZeroBundle f(1, 1);
  auto x0 = RandomVariable::constant(su.e.scenario_count(), su.e.path_count(), {1.5});
  auto sol = solve_mean_field(su.e, su.paths, f, x0);
  for (std::size_t k = 0; k < sol.x.K; ++k)
    CHECK(sol.x.at(0, 0, k) == 1.5);
}

TEST_CASE("pure drift reproduces the exact Euler recursion") {
  auto su = make_setup(8, 16, 3, 1.0, 1.0);
  ReferenceFunctional ell{0, {1.0}};
  // dX = 0.5 X dt, no noise terms
  AffineBundle f(1, 1, ell, {{{0.5}, 0.0, 0.0}}, {{{0.0}, 0.0, 0.0}},
                 {{{0.0}, 0.0, 0.0}});
  auto x0 = RandomVariable::constant(1, 8, {2.0});
  auto sol = solve_mean_field(su.e, su.paths, f, x0);
  const double delta = su.e.grid.delta();
  double expect = 2.0;
  for (std::size_t k = 0; k <= 16; ++k) {
    CHECK(sol.x.at(0, 3, k) == Catch::Approx(expect).epsilon(1e-14));
    expect *= 1.0 + 0.5 * delta;
  }
}

TEST_CASE("concatenation at the forward initial condition is exact") {
  auto su = make_setup();
  auto f = smooth_1d();
  std::mt19937_64 gen(9);
  std::normal_distribution<double> nd;
  RandomVariable x0(su.e.scenario_count(), su.e.path_count(), 1);
  for (double& v : x0.values) v = 0.5 + 0.3 * nd(gen);
  auto fwd = solve_mean_field(su.e, su.paths, f, x0);
  auto cat = concatenate(su.e, su.paths, f, fwd, x0);
  CHECK(max_abs_diff(fwd.x, cat.x) <= 1e-12);
  CHECK(hp_norm(fwd.x - cat.x, 2.0) <= 1e-12);
}

TEST_CASE("frozen solve pins the law argument") {
  auto su = make_setup();
  auto f = smooth_1d();
  auto x0 = RandomVariable::constant(su.e.scenario_count(), su.e.path_count(), {0.8});
  auto fwd = solve_mean_field(su.e, su.paths, f, x0);
  auto other = RandomVariable::constant(su.e.scenario_count(), su.e.path_count(), {0.2});
  auto froz = solve_frozen(su.e, su.paths, f, fwd, other);
  auto fwd2 = solve_mean_field(su.e, su.paths, f, other);
  // frozen uses the 0.8-run's law, the mean-field solve its own: they differ
  CHECK(max_abs_diff(froz.x, fwd2.x) > 1e-6);
  CHECK(froz.x.at(0, 0, 0) == 0.2);
}

TEST_CASE("solves are bit-reproducible from the seed") {
  auto a = make_setup(32, 16, 77);
  auto b = make_setup(32, 16, 77);
  auto f = smooth_1d();
  auto x0 = RandomVariable::constant(a.e.scenario_count(), a.e.path_count(), {1.0});
  auto s1 = solve_mean_field(a.e, a.paths, f, x0);
  auto s2 = solve_mean_field(b.e, b.paths, f, x0);
  CHECK(s1.x.values == s2.x.values);
}

TEST_CASE("divergence guard reports step and scenario") {
  auto su = make_setup(4, 8, 1);
  ReferenceFunctional ell{0, {1.0}};
  // explosive drift: dX = 2000 X dt from X_0 = 1, delta = 1/8
  AffineBundle f(1, 1, ell, {{{2000.0}, 1.0, 0.0}}, {{{0.0}, 0.0, 0.0}},
                 {{{0.0}, 0.0, 0.0}});
  auto x0 = RandomVariable::constant(su.e.scenario_count(), su.e.path_count(), {1.0});
  bool caught = false;
  try {
    solve_mean_field(su.e, su.paths, f, x0);
  } catch (const DivergenceError& ex) {
    caught = true;
    CHECK(ex.step < 8);
    CHECK(ex.scenario < su.e.scenario_count());
  }
  CHECK(caught);
}

TEST_CASE("shape validation") {
  auto su = make_setup(8, 8);
  auto f = smooth_1d();
  auto bad = RandomVariable::constant(su.e.scenario_count(), su.e.path_count() + 1, {1.0});
  CHECK_THROWS_AS(solve_mean_field(su.e, su.paths, f, bad), DimensionError);
  SmoothBundle wrong_n(1, 2, ReferenceFunctional{0, {1.0}},
                       std::vector<SmoothBundle::Component>(1),
                       std::vector<SmoothBundle::Component>(4),
                       std::vector<SmoothBundle::Component>(2));
  auto x0 = RandomVariable::constant(su.e.scenario_count(), su.e.path_count(), {1.0});
  CHECK_THROWS_AS(solve_mean_field(su.e, su.paths, wrong_n, x0), DimensionError);
}
