#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gmf/tangent.hpp"

using namespace gmf;

namespace {

struct Setup {
  ScenarioEnsemble e;
  GBrownianPaths paths;
  SmoothBundle f{1, 1, ReferenceFunctional{0, {1.0}},
                 {{0.3, 0.2, 0.1, 0.15}}, {{0.1, 0.05, 0.0, 0.1}},
                 {{0.25, 0.1, 0.2, 0.05}}};
};

Setup make_setup(std::size_t paths = 48, std::size_t steps = 24, std::uint64_t seed = 5) {
  auto s = SigmaSet::interval(0.7, 1.3);
  TimeGrid g(0.0, 1.0, steps);
  auto e = ScenarioEnsemble::make(s, g, default_controls(s, g), paths, seed);
  auto bp = synthesize(e);
  return {std::move(e), std::move(bp)};
}

double max_abs_diff(const ProcessTensor& a, const ProcessTensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

RandomVariable gaussian_rv(const ScenarioEnsemble& e, double scale, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, scale);
  RandomVariable rv(e.scenario_count(), e.path_count(), 1);
  for (double& v : rv.values) v = nd(gen);
  return rv;
}

}  // namespace

TEST_CASE("zero bundle tangents: A constant, Y and second order identically zero") {
  auto su = make_setup();
  ZeroBundle f(1, 1);
  auto x0 = RandomVariable::constant(su.e.scenario_count(), su.e.path_count(), {1.0});
  auto fwd = solve_mean_field(su.e, su.paths, f, x0);
  auto froz = solve_frozen(su.e, su.paths, f, fwd, x0);
  auto a = solve_A(su.e, su.paths, f, froz.x, fwd.x, {2.0});
  for (std::size_t k = 0; k < a.v.K; ++k) CHECK(a.v.at(0, 0, k) == 2.0);
  auto eta = gaussian_rv(su.e, 1.0, 7);
  auto a_eta = dx_concatenated(su.e, su.paths, f, fwd, eta);
  auto y = solve_Y_xi(su.e, su.paths, f, fwd, a_eta);
  CHECK(hp_norm(y.v, 2.0) == 0.0);
  auto fr = frechet_xi(a_eta, y);
  auto y_x = solve_Y_x(su.e, su.paths, f, froz, fwd, fr);
  CHECK(hp_norm(y_x.v, 2.0) == 0.0);
  auto c = solve_C(su.e, su.paths, f, froz, fwd, a, a);
  auto d = solve_D(su.e, su.paths, f, froz, fwd, a, y_x, fr);
  CHECK(hp_norm(c.v, 2.0) == 0.0);
  CHECK(hp_norm(d.v, 2.0) == 0.0);
}

TEST_CASE("A and dx_concatenated are linear in the direction") {
  auto su = make_setup();
  auto x0 = RandomVariable::constant(su.e.scenario_count(), su.e.path_count(), {0.6});
  auto fwd = solve_mean_field(su.e, su.paths, su.f, x0);
  auto froz = solve_frozen(su.e, su.paths, su.f, fwd, x0);
  const double lam = 0.37;
  auto ay = solve_A(su.e, su.paths, su.f, froz.x, fwd.x, {1.0});
  auto az = solve_A(su.e, su.paths, su.f, froz.x, fwd.x, {-0.5});
  auto ayz = solve_A(su.e, su.paths, su.f, froz.x, fwd.x, {1.0 + lam * -0.5});
  ProcessTensor comb = ay.v;
  ProcessTensor sc = az.v;
  sc *= lam;
  comb += sc;
  CHECK(max_abs_diff(ayz.v, comb) <= 1e-12);

  auto eta = gaussian_rv(su.e, 1.0, 11);
  auto zeta = gaussian_rv(su.e, 1.0, 12);
  auto s1 = dx_concatenated(su.e, su.paths, su.f, fwd, eta);
  auto s2 = dx_concatenated(su.e, su.paths, su.f, fwd, zeta);
  auto s12 = dx_concatenated(su.e, su.paths, su.f, fwd,
                             eta + lam * RandomVariable(zeta));
  ProcessTensor comb2 = s1.v;
  ProcessTensor sc2 = s2.v;
  sc2 *= lam;
  comb2 += sc2;
  CHECK(max_abs_diff(s12.v, comb2) <= 1e-12);
}

TEST_CASE("both Y solvers are linear in eta") {
  auto su = make_setup();
  auto x0 = RandomVariable::constant(su.e.scenario_count(), su.e.path_count(), {0.6});
  auto fwd = solve_mean_field(su.e, su.paths, su.f, x0);
  auto froz = solve_frozen(su.e, su.paths, su.f, fwd, x0);
  auto eta = gaussian_rv(su.e, 1.0, 11);
  auto zeta = gaussian_rv(su.e, 1.0, 12);
  const double lam = -0.83;
  auto y_of = [&](const RandomVariable& dir) {
    auto a = dx_concatenated(su.e, su.paths, su.f, fwd, dir);
    return solve_Y_xi(su.e, su.paths, su.f, fwd, a);
  };
  auto y1 = y_of(eta), y2 = y_of(zeta), y12 = y_of(eta + lam * RandomVariable(zeta));
  ProcessTensor comb = y1.v;
  ProcessTensor sc = y2.v;
  sc *= lam;
  comb += sc;
  CHECK(max_abs_diff(y12.v, comb) <= 1e-12);

  auto yx_of = [&](const RandomVariable& dir) {
    auto a = dx_concatenated(su.e, su.paths, su.f, fwd, dir);
    auto fr = frechet_xi(a, solve_Y_xi(su.e, su.paths, su.f, fwd, a));
    return solve_Y_x(su.e, su.paths, su.f, froz, fwd, fr);
  };
  auto w1 = yx_of(eta), w2 = yx_of(zeta), w12 = yx_of(eta + lam * RandomVariable(zeta));
  ProcessTensor combx = w1.v;
  ProcessTensor scx = w2.v;
  scx *= lam;
  combx += scx;
  CHECK(max_abs_diff(w12.v, combx) <= 1e-12);
}

TEST_CASE("Y concatenation: the frozen-law Y at x := xi equals Y^{xi,eta}") {
  auto su = make_setup();
  auto xi = gaussian_rv(su.e, 0.8, 21);
  auto fwd = solve_mean_field(su.e, su.paths, su.f, xi);
  auto froz = concatenate(su.e, su.paths, su.f, fwd, xi);  // X^{xi,xi} = X^xi
  auto eta = gaussian_rv(su.e, 1.0, 22);
  auto a_eta = dx_concatenated(su.e, su.paths, su.f, fwd, eta);
  auto y_xi = solve_Y_xi(su.e, su.paths, su.f, fwd, a_eta);
  auto fr = frechet_xi(a_eta, y_xi);
  auto y_x = solve_Y_x(su.e, su.paths, su.f, froz, fwd, fr);
  CHECK(max_abs_diff(y_x.v, y_xi.v) <= 1e-12);
}

TEST_CASE("Dx concatenation compatibility with constant direction") {
  auto su = make_setup();
  auto xi = gaussian_rv(su.e, 0.8, 31);
  auto fwd = solve_mean_field(su.e, su.paths, su.f, xi);
  auto cat = concatenate(su.e, su.paths, su.f, fwd, xi);
  const std::vector<double> y{0.7};
  auto a = solve_A(su.e, su.paths, su.f, cat.x, fwd.x, y);
  auto dc = dx_concatenated(
      su.e, su.paths, su.f, fwd,
      RandomVariable::constant(su.e.scenario_count(), su.e.path_count(), y));
  CHECK(max_abs_diff(a.v, dc.v) <= 1e-12);
}

TEST_CASE("C and D are bilinear") {
  auto su = make_setup(32, 16);
  auto x0 = RandomVariable::constant(su.e.scenario_count(), su.e.path_count(), {0.5});
  auto fwd = solve_mean_field(su.e, su.paths, su.f, x0);
  auto froz = solve_frozen(su.e, su.paths, su.f, fwd, x0);
  auto a_of = [&](double y) {
    return solve_A(su.e, su.paths, su.f, froz.x, fwd.x, std::vector<double>{y});
  };
  const double lam = 1.7;
  auto c_of = [&](double y, double z) {
    auto ay = a_of(y), az = a_of(z);
    return solve_C(su.e, su.paths, su.f, froz, fwd, ay, az);
  };
  {
    auto c1 = c_of(1.0, 0.4), c2 = c_of(-0.3, 0.4), c12 = c_of(1.0 + lam * -0.3, 0.4);
    ProcessTensor comb = c1.v;
    ProcessTensor sc = c2.v;
    sc *= lam;
    comb += sc;
    CHECK(max_abs_diff(c12.v, comb) <= 1e-12);
  }
  auto eta = gaussian_rv(su.e, 1.0, 41);
  auto zeta = gaussian_rv(su.e, 1.0, 42);
  auto d_of = [&](double y, const RandomVariable& dir) {
    auto a_dir = dx_concatenated(su.e, su.paths, su.f, fwd, dir);
    auto fr = frechet_xi(a_dir, solve_Y_xi(su.e, su.paths, su.f, fwd, a_dir));
    auto y_x = solve_Y_x(su.e, su.paths, su.f, froz, fwd, fr);
    auto ay = a_of(y);
    return solve_D(su.e, su.paths, su.f, froz, fwd, ay, y_x, fr);
  };
  {
    // linear in y
    auto d1 = d_of(1.0, eta), d2 = d_of(-0.6, eta), d12 = d_of(1.0 + lam * -0.6, eta);
    ProcessTensor comb = d1.v;
    ProcessTensor sc = d2.v;
    sc *= lam;
    comb += sc;
    CHECK(max_abs_diff(d12.v, comb) <= 1e-12);
  }
  {
    // linear in eta
    auto d1 = d_of(0.8, eta), d2 = d_of(0.8, zeta);
    auto d12 = d_of(0.8, eta + lam * RandomVariable(zeta));
    ProcessTensor comb = d1.v;
    ProcessTensor sc = d2.v;
    sc *= lam;
    comb += sc;
    CHECK(max_abs_diff(d12.v, comb) <= 1e-12);
  }
}

TEST_CASE("D agrees under either mixed-derivative source") {
  auto su = make_setup(32, 16);
  auto xi = gaussian_rv(su.e, 0.8, 51);
  auto fwd = solve_mean_field(su.e, su.paths, su.f, xi);
  auto froz = solve_frozen(
      su.e, su.paths, su.f, fwd,
      RandomVariable::constant(su.e.scenario_count(), su.e.path_count(), {0.3}));
  auto eta = gaussian_rv(su.e, 1.0, 52);
  auto a_eta = dx_concatenated(su.e, su.paths, su.f, fwd, eta);
  auto fr = frechet_xi(a_eta, solve_Y_xi(su.e, su.paths, su.f, fwd, a_eta));
  auto y_x = solve_Y_x(su.e, su.paths, su.f, froz, fwd, fr);
  auto a_y = solve_A(su.e, su.paths, su.f, froz.x, fwd.x, {1.0});
  auto d1 = solve_D(su.e, su.paths, su.f, froz, fwd, a_y, y_x, fr, false);
  auto d2 = solve_D(su.e, su.paths, su.f, froz, fwd, a_y, y_x, fr, true);
  CHECK(max_abs_diff(d1.v, d2.v) <= 1e-10);
}

TEST_CASE("tangent solver requires derivative oracles") {
  auto su = make_setup(8, 8);
  struct EvalOnly : CoefficientBundle {
    EvalOnly() : CoefficientBundle(1, 1) {}
    void eval(Coef c, const LawContext&, const double*, double* out) const override {
      std::fill(out, out + out_size(c), 0.0);
    }
    double alpha0(double) const override { return 1.0; }
  } f;
  auto x0 = RandomVariable::constant(su.e.scenario_count(), su.e.path_count(), {1.0});
  auto fwd = solve_mean_field(su.e, su.paths, f, x0);
  CHECK_THROWS_AS(solve_A(su.e, su.paths, f, fwd.x, fwd.x, {1.0}), ConfigError);
}
