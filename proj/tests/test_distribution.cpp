#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gmf/distribution.hpp"

using namespace gmf;

namespace {

RandomVariable gaussian_rv(std::size_t S, std::size_t N, std::size_t d, double mean,
                           double scale, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(mean, scale);
  RandomVariable rv(S, N, d);
  for (double& v : rv.values) v = nd(gen);
  return rv;
}

double lp_of(const RandomVariable& x, double p) { return lp_norm(x, p); }

}  // namespace

TEST_CASE("metric of a distribution against itself is zero") {
  auto xi = gaussian_rv(3, 400, 1, 0.0, 1.0, 7);
  SublinearDistribution F{xi};
  auto fam = Lip1Family::for_sources(xi, xi);
  auto cert = metric_d(F, F, fam);
  CHECK(cert.value <= 1e-12);
}

TEST_CASE("metric certifies a constant shift within two percent") {
  const double shift = 0.37;
  auto xi = gaussian_rv(3, 600, 1, 0.0, 1.0, 11);
  RandomVariable eta = xi;
  for (double& v : eta.values) v += shift;
  SublinearDistribution F{xi}, G{eta};
  auto fam = Lip1Family::for_sources(xi, eta);
  auto cert = metric_d(F, G, fam);
  // d(F, G) = shift, attained by the identity test function; the certified
  // value is a lower bound and must recover almost all of it.
  CHECK(cert.value <= shift + 1e-12);
  CHECK(cert.value >= shift * 0.98);
  // the certificate is replayable: evaluating phi* reproduces the value
  auto phi = fam.make(cert.slopes);
  const double replay =
      cert.sign * (F.apply(phi) - G.apply(phi));
  CHECK(replay == Catch::Approx(cert.value).margin(1e-10));
}

TEST_CASE("metric is dominated by the L1 and L2 couplings") {
  auto xi = gaussian_rv(2, 500, 1, 0.0, 1.0, 13);
  auto zeta = gaussian_rv(2, 500, 1, 0.2, 0.9, 14);
  SublinearDistribution F{xi}, G{zeta};
  auto fam = Lip1Family::for_sources(xi, zeta);
  auto cert = metric_d(F, G, fam);
  const double l1 = lp_of(xi - zeta, 1.0);
  const double l2 = lp_of(xi - zeta, 2.0);
  CHECK(cert.value <= l1 + 1e-12);
  CHECK(l1 <= l2 + 1e-12);
}

TEST_CASE("metric lower bounds are symmetric and satisfy the triangle inequality") {
  // single scenario: the ascent objective is linear in the slopes, so the
  // certified value is the exact family supremum and a genuine metric.
  auto a = gaussian_rv(1, 300, 1, 0.0, 1.0, 21);
  auto b = gaussian_rv(1, 300, 1, 0.4, 1.1, 22);
  auto c = gaussian_rv(1, 300, 1, -0.3, 0.8, 23);
  SublinearDistribution F{a}, G{b}, H{c};
  auto fam = Lip1Family::for_sources(a, b);
  // one shared family makes the three values comparable suprema
  const double dfg = metric_d(F, G, fam).value;
  const double dgf = metric_d(G, F, fam).value;
  const double dfh = metric_d(F, H, fam).value;
  const double dhg = metric_d(H, G, fam).value;
  CHECK(dfg == Catch::Approx(dgf).margin(1e-12));
  CHECK(dfg <= dfh + dhg + 1e-12);
}

TEST_CASE("family validation") {
  auto xi = gaussian_rv(1, 50, 1, 0.0, 1.0, 31);
  auto fam = Lip1Family::for_sources(xi, xi);
  std::vector<double> bad(fam.segment_count(), 1.0);
  bad[0] = 1.5;
  CHECK_THROWS_AS(fam.make(bad), ParameterError);
  CHECK_THROWS_AS(fam.make(std::vector<double>(3, 1.0)), DimensionError);
  auto xi2 = gaussian_rv(1, 50, 2, 0.0, 1.0, 32);
  CHECK_THROWS_AS(Lip1Family::for_sources(xi2, xi2), DimensionError);
}

TEST_CASE("dictionary metric in dimension two detects a mean shift") {
  auto xi = gaussian_rv(2, 400, 2, 0.0, 1.0, 41);
  RandomVariable eta = xi;
  for (std::size_t i = 0; i < eta.values.size(); i += 2) eta.values[i] += 0.5;
  SublinearDistribution F{xi}, G{eta};
  auto fam = Lip1Family::dictionary_for(xi, eta, 64, 42);
  auto cert = metric_d(F, G, fam);
  CHECK(cert.value > 0.3);
  CHECK(cert.value <= 0.5 + 1e-12);
}

TEST_CASE("lifted gateaux derivative is exact for linear functionals") {
  auto xi = gaussian_rv(2, 200, 1, 0.3, 1.0, 51);
  LiftedFn f_hat = [](const RandomVariable& z) {
    RandomVariable ev(z.S, z.N, 1);
    for (std::size_t s = 0; s < z.S; ++s)
      for (std::size_t p = 0; p < z.N; ++p) ev.at(s, p) = 2.0 * z.at(s, p, 0);
    return sublinear_expectation(ev);
  };
  auto g = lifted_gateaux(f_hat, xi, {1.0});
  CHECK(g.converged);
  CHECK_FALSE(g.kink_detected);
  CHECK(g.value == Catch::Approx(2.0).margin(1e-10));
}

TEST_CASE("lifted gateaux matches the closed form for the squared L2 norm") {
  auto xi = gaussian_rv(1, 400, 1, 0.5, 0.7, 52);
  LiftedFn f_hat = [](const RandomVariable& z) {
    RandomVariable ev(z.S, z.N, 1);
    for (std::size_t s = 0; s < z.S; ++s)
      for (std::size_t p = 0; p < z.N; ++p) ev.at(s, p) = sqr(z.at(s, p, 0));
    return sublinear_expectation(ev);
  };
  // single scenario: derivative in direction 1 is 2 E[xi]
  RandomVariable mean_rv = xi;
  const double expect = 2.0 * sublinear_expectation(mean_rv);
  auto g = lifted_gateaux(f_hat, xi, {1.0});
  CHECK(g.converged);
  CHECK(g.value == Catch::Approx(expect).margin(1e-8));
}

TEST_CASE("a scenario tie produces a kink, a unique argmax does not") {
  // scenario 0 concentrated at +1, scenario 1 at -1; f_hat = E[.] ties them
  // under the absolute value and the one-sided slopes disagree.
  RandomVariable xi(2, 64, 1);
  for (std::size_t p = 0; p < 64; ++p) {
    xi.at(0, p) = 1.0;
    xi.at(1, p) = -1.0;
  }
  LiftedFn f_abs = [](const RandomVariable& z) {
    RandomVariable ev(z.S, z.N, 1);
    for (std::size_t s = 0; s < z.S; ++s)
      for (std::size_t p = 0; p < z.N; ++p) ev.at(s, p) = std::abs(z.at(s, p, 0));
    return sublinear_expectation(ev);
  };
  auto tied = lifted_gateaux(f_abs, xi, {1.0});
  CHECK(tied.kink_detected);
  CHECK_FALSE(tied.converged);
  // break the tie: scenario 0 now dominates strictly
  for (std::size_t p = 0; p < 64; ++p) xi.at(0, p) = 1.5;
  auto unique = lifted_gateaux(f_abs, xi, {1.0});
  CHECK_FALSE(unique.kink_detected);
  CHECK(unique.converged);
  CHECK(unique.value == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("path permutations preserve the distribution exactly") {
  auto xi = gaussian_rv(3, 257, 1, 0.0, 1.0, 61);
  for (auto kind : {Permutation::Identity, Permutation::Reverse, Permutation::Shuffle}) {
    auto eta = permute_paths(xi, kind, 5);
    SublinearDistribution F{xi}, G{eta};
    auto fam = Lip1Family::for_sources(xi, eta);
    // spot-check F(phi) = G(phi) for a few family members
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> us(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> slopes(fam.segment_count());
      for (double& s : slopes) s = us(gen);
      auto phi = fam.make(slopes);
      CHECK(F.apply(phi) == Catch::Approx(G.apply(phi)).margin(1e-12));
    }
  }
}

TEST_CASE("representative independence holds for law functionals and fails for path-dependent ones") {
  auto xi = gaussian_rv(2, 128, 1, 0.4, 0.8, 71);
  LiftedFn law_only = [](const RandomVariable& z) {
    RandomVariable ev(z.S, z.N, 1);
    for (std::size_t s = 0; s < z.S; ++s)
      for (std::size_t p = 0; p < z.N; ++p)
        ev.at(s, p) = std::tanh(z.at(s, p, 0));
    return sublinear_expectation(ev);
  };
  const std::vector<std::vector<double>> dirs{{1.0}, {-0.5}};
  auto ok = representative_independence(law_only, xi, Permutation::Shuffle, dirs, 3);
  CHECK(ok.pass);
  CHECK(ok.max_difference <= 1e-8);

  // planted violation: nonlinear in one fixed path coordinate, so its
  // derivative depends on which sample sits at path 0
  LiftedFn path_dep = [&law_only](const RandomVariable& z) {
    return law_only(z) + 0.1 * sqr(z.at(0, 0, 0));
  };
  auto bad = representative_independence(path_dep, xi, Permutation::Reverse, dirs, 3);
  CHECK_FALSE(bad.pass);
}

TEST_CASE("distributional derivative closed forms") {
  auto xi = gaussian_rv(1, 200, 1, 0.2, 0.6, 81);
  auto eta = gaussian_rv(1, 200, 1, -0.1, 0.5, 82);
  // f_hat(z) = E[z]: shifting by the constant c moves the mean by c, so the
  // kernel is the identity and del f = E[eta].
  LiftedFn mean_fn = [](const RandomVariable& z) { return sublinear_expectation(z); };
  auto d1 = distributional_derivative(mean_fn, xi, eta);
  REQUIRE(d1.ok);
  CHECK(d1.value == Catch::Approx(sublinear_expectation(eta)).margin(1e-8));
  // constant functional: derivative 0 at every support point
  LiftedFn const_fn = [](const RandomVariable&) { return 3.5; };
  auto d0 = distributional_derivative(const_fn, xi, eta);
  REQUIRE(d0.ok);
  CHECK(d0.value == Catch::Approx(0.0).margin(1e-12));
  // deterministic eta = c: reduces to the single Gateaux derivative at c.
  LiftedFn sq_fn = [](const RandomVariable& z) {
    RandomVariable ev(z.S, z.N, 1);
    for (std::size_t s = 0; s < z.S; ++s)
      for (std::size_t p = 0; p < z.N; ++p) ev.at(s, p) = sqr(z.at(s, p, 0));
    return sublinear_expectation(ev);
  };
  auto c_rv = RandomVariable::constant(1, 200, {0.7});
  auto dc = distributional_derivative(sq_fn, xi, c_rv);
  REQUIRE(dc.ok);
  auto g = lifted_gateaux(sq_fn, xi, {0.7});
  REQUIRE(g.converged);
  CHECK(dc.value == Catch::Approx(g.value).margin(1e-9));
}

TEST_CASE("distributional derivative refuses on a kink") {
  RandomVariable xi(2, 32, 1);
  for (std::size_t p = 0; p < 32; ++p) {
    xi.at(0, p) = 1.0;
    xi.at(1, p) = -1.0;
  }
  LiftedFn f_abs = [](const RandomVariable& z) {
    RandomVariable ev(z.S, z.N, 1);
    for (std::size_t s = 0; s < z.S; ++s)
      for (std::size_t p = 0; p < z.N; ++p) ev.at(s, p) = std::abs(z.at(s, p, 0));
    return sublinear_expectation(ev);
  };
  auto eta = gaussian_rv(2, 32, 1, 0.0, 1.0, 91);
  auto d = distributional_derivative(f_abs, xi, eta);
  CHECK_FALSE(d.ok);
  CHECK_FALSE(d.reason.empty());
}

TEST_CASE("distribution axioms hold on random test pairs") {
  auto xi = gaussian_rv(3, 300, 1, 0.0, 1.2, 101);
  SublinearDistribution F{xi};
  auto rep = check_distribution_axioms(F, 100, 7);
  INFO("cp=" << rep.constant_preservation << " mono=" << rep.monotonicity
              << " hom=" << rep.homogeneity << " sub=" << rep.subadditivity
              << " lip=" << rep.lip_boundedness);
  CHECK(rep.pass);
}
