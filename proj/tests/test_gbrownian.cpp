#include <catch_amalgamated.hpp>

#include "gmf/gbrownian.hpp"

using namespace gmf;

namespace {

ScenarioEnsemble make_ensemble(std::size_t paths = 64, std::size_t steps = 16,
                               std::uint64_t seed = 5) {
  auto s = SigmaSet::interval(0.7, 1.3);
  TimeGrid g(0.0, 1.0, steps);
  return ScenarioEnsemble::make(s, g, default_controls(s, g), paths, seed);
}

}  // namespace

TEST_CASE("qv increments are deterministic theta^2 delta within the sigma band") {
  auto e = make_ensemble();
  auto bp = synthesize(e);
  const double delta = e.grid.delta();
  const double lo = 0.7 * 0.7 * delta, hi = 1.3 * 1.3 * delta;
  for (std::size_t s = 0; s < e.scenario_count(); ++s) {
    for (std::size_t k = 0; k < e.grid.steps_m; ++k) {
      const double theta = e.controls[s].values[k][0];
      const double dq = bp.qv_increment(s, k, 0, 0);
      // differenced from the cumulative tensor, so only ULP-level accurate
      CHECK(dq == Catch::Approx(theta * theta * delta).margin(1e-15));
      CHECK(dq >= lo - 1e-15);
      CHECK(dq <= hi + 1e-15);
    }
  }
  // QV is identical across paths within a scenario
  for (std::size_t p = 1; p < e.path_count(); ++p)
    CHECK(bp.qv.at(0, p, e.grid.steps_m, 0) == bp.qv.at(0, 0, e.grid.steps_m, 0));
}

TEST_CASE("b increments are theta dW with common random numbers") {
  auto e = make_ensemble();
  auto bp = synthesize(e);
  for (std::size_t s = 0; s < e.scenario_count(); ++s) {
    const double theta = e.controls[s].values[0][0];
    for (std::size_t p = 0; p < 4; ++p)
      for (std::size_t k = 0; k < e.grid.steps_m; ++k) {
        const double db = bp.b.at(s, p, k + 1, 0) - bp.b.at(s, p, k, 0);
        CHECK(db == Catch::Approx(theta * e.dW(p, k, 0)).margin(1e-15));
      }
  }
  CHECK(bp.b.at(0, 0, 0, 0) == 0.0);
}

TEST_CASE("ito integral: node 0 zero, adapted hand recursion") {
  auto e = make_ensemble(4, 4);
  auto bp = synthesize(e);
  ProcessTensor x(e.scenario_count(), 4, 5, 1, 1.0);
  x.at(0, 0, 1) = 2.0;
  auto it = ito_integral(x, bp, 0);
  CHECK(it.at(0, 0, 0) == 0.0);
  const double db0 = bp.b.at(0, 0, 1, 0) - bp.b.at(0, 0, 0, 0);
  const double db1 = bp.b.at(0, 0, 2, 0) - bp.b.at(0, 0, 1, 0);
  CHECK(it.at(0, 0, 1) == Catch::Approx(1.0 * db0));
  CHECK(it.at(0, 0, 2) == Catch::Approx(1.0 * db0 + 2.0 * db1));
  CHECK_THROWS_AS(ito_integral(x, bp, 1), DimensionError);
}

TEST_CASE("qv integral bound: |int x dQV| <= sigma_bar^2 sum |x| delta") {
  auto e = make_ensemble(32, 16, 9);
  auto bp = synthesize(e);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  ProcessTensor x(e.scenario_count(), e.path_count(), e.grid.node_count(), 1);
  for (double& v : x.values) v = nd(gen);
  auto qi = qv_integral(x, bp, 0, 0);
  const double sb2 = 1.3 * 1.3;
  for (std::size_t s = 0; s < e.scenario_count(); ++s)
    for (std::size_t p = 0; p < e.path_count(); ++p) {
      double bound = 0.0;
      for (std::size_t k = 0; k < e.grid.steps_m; ++k)
        bound += std::abs(x.at(s, p, k)) * e.grid.delta();
      CHECK(std::abs(qi.at(s, p, e.grid.steps_m)) <= sb2 * bound + 1e-12);
    }
}

TEST_CASE("integration by parts residual decays under grid refinement") {
  // residual B_T^2 - 2 int B dB - <B>_T = sum (dB)^2 - <B>_T, order delta^{1/2}
  auto s = SigmaSet::interval(1.0, 1.0);
  std::vector<double> resid;
  for (std::size_t m : {32u, 64u, 128u, 256u}) {
    TimeGrid g(0.0, 1.0, m);
    auto e = ScenarioEnsemble::make(s, g, default_controls(s, g), 4000, 21);
    auto bp = synthesize(e);
    auto it = ito_integral(bp.b, bp, 0);
    std::vector<double> buf(e.path_count());
    for (std::size_t p = 0; p < e.path_count(); ++p) {
      const double bt = bp.b.at(0, p, m, 0);
      buf[p] = std::abs(bt * bt - 2.0 * it.at(0, p, m) - bp.qv.at(0, p, m, 0));
    }
    resid.push_back(pairwise_mean(buf));
  }
  for (std::size_t i = 1; i < resid.size(); ++i) CHECK(resid[i] < resid[i - 1]);
  CHECK(resid.front() / resid.back() >= 1.5);
}
