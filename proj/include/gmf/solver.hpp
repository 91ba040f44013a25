#pragma once

// Forward Euler schemes for the mean-field dynamics
//   dX = b(t, X, law X) dt + h_ij(t, X, law X) d<B^i,B^j> + g_i(t, X, law X) dB^i
// and the two derived recursions: the frozen scheme (law argument pinned to a
// previously computed forward solution) and concatenation (frozen recursion
// started from an arbitrary random initial condition). All three share one
// Euler step so their algebraic identities hold to double precision.

#include <vector>

#include "gmf/coefficients.hpp"
#include "gmf/ensemble.hpp"
#include "gmf/gbrownian.hpp"

namespace gmf {

struct ForwardSolution {
  ProcessTensor x;
};

struct FrozenSolution {
  ProcessTensor x;
};

namespace detail {

constexpr double kDivergenceGuard = 1e12;

/// One Euler step for all (scenario, path) points at node k, reading node k of
/// `x` and writing node k + 1. The law contexts carry the mean-field argument,
/// one per scenario (bound to whichever process supplies the law).
inline void euler_step(ProcessTensor& x, std::size_t k, const ScenarioEnsemble& e,
                       const GBrownianPaths& paths, const CoefficientBundle& f,
                       const std::vector<LawContext>& law) {
  const int d = f.dim_d();
  const int n = f.dim_n();
  const double delta = e.grid.delta();
  std::vector<double> b(f.out_size(Coef::B));
  std::vector<double> h(f.out_size(Coef::H));
  std::vector<double> g(f.out_size(Coef::G));
  std::vector<double> dqv(static_cast<std::size_t>(n) * n);
  for (std::size_t s = 0; s < x.S; ++s) {
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) dqv[i * n + l] = paths.qv_increment(s, k, i, l);
    for (std::size_t p = 0; p < x.N; ++p) {
      const double* xk = x.state(s, p, k);
      double* xk1 = x.state(s, p, k + 1);
      f.eval(Coef::B, law[s], xk, b.data());
      f.eval(Coef::H, law[s], xk, h.data());
      f.eval(Coef::G, law[s], xk, g.data());
      for (int j = 0; j < d; ++j) {
        double acc = xk[j] + b[j] * delta;
        for (int i = 0; i < n; ++i) {
          for (int l = 0; l < n; ++l) acc += h[(j * n + i) * n + l] * dqv[i * n + l];
          const double db = paths.b.at(s, p, k + 1, i) - paths.b.at(s, p, k, i);
          acc += g[j * n + i] * db;
        }
        xk1[j] = acc;
        if (std::abs(acc) > kDivergenceGuard)
          throw DivergenceError("forward Euler state exceeded divergence guard", k, s);
      }
    }
  }
}

inline void check_shapes(const ScenarioEnsemble& e, const GBrownianPaths& paths,
                         const CoefficientBundle& f, const RandomVariable& x0) {
  if (f.dim_n() != e.dim_n()) throw DimensionError("solver: coefficient n != ensemble n");
  if (x0.S != e.scenario_count() || x0.N != e.path_count() ||
      x0.d != static_cast<std::size_t>(f.dim_d()))
    throw DimensionError("solver: initial condition shape mismatch");
  if (paths.b.S != e.scenario_count() || paths.b.N != e.path_count() ||
      paths.b.K != e.grid.node_count())
    throw DimensionError("solver: driver paths shape mismatch");
}

inline void write_initial(ProcessTensor& x, const RandomVariable& x0) {
  for (std::size_t s = 0; s < x.S; ++s)
    for (std::size_t p = 0; p < x.N; ++p)
      for (std::size_t j = 0; j < x.d; ++j) x.at(s, p, 0, j) = x0.at(s, p, j);
}

}  // namespace detail

/// Mean-field forward Euler: the law argument at node k is the node-k ensemble
/// slice of the solution itself, per scenario.
inline ForwardSolution solve_mean_field(const ScenarioEnsemble& e,
                                        const GBrownianPaths& paths,
                                        const CoefficientBundle& f,
                                        const RandomVariable& x0) {
  detail::check_shapes(e, paths, f, x0);
  ForwardSolution sol;
  sol.x = ProcessTensor(e.scenario_count(), e.path_count(), e.grid.node_count(),
                        f.dim_d());
  detail::write_initial(sol.x, x0);
  std::vector<LawContext> law(e.scenario_count());
  for (std::size_t k = 0; k + 1 < sol.x.K; ++k) {
    const double t = e.grid.node(k);
    law.assign(e.scenario_count(), f.bind_law(t, sol.x.node_view(k)));
    detail::euler_step(sol.x, k, e, paths, f, law);
  }
  return sol;
}

/// Frozen Euler: same step map, but the law argument at node k comes from the
/// supplied forward solution instead of the running state.
inline FrozenSolution solve_frozen(const ScenarioEnsemble& e, const GBrownianPaths& paths,
                                   const CoefficientBundle& f, const ForwardSolution& fwd,
                                   const RandomVariable& x0) {
  detail::check_shapes(e, paths, f, x0);
  if (fwd.x.K != e.grid.node_count())
    throw DimensionError("solve_frozen: forward solution grid mismatch");
  FrozenSolution sol;
  sol.x = ProcessTensor(e.scenario_count(), e.path_count(), e.grid.node_count(),
                        f.dim_d());
  detail::write_initial(sol.x, x0);
  std::vector<LawContext> law(e.scenario_count());
  for (std::size_t k = 0; k + 1 < sol.x.K; ++k) {
    const double t = e.grid.node(k);
    law.assign(e.scenario_count(), f.bind_law(t, fwd.x.node_view(k)));
    detail::euler_step(sol.x, k, e, paths, f, law);
  }
  return sol;
}

/// Concatenated process X^{xi, eta}: the frozen recursion started from eta.
/// With eta equal to the forward initial condition this reproduces the forward
/// solution exactly (same step map, same law argument).
inline FrozenSolution concatenate(const ScenarioEnsemble& e, const GBrownianPaths& paths,
                                  const CoefficientBundle& f, const ForwardSolution& fwd,
                                  const RandomVariable& eta) {
  return solve_frozen(e, paths, f, fwd, eta);
}

}  // namespace gmf
