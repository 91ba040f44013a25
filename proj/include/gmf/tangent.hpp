#pragma once

// Tangent (derivative) recursions. Each one is the exact derivative of the
// discrete Euler map, not a discretization of a continuous-time tangent SDE,
// so finite-difference remainders against the solvers are limited only by the
// smoothness of the coefficients and floating point.
//
// Kinds:
//   A        Dx X^{x,xi} . y        state derivative of the frozen flow
//   DxConcat Dx X^{xi,eta}          concatenation derivative, initial eta(w)
//   YXi      Y^{xi,eta}             law channel of the Frechet derivative
//   YX       Y^{x,xi,eta}           law channel along the frozen flow
//   C        Dx^2 X^{x,xi}(y, z)    second state derivative
//   D        Dx [Dxi X . eta] . y   mixed second derivative
//
// Both Y recursions start at 0: the initial condition enters the Frechet
// derivative once, through the concatenation term.

#include <functional>
#include <vector>

#include "gmf/coefficients.hpp"
#include "gmf/ensemble.hpp"
#include "gmf/gbrownian.hpp"
#include "gmf/solver.hpp"

namespace gmf {

enum class TangentKind { A, DxConcat, YXi, YX, C, D };

struct TangentSolution {
  TangentKind kind = TangentKind::A;
  ProcessTensor v;
};

namespace detail {

struct TangentSources {
  // Called once per time node before the pointwise sweep; v is the running
  // tangent tensor with nodes <= k valid.
  std::function<void(std::size_t k, const LawContext& ctx, const ProcessTensor& v)>
      begin_node;
  // Accumulates the non-homogeneous source into `add` (pre-zeroed, length
  // out_size(c)); xk is the state-point the derivatives are evaluated at.
  std::function<void(Coef c, std::size_t k, std::size_t s, std::size_t p,
                     const LawContext& ctx, const double* xk, double* add)>
      add;
};

inline ProcessTensor solve_tangent_core(const ScenarioEnsemble& e,
                                        const GBrownianPaths& paths,
                                        const CoefficientBundle& f,
                                        const ProcessTensor& state,
                                        const ProcessTensor& lawproc,
                                        const RandomVariable& v0,
                                        const TangentSources* src) {
  if (!f.has_first_derivatives())
    throw ConfigError("tangent solver requires first-derivative oracles");
  check_shapes(e, paths, f, v0);
  if (state.K != e.grid.node_count() || lawproc.K != e.grid.node_count())
    throw DimensionError("tangent solver: base process grid mismatch");
  const int d = f.dim_d();
  const int n = f.dim_n();
  const double delta = e.grid.delta();
  ProcessTensor v(state.S, state.N, state.K, d);
  write_initial(v, v0);
  std::vector<double> db(f.out_size(Coef::B)), sb(db.size());
  std::vector<double> dh(f.out_size(Coef::H)), sh(dh.size());
  std::vector<double> dg(f.out_size(Coef::G)), sg(dg.size());
  std::vector<double> dqv(static_cast<std::size_t>(n) * n);
  for (std::size_t k = 0; k + 1 < v.K; ++k) {
    const LawContext ctx = f.bind_law(e.grid.node(k), lawproc.node_view(k));
    if (src && src->begin_node) src->begin_node(k, ctx, v);
    for (std::size_t s = 0; s < v.S; ++s) {
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) dqv[i * n + l] = paths.qv_increment(s, k, i, l);
      for (std::size_t p = 0; p < v.N; ++p) {
        const double* xk = state.state(s, p, k);
        const double* vk = v.state(s, p, k);
        double* vk1 = v.state(s, p, k + 1);
        f.dx(Coef::B, ctx, xk, vk, db.data());
        f.dx(Coef::H, ctx, xk, vk, dh.data());
        f.dx(Coef::G, ctx, xk, vk, dg.data());
        std::fill(sb.begin(), sb.end(), 0.0);
        std::fill(sh.begin(), sh.end(), 0.0);
        std::fill(sg.begin(), sg.end(), 0.0);
        if (src && src->add) {
          src->add(Coef::B, k, s, p, ctx, xk, sb.data());
          src->add(Coef::H, k, s, p, ctx, xk, sh.data());
          src->add(Coef::G, k, s, p, ctx, xk, sg.data());
        }
        for (int j = 0; j < d; ++j) {
          double acc = vk[j] + (db[j] + sb[j]) * delta;
          for (int i = 0; i < n; ++i) {
            for (int l = 0; l < n; ++l)
              acc += (dh[(j * n + i) * n + l] + sh[(j * n + i) * n + l]) * dqv[i * n + l];
            const double dbm = paths.b.at(s, p, k + 1, i) - paths.b.at(s, p, k, i);
            acc += (dg[j * n + i] + sg[j * n + i]) * dbm;
          }
          vk1[j] = acc;
          if (std::abs(acc) > kDivergenceGuard)
            throw DivergenceError("tangent state exceeded divergence guard", k, s);
        }
      }
    }
  }
  return v;
}

/// Node-k slice of a tensor sum as a materialized RandomVariable.
inline RandomVariable node_sum(const ProcessTensor& a, const ProcessTensor& b,
                               std::size_t k) {
  RandomVariable rv = RandomVariable::from_view(a.node_view(k));
  for (std::size_t s = 0; s < b.S; ++s)
    for (std::size_t p = 0; p < b.N; ++p)
      for (std::size_t j = 0; j < b.d; ++j) rv.at(s, p, j) += b.at(s, p, k, j);
  return rv;
}

}  // namespace detail

/// A = Dx X . y along the supplied base process: dA = Dx f . A, A_0 = y.
/// `state` supplies the points the derivatives are evaluated at, `lawproc`
/// the law argument (the forward solution for every shipped use).
inline TangentSolution solve_A(const ScenarioEnsemble& e, const GBrownianPaths& paths,
                               const CoefficientBundle& f, const ProcessTensor& state,
                               const ProcessTensor& lawproc,
                               const std::vector<double>& y) {
  TangentSolution t;
  t.kind = TangentKind::A;
  t.v = detail::solve_tangent_core(
      e, paths, f, state, lawproc,
      RandomVariable::constant(state.S, state.N, y), nullptr);
  return t;
}

/// Dx X^{xi,eta}: the A recursion along the forward solution with the random
/// initial condition eta.
inline TangentSolution dx_concatenated(const ScenarioEnsemble& e,
                                       const GBrownianPaths& paths,
                                       const CoefficientBundle& f,
                                       const ForwardSolution& fwd,
                                       const RandomVariable& eta) {
  TangentSolution t;
  t.kind = TangentKind::DxConcat;
  t.v = detail::solve_tangent_core(e, paths, f, fwd.x, fwd.x, eta, nullptr);
  return t;
}

/// Y^{xi,eta}: dY = Dx f . Y + Dxi f . (Dx X^{xi,eta} + Y), Y_0 = 0.
/// a_eta must be dx_concatenated(xi, eta).
inline TangentSolution solve_Y_xi(const ScenarioEnsemble& e, const GBrownianPaths& paths,
                                  const CoefficientBundle& f, const ForwardSolution& fwd,
                                  const TangentSolution& a_eta) {
  detail::TangentSources src;
  RandomVariable dir_rv;
  DirContext dir;
  src.begin_node = [&](std::size_t k, const LawContext& ctx, const ProcessTensor& v) {
    dir_rv = detail::node_sum(a_eta.v, v, k);
    dir = f.bind_dir(ctx, dir_rv.view());
  };
  std::vector<double> scratch;
  src.add = [&](Coef c, std::size_t, std::size_t, std::size_t, const LawContext& ctx,
                const double* xk, double* add) {
    scratch.resize(f.out_size(c));
    f.dxi(c, ctx, xk, dir, scratch.data());
    for (std::size_t i = 0; i < scratch.size(); ++i) add[i] += scratch[i];
  };
  TangentSolution t;
  t.kind = TangentKind::YXi;
  t.v = detail::solve_tangent_core(e, paths, f, fwd.x, fwd.x,
                                   RandomVariable(fwd.x.S, fwd.x.N, f.dim_d()), &src);
  return t;
}

/// Dxi X^xi . eta = Dx X^{xi,eta} + Y^{xi,eta}, summed nodewise.
inline TangentSolution frechet_xi(const TangentSolution& a_eta, const TangentSolution& y) {
  TangentSolution t;
  t.kind = TangentKind::YXi;
  t.v = a_eta.v + y.v;
  return t;
}

/// Y^{x,xi,eta} along the frozen flow: dY = Dx f . Y + Dxi f . (Dxi X^xi eta),
/// Y_0 = 0, with Dx f evaluated at the frozen states and the law argument
/// still the forward solution. `frech` must be frechet_xi of the base pair.
inline TangentSolution solve_Y_x(const ScenarioEnsemble& e, const GBrownianPaths& paths,
                                 const CoefficientBundle& f, const FrozenSolution& froz,
                                 const ForwardSolution& fwd, const TangentSolution& frech) {
  detail::TangentSources src;
  RandomVariable dir_rv;
  DirContext dir;
  src.begin_node = [&](std::size_t k, const LawContext& ctx, const ProcessTensor&) {
    dir_rv = RandomVariable::from_view(frech.v.node_view(k));
    dir = f.bind_dir(ctx, dir_rv.view());
  };
  std::vector<double> scratch;
  src.add = [&](Coef c, std::size_t, std::size_t, std::size_t, const LawContext& ctx,
                const double* xk, double* add) {
    scratch.resize(f.out_size(c));
    f.dxi(c, ctx, xk, dir, scratch.data());
    for (std::size_t i = 0; i < scratch.size(); ++i) add[i] += scratch[i];
  };
  TangentSolution t;
  t.kind = TangentKind::YX;
  t.v = detail::solve_tangent_core(e, paths, f, froz.x, fwd.x,
                                   RandomVariable(froz.x.S, froz.x.N, f.dim_d()), &src);
  return t;
}

/// C = Dx^2 X^{x,xi}(y, z): dC = Dx f . C + Dx^2 f (A_y, A_z), C_0 = 0.
inline TangentSolution solve_C(const ScenarioEnsemble& e, const GBrownianPaths& paths,
                               const CoefficientBundle& f, const FrozenSolution& froz,
                               const ForwardSolution& fwd, const TangentSolution& a_y,
                               const TangentSolution& a_z) {
  if (!f.has_second_derivatives())
    throw ConfigError("solve_C requires second-derivative oracles");
  detail::TangentSources src;
  std::vector<double> scratch;
  src.add = [&](Coef c, std::size_t k, std::size_t s, std::size_t p,
                const LawContext& ctx, const double* xk, double* add) {
    scratch.resize(f.out_size(c));
    f.dxx(c, ctx, xk, a_y.v.state(s, p, k), a_z.v.state(s, p, k), scratch.data());
    for (std::size_t i = 0; i < scratch.size(); ++i) add[i] += scratch[i];
  };
  TangentSolution t;
  t.kind = TangentKind::C;
  t.v = detail::solve_tangent_core(e, paths, f, froz.x, fwd.x,
                                   RandomVariable(froz.x.S, froz.x.N, f.dim_d()), &src);
  return t;
}

/// D = Dx [Dxi X . eta] . y along the frozen flow:
///   dD = Dx f . D + Dx^2 f (A_y, Y^{x,xi,eta}) + DxDxi f (Dxi X^xi eta, A_y),
/// D_0 = 0. With use_dxidx the mixed term is evaluated through the other
/// factorization; the two must agree (interchange identity).
inline TangentSolution solve_D(const ScenarioEnsemble& e, const GBrownianPaths& paths,
                               const CoefficientBundle& f, const FrozenSolution& froz,
                               const ForwardSolution& fwd, const TangentSolution& a_y,
                               const TangentSolution& y_x, const TangentSolution& frech,
                               bool use_dxidx = false) {
  if (!f.has_second_derivatives())
    throw ConfigError("solve_D requires second-derivative oracles");
  detail::TangentSources src;
  RandomVariable dir_rv;
  DirContext dir;
  src.begin_node = [&](std::size_t k, const LawContext& ctx, const ProcessTensor&) {
    dir_rv = RandomVariable::from_view(frech.v.node_view(k));
    dir = f.bind_dir(ctx, dir_rv.view());
  };
  std::vector<double> s1, s2;
  src.add = [&](Coef c, std::size_t k, std::size_t s, std::size_t p,
                const LawContext& ctx, const double* xk, double* add) {
    s1.resize(f.out_size(c));
    s2.resize(f.out_size(c));
    f.dxx(c, ctx, xk, a_y.v.state(s, p, k), y_x.v.state(s, p, k), s1.data());
    if (use_dxidx)
      f.dxidx(c, ctx, xk, a_y.v.state(s, p, k), dir, s2.data());
    else
      f.dxdxi(c, ctx, xk, dir, a_y.v.state(s, p, k), s2.data());
    for (std::size_t i = 0; i < s1.size(); ++i) add[i] += s1[i] + s2[i];
  };
  TangentSolution t;
  t.kind = TangentKind::D;
  t.v = detail::solve_tangent_core(e, paths, f, froz.x, fwd.x,
                                   RandomVariable(froz.x.S, froz.x.N, f.dim_d()), &src);
  return t;
}

}  // namespace gmf
