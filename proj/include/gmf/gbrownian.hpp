#pragma once

// G-Brownian motion synthesis per scenario: B increments are theta * dW with
// Wiener increments shared across scenarios, and the quadratic variation is
// computed analytically as theta theta^T delta (no Monte Carlo noise, and the
// per-step increment bound sigma_lo^2 delta <= d<B^a> <= sigma_bar^2 delta is
// exact). Also the two elementary stochastic integrals I_i and Q_ij.

#include <vector>

#include "gmf/core.hpp"
#include "gmf/ensemble.hpp"

namespace gmf {

struct GBrownianPaths {
  ProcessTensor b;   // dim = n, B_0 = 0
  ProcessTensor qv;  // dim = n*n, <B>_0 = 0

  /// QV increment of <B^i,B^j> on interval k under scenario s; deterministic.
  double qv_increment(std::size_t s, std::size_t k, int i, int j) const {
    const int n = static_cast<int>(std::round(std::sqrt(static_cast<double>(qv.d))));
    // identical across paths; read path 0
    return qv.at(s, 0, k + 1, i * n + j) - qv.at(s, 0, k, i * n + j);
  }
};

inline GBrownianPaths synthesize(const ScenarioEnsemble& e) {
  const std::size_t S = e.scenario_count(), N = e.path_count();
  const std::size_t M = e.grid.steps_m;
  const int n = e.dim_n();
  GBrownianPaths out;
  out.b = ProcessTensor(S, N, M + 1, n);
  out.qv = ProcessTensor(S, N, M + 1, n * n);
  const double delta = e.grid.delta();
  for (std::size_t s = 0; s < S; ++s) {
    // per-interval QV increments theta theta^T delta, shared by all paths
    std::vector<double> dqv(M * n * n);
    for (std::size_t k = 0; k < M; ++k) {
      const auto& th = e.controls[s].values[k];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double acc = 0.0;
          for (int l = 0; l < n; ++l) acc += th[i * n + l] * th[j * n + l];
          dqv[(k * n + i) * n + j] = acc * delta;
        }
    }
    for (std::size_t p = 0; p < N; ++p) {
      for (std::size_t k = 0; k < M; ++k) {
        const auto& th = e.controls[s].values[k];
        for (int i = 0; i < n; ++i) {
          double db = 0.0;
          for (int l = 0; l < n; ++l) db += th[i * n + l] * e.dW(p, k, l);
          out.b.at(s, p, k + 1, i) = out.b.at(s, p, k, i) + db;
        }
        for (int ij = 0; ij < n * n; ++ij)
          out.qv.at(s, p, k + 1, ij) = out.qv.at(s, p, k, ij) + dqv[k * n * n + ij];
      }
    }
  }
  return out;
}

/// Running Ito integral I_i(x)_s = sum_k x_k (B^i_{k+1} - B^i_k): the node-k
/// integrand value multiplies the interval-k increment, which enforces
/// adaptedness structurally. Node 0 is 0.
inline ProcessTensor ito_integral(const ProcessTensor& x, const GBrownianPaths& paths,
                                  int coord_i) {
  const int n = static_cast<int>(paths.b.d);
  if (coord_i < 0 || coord_i >= n) throw DimensionError("ito_integral: coordinate out of range");
  if (x.d != 1) throw DimensionError("ito_integral: scalar integrand required");
  ProcessTensor out(x.S, x.N, x.K, 1);
  for (std::size_t s = 0; s < x.S; ++s)
    for (std::size_t p = 0; p < x.N; ++p)
      for (std::size_t k = 0; k + 1 < x.K; ++k) {
        const double db = paths.b.at(s, p, k + 1, coord_i) - paths.b.at(s, p, k, coord_i);
        out.at(s, p, k + 1) = out.at(s, p, k) + x.at(s, p, k) * db;
      }
  return out;
}

/// Running Riemann-Stieltjes integral Q_ij(x)_s against the QV increments.
inline ProcessTensor qv_integral(const ProcessTensor& x, const GBrownianPaths& paths,
                                 int i, int j) {
  const int n = static_cast<int>(paths.b.d);
  if (i < 0 || i >= n || j < 0 || j >= n)
    throw DimensionError("qv_integral: coordinate out of range");
  if (x.d != 1) throw DimensionError("qv_integral: scalar integrand required");
  ProcessTensor out(x.S, x.N, x.K, 1);
  for (std::size_t s = 0; s < x.S; ++s)
    for (std::size_t p = 0; p < x.N; ++p)
      for (std::size_t k = 0; k + 1 < x.K; ++k) {
        const double dq =
            paths.qv.at(s, p, k + 1, i * n + j) - paths.qv.at(s, p, k, i * n + j);
        out.at(s, p, k + 1) = out.at(s, p, k) + x.at(s, p, k) * dq;
      }
  return out;
}

}  // namespace gmf
