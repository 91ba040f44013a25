#pragma once

// Finite scenario ensemble: the volatility uncertainty set, piecewise-constant
// volatility controls, shared Wiener increments, random variables and process
// tensors indexed by (scenario, path[, node], dim), the sublinear expectation
// and the L^p / H^p / M*^p norms over it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "gmf/core.hpp"

namespace gmf {

/// Convex compact set of symmetric PSD volatility matrices. Either a scalar
/// interval [sigma_low, sigma_high] (n = 1) or an explicit vertex list.
struct SigmaSet {
  int dim_n = 1;
  bool is_interval = true;
  double sigma_low = 0.0;
  double sigma_high = 0.0;
  std::vector<std::vector<double>> vertex_list;  // each n*n, row-major

  static SigmaSet interval(double lo, double hi) {
    if (!(0.0 <= lo && lo <= hi))
      throw ParameterError("SigmaSet: need 0 <= sigma_low <= sigma_high");
    SigmaSet s;
    s.dim_n = 1;
    s.is_interval = true;
    s.sigma_low = lo;
    s.sigma_high = hi;
    return s;
  }

  static SigmaSet vertices(int n, std::vector<std::vector<double>> vs) {
    if (vs.empty()) throw ParameterError("SigmaSet: vertex list empty");
    for (const auto& m : vs) {
      if (m.size() != static_cast<std::size_t>(n * n))
        throw DimensionError("SigmaSet: vertex has wrong size");
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j)
          if (std::abs(m[i * n + j] - m[j * n + i]) > 1e-12)
            throw ParameterError("SigmaSet: vertex not symmetric");
      // Gershgorin lower bound is enough for the -1e-12 eigenvalue check
      // only when it is nonnegative; fall back to power-iteration-free exact
      // check for n <= 2, which covers every shipped configuration.
      if (n == 1) {
        if (m[0] < -1e-12) throw ParameterError("SigmaSet: vertex not PSD");
      } else if (n == 2) {
        const double tr = m[0] + m[3];
        const double det = m[0] * m[3] - m[1] * m[2];
        const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
        if (tr / 2 - disc < -1e-12) throw ParameterError("SigmaSet: vertex not PSD");
      } else {
        double min_gersh = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
          double off = 0.0;
          for (int j = 0; j < n; ++j)
            if (j != i) off += std::abs(m[i * n + j]);
          min_gersh = std::min(min_gersh, m[i * n + i] - off);
        }
        if (min_gersh < -1e-12) throw ParameterError("SigmaSet: vertex may not be PSD");
      }
    }
    SigmaSet s;
    s.dim_n = n;
    s.is_interval = false;
    s.vertex_list = std::move(vs);
    return s;
  }

  /// Per-coordinate maximum volatility sigma_bar_aa over the set.
  double sigma_bar(int a) const {
    if (is_interval) return sigma_high;
    double m = 0.0;
    for (const auto& v : vertex_list) m = std::max(m, v[a * dim_n + a]);
    return m;
  }

  double sigma_underbar(int a) const {
    if (is_interval) return sigma_low;
    double m = std::numeric_limits<double>::infinity();
    for (const auto& v : vertex_list) m = std::min(m, v[a * dim_n + a]);
    return m;
  }

  bool contains(const std::vector<double>& theta) const {
    if (theta.size() != static_cast<std::size_t>(dim_n * dim_n)) return false;
    if (is_interval) return theta[0] >= sigma_low - 1e-12 && theta[0] <= sigma_high + 1e-12;
    for (const auto& v : vertex_list) {
      bool eq = true;
      for (std::size_t i = 0; i < v.size(); ++i)
        if (std::abs(v[i] - theta[i]) > 1e-12) { eq = false; break; }
      if (eq) return true;
    }
    return false;
  }
};

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  std::size_t steps_m = 1;

  TimeGrid() = default;
  TimeGrid(double t0, double t1, std::size_t m) : t_start(t0), t_end(t1), steps_m(m) {
    if (!(t_start < t_end)) throw ParameterError("TimeGrid: t_start < t_end required");
    if (m < 1) throw ParameterError("TimeGrid: steps_m >= 1 required");
  }

  double delta() const { return (t_end - t_start) / static_cast<double>(steps_m); }
  double node(std::size_t k) const { return t_start + static_cast<double>(k) * delta(); }
  std::size_t node_count() const { return steps_m + 1; }
  double horizon() const { return t_end - t_start; }
};

/// Piecewise-constant deterministic volatility control: one Sigma element per
/// grid interval, stored as an n x n matrix.
struct VolatilityControl {
  std::vector<std::vector<double>> values;  // steps_m entries, each n*n

  static VolatilityControl constant(const std::vector<double>& theta, std::size_t steps) {
    VolatilityControl c;
    c.values.assign(steps, theta);
    return c;
  }

  void validate(const SigmaSet& sigma, std::size_t steps) const {
    if (values.size() != steps)
      throw DimensionError("VolatilityControl: length must equal steps_m");
    for (const auto& th : values)
      if (!sigma.contains(th))
        throw ParameterError("VolatilityControl: value outside SigmaSet");
  }
};

/// Extreme constant controls, plus optional alternating switching controls on
/// a macro grid. Worst cases of monotone payoffs sit on the constant extremes;
/// the switching controls probe path-dependent payoffs.
inline std::vector<VolatilityControl> default_controls(const SigmaSet& sigma,
                                                       const TimeGrid& grid,
                                                       std::size_t switching_count = 0,
                                                       std::size_t macro_blocks = 4) {
  std::vector<std::vector<double>> extremes;
  if (sigma.is_interval) {
    extremes.push_back({sigma.sigma_low});
    if (sigma.sigma_high != sigma.sigma_low) extremes.push_back({sigma.sigma_high});
  } else {
    extremes = sigma.vertex_list;
  }
  std::vector<VolatilityControl> out;
  for (const auto& e : extremes)
    out.push_back(VolatilityControl::constant(e, grid.steps_m));
  for (std::size_t k = 0; k < switching_count && extremes.size() > 1; ++k) {
    VolatilityControl c;
    c.values.resize(grid.steps_m);
    const std::size_t block = std::max<std::size_t>(1, grid.steps_m / macro_blocks);
    for (std::size_t i = 0; i < grid.steps_m; ++i) {
      const std::size_t phase = (i / block + k) % extremes.size();
      c.values[i] = extremes[phase];
    }
    out.push_back(std::move(c));
  }
  return out;
}

/// Non-owning view of an (S x N x d) slice; dim index is always contiguous.
struct RvView {
  const double* base = nullptr;
  std::size_t S = 0, N = 0, d = 0;
  std::ptrdiff_t scen_stride = 0, path_stride = 0;

  const double* at(std::size_t s, std::size_t p) const {
    return base + static_cast<std::ptrdiff_t>(s) * scen_stride +
           static_cast<std::ptrdiff_t>(p) * path_stride;
  }
  double scalar(std::size_t s, std::size_t p) const { return *at(s, p); }
};

/// Finite stand-in for an element of L^{2,d}: values on (scenario, path, dim).
struct RandomVariable {
  std::vector<double> values;  // S*N*d, row-major
  std::size_t S = 0, N = 0, d = 0;

  RandomVariable() = default;
  RandomVariable(std::size_t S, std::size_t N, std::size_t d, double fill = 0.0)
      : values(S * N * d, fill), S(S), N(N), d(d) {}

  double& at(std::size_t s, std::size_t p, std::size_t j = 0) {
    return values[(s * N + p) * d + j];
  }
  double at(std::size_t s, std::size_t p, std::size_t j = 0) const {
    return values[(s * N + p) * d + j];
  }

  RvView view() const {
    return RvView{values.data(), S, N, d,
                  static_cast<std::ptrdiff_t>(N * d), static_cast<std::ptrdiff_t>(d)};
  }

  static RandomVariable constant(std::size_t S, std::size_t N,
                                 const std::vector<double>& c) {
    RandomVariable rv(S, N, c.size());
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t p = 0; p < N; ++p)
        for (std::size_t j = 0; j < c.size(); ++j) rv.at(s, p, j) = c[j];
    return rv;
  }

  static RandomVariable from_view(const RvView& v) {
    RandomVariable rv(v.S, v.N, v.d);
    for (std::size_t s = 0; s < v.S; ++s)
      for (std::size_t p = 0; p < v.N; ++p) {
        const double* src = v.at(s, p);
        for (std::size_t j = 0; j < v.d; ++j) rv.at(s, p, j) = src[j];
      }
    return rv;
  }

  bool all_finite() const {
    for (double x : values)
      if (!std::isfinite(x)) return false;
    return true;
  }

  RandomVariable& operator+=(const RandomVariable& o) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
  }
  RandomVariable& operator-=(const RandomVariable& o) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
  }
  RandomVariable& operator*=(double c) {
    for (double& x : values) x *= c;
    return *this;
  }
  friend RandomVariable operator+(RandomVariable a, const RandomVariable& b) { return a += b; }
  friend RandomVariable operator-(RandomVariable a, const RandomVariable& b) { return a -= b; }
  friend RandomVariable operator*(double c, RandomVariable a) { return a *= c; }
};

/// Finite stand-in for a process in H^{p,d}(t,T): values on
/// (scenario, path, node, dim) with node 0 the initial condition.
struct ProcessTensor {
  std::vector<double> values;  // S*N*K*d, row-major, K = steps_m + 1
  std::size_t S = 0, N = 0, K = 0, d = 0;

  ProcessTensor() = default;
  ProcessTensor(std::size_t S, std::size_t N, std::size_t K, std::size_t d,
                double fill = 0.0)
      : values(S * N * K * d, fill), S(S), N(N), K(K), d(d) {}

  double& at(std::size_t s, std::size_t p, std::size_t k, std::size_t j = 0) {
    return values[((s * N + p) * K + k) * d + j];
  }
  double at(std::size_t s, std::size_t p, std::size_t k, std::size_t j = 0) const {
    return values[((s * N + p) * K + k) * d + j];
  }
  double* state(std::size_t s, std::size_t p, std::size_t k) {
    return values.data() + ((s * N + p) * K + k) * d;
  }
  const double* state(std::size_t s, std::size_t p, std::size_t k) const {
    return values.data() + ((s * N + p) * K + k) * d;
  }

  /// Node-k ensemble slice, usable wherever a RandomVariable is expected.
  RvView node_view(std::size_t k) const {
    return RvView{values.data() + k * d, S, N, d,
                  static_cast<std::ptrdiff_t>(N * K * d),
                  static_cast<std::ptrdiff_t>(K * d)};
  }

  bool all_finite() const {
    for (double x : values)
      if (!std::isfinite(x)) return false;
    return true;
  }

  ProcessTensor& operator+=(const ProcessTensor& o) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
  }
  ProcessTensor& operator-=(const ProcessTensor& o) {
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
  }
  ProcessTensor& operator*=(double c) {
    for (double& x : values) x *= c;
    return *this;
  }
  friend ProcessTensor operator-(ProcessTensor a, const ProcessTensor& b) { return a -= b; }
  friend ProcessTensor operator+(ProcessTensor a, const ProcessTensor& b) { return a += b; }
};

/// S volatility controls x N Wiener paths on a shared grid. Wiener increments
/// are common across scenarios (common random numbers) and reproduce
/// bit-exactly from the seed.
struct ScenarioEnsemble {
  SigmaSet sigma;
  TimeGrid grid;
  std::vector<VolatilityControl> controls;
  std::vector<double> dw;  // N * steps_m * n, iid Normal(0, delta)
  std::size_t path_count_n = 0;
  std::uint64_t rng_seed = 0;

  std::size_t scenario_count() const { return controls.size(); }
  std::size_t path_count() const { return path_count_n; }
  int dim_n() const { return sigma.dim_n; }

  double dW(std::size_t p, std::size_t k, int i) const {
    return dw[(p * grid.steps_m + k) * sigma.dim_n + i];
  }

  static ScenarioEnsemble make(SigmaSet sigma, TimeGrid grid,
                               std::vector<VolatilityControl> controls,
                               std::size_t paths, std::uint64_t seed) {
    if (controls.empty()) throw ParameterError("ScenarioEnsemble: S >= 1 required");
    if (paths < 1) throw ParameterError("ScenarioEnsemble: N >= 1 required");
    for (const auto& c : controls) c.validate(sigma, grid.steps_m);
    ScenarioEnsemble e;
    e.sigma = std::move(sigma);
    e.grid = grid;
    e.controls = std::move(controls);
    e.path_count_n = paths;
    e.rng_seed = seed;
    const int n = e.sigma.dim_n;
    e.dw.resize(paths * grid.steps_m * n);
    std::mt19937_64 gen(seed_stream(seed, "wiener"));
    std::normal_distribution<double> normal(0.0, std::sqrt(grid.delta()));
    for (double& x : e.dw) x = normal(gen);
    return e;
  }
};

struct SublinearValue {
  double value = 0.0;
  std::size_t argmax_scenario = 0;
  double tie_gap = std::numeric_limits<double>::infinity();  // value - runner-up
};

/// E[x] := max over scenarios of the path mean. Ties go to the lowest
/// scenario index; the runner-up gap is reported for tie detection.
inline SublinearValue sublinear_expectation_info(const RvView& x) {
  if (x.d != 1) throw DimensionError("sublinear_expectation: scalar RV required");
  SublinearValue out;
  std::vector<double> buf(x.N);
  double best = -std::numeric_limits<double>::infinity();
  double second = -std::numeric_limits<double>::infinity();
  std::size_t best_s = 0;
  for (std::size_t s = 0; s < x.S; ++s) {
    for (std::size_t p = 0; p < x.N; ++p) buf[p] = x.scalar(s, p);
    const double m = pairwise_mean(buf);
    if (m > best) {
      second = best;
      best = m;
      best_s = s;
    } else if (m > second) {
      second = m;
    }
  }
  out.value = best;
  out.argmax_scenario = best_s;
  out.tie_gap = best - second;
  return out;
}

inline double sublinear_expectation(const RvView& x) {
  return sublinear_expectation_info(x).value;
}
inline double sublinear_expectation(const RandomVariable& x) {
  return sublinear_expectation_info(x.view()).value;
}

/// ||xi||_{L^p} = E[ ||xi||^p ]^{1/p}, Euclidean norm over the dim index.
inline double lp_norm(const RvView& x, double p) {
  if (p < 1.0) throw ParameterError("lp_norm: p >= 1 required");
  std::vector<double> buf(x.N);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < x.S; ++s) {
    for (std::size_t q = 0; q < x.N; ++q) {
      const double* v = x.at(s, q);
      double nrm2 = 0.0;
      for (std::size_t j = 0; j < x.d; ++j) nrm2 += v[j] * v[j];
      buf[q] = std::pow(nrm2, p / 2.0);
    }
    best = std::max(best, pairwise_mean(buf));
  }
  return std::pow(std::max(best, 0.0), 1.0 / p);
}
inline double lp_norm(const RandomVariable& x, double p) { return lp_norm(x.view(), p); }

/// ||X||_{H^p} = E[ sup_s ||X_s||^p ]^{1/p}: pathwise sup over grid nodes.
inline double hp_norm(const ProcessTensor& x, double p) {
  if (p < 1.0) throw ParameterError("hp_norm: p >= 1 required");
  std::vector<double> buf(x.N);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < x.S; ++s) {
    for (std::size_t q = 0; q < x.N; ++q) {
      double sup = 0.0;
      for (std::size_t k = 0; k < x.K; ++k) {
        const double* v = x.state(s, q, k);
        double nrm2 = 0.0;
        for (std::size_t j = 0; j < x.d; ++j) nrm2 += v[j] * v[j];
        sup = std::max(sup, nrm2);
      }
      buf[q] = std::pow(sup, p / 2.0);
    }
    best = std::max(best, pairwise_mean(buf));
  }
  return std::pow(std::max(best, 0.0), 1.0 / p);
}

/// ||X||_{M*^p} = ( int_t^T E[||X_s||^p] ds )^{1/p}, left-endpoint quadrature
/// matching the Euler scheme's filtration convention.
inline double mstar_norm(const ProcessTensor& x, double p, const TimeGrid& grid) {
  if (p < 1.0) throw ParameterError("mstar_norm: p >= 1 required");
  if (x.K != grid.node_count())
    throw DimensionError("mstar_norm: grid/node mismatch");
  double acc = 0.0;
  std::vector<double> buf(x.N);
  for (std::size_t k = 0; k + 1 < x.K; ++k) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < x.S; ++s) {
      for (std::size_t q = 0; q < x.N; ++q) {
        const double* v = x.state(s, q, k);
        double nrm2 = 0.0;
        for (std::size_t j = 0; j < x.d; ++j) nrm2 += v[j] * v[j];
        buf[q] = std::pow(nrm2, p / 2.0);
      }
      best = std::max(best, pairwise_mean(buf));
    }
    acc += std::max(best, 0.0) * grid.delta();
  }
  return std::pow(acc, 1.0 / p);
}

}  // namespace gmf
