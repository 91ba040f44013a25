#pragma once

// Sublinear distributions F_xi(phi) = E[phi(xi)], the Lip1 dual metric as a
// certificate-carrying lower bound, and the lifted Gateaux-derivative
// machinery for functionals on distributions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gmf/core.hpp"
#include "gmf/ensemble.hpp"

namespace gmf {

using TestFn = std::function<double(std::span<const double>)>;
using LiftedFn = std::function<double(const RandomVariable&)>;

struct SublinearDistribution {
  RandomVariable source;

  std::size_t dim() const { return source.d; }

  SublinearValue apply_info(const TestFn& phi) const {
    RandomVariable ev(source.S, source.N, 1);
    for (std::size_t s = 0; s < source.S; ++s)
      for (std::size_t p = 0; p < source.N; ++p) {
        const double* v = &source.values[(s * source.N + p) * source.d];
        ev.at(s, p) = phi(std::span<const double>(v, source.d));
      }
    return sublinear_expectation_info(ev.view());
  }
  double apply(const TestFn& phi) const { return apply_info(phi).value; }
};

/// Test-function family with Lipschitz constant <= 1. 1D: piecewise-linear
/// functions on a fixed knot grid with per-segment slopes in [-1, 1], zero at
/// the first knot, extended past the ends with the end slopes. d > 1: a
/// finite dictionary of x -> a^T x + b with ||a|| <= 1.
struct Lip1Family {
  std::size_t d = 1;
  std::vector<double> knots;                                       // 1D, sorted
  std::vector<std::pair<std::vector<double>, double>> dictionary;  // d > 1

  std::size_t segment_count() const { return knots.size() - 1; }

  /// phi(x) = int_{knots[0]}^x s(u) du with s piecewise constant.
  TestFn make(const std::vector<double>& slopes) const {
    if (d != 1 || slopes.size() != segment_count())
      throw DimensionError("Lip1Family::make: 1D slope vector required");
    for (double s : slopes)
      if (std::abs(s) > 1.0 + 1e-12)
        throw ParameterError("Lip1Family::make: slope outside [-1, 1]");
    auto ks = knots;
    return [ks, slopes](std::span<const double> x) {
      double v = 0.0, pos = x[0];
      if (pos <= ks.front()) return slopes.front() * (pos - ks.front());
      for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
        const double hi = std::min(pos, ks[i + 1]);
        if (hi > ks[i]) v += slopes[i] * (hi - ks[i]);
        if (pos <= ks[i + 1]) return v;
      }
      return v + slopes.back() * (pos - ks.back());
    };
  }

  /// Knot grid for a pair of 1D sources: their pooled empirical support
  /// (quantile-thinned past `max_support_knots`) plus `pad` uniform knots on
  /// each side. Piecewise-linear optima sit at data points.
  static Lip1Family for_sources(const RandomVariable& a, const RandomVariable& b,
                                std::size_t pad = 16,
                                std::size_t max_support_knots = 241) {
    if (a.d != 1 || b.d != 1)
      throw DimensionError("Lip1Family::for_sources: 1D sources required");
    std::vector<double> vals;
    vals.reserve(a.values.size() + b.values.size());
    vals.insert(vals.end(), a.values.begin(), a.values.end());
    vals.insert(vals.end(), b.values.begin(), b.values.end());
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    std::vector<double> support;
    if (vals.size() <= max_support_knots) {
      support = vals;
    } else {
      for (std::size_t i = 0; i < max_support_knots; ++i)
        support.push_back(
            vals[i * (vals.size() - 1) / (max_support_knots - 1)]);
    }
    const double lo = support.front(), hi = support.back();
    const double span = std::max(hi - lo, 1e-6);
    Lip1Family fam;
    fam.d = 1;
    for (std::size_t i = pad; i >= 1; --i)
      fam.knots.push_back(lo - span * static_cast<double>(i) / pad);
    fam.knots.insert(fam.knots.end(), support.begin(), support.end());
    for (std::size_t i = 1; i <= pad; ++i)
      fam.knots.push_back(hi + span * static_cast<double>(i) / pad);
    return fam;
  }

  /// Random unit directions and offsets spanning the pooled support (d > 1).
  static Lip1Family dictionary_for(const RandomVariable& a, const RandomVariable& b,
                                   std::size_t entries, std::uint64_t seed) {
    Lip1Family fam;
    fam.d = a.d;
    std::mt19937_64 gen(seed_stream(seed, "lip1-dictionary"));
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ub(-1.0, 1.0);
    double scale = 1.0;
    for (double v : a.values) scale = std::max(scale, std::abs(v));
    for (double v : b.values) scale = std::max(scale, std::abs(v));
    for (std::size_t j = 0; j < entries; ++j) {
      std::vector<double> dir(a.d);
      double nrm = 0.0;
      for (double& v : dir) {
        v = nd(gen);
        nrm += v * v;
      }
      nrm = std::sqrt(std::max(nrm, 1e-12));
      for (double& v : dir) v /= nrm;
      fam.dictionary.emplace_back(std::move(dir), ub(gen) * scale);
    }
    return fam;
  }
};

struct MetricCertificate {
  double value = 0.0;
  int sign = 1;                 // maximizes sign * (F(phi) - G(phi))
  std::vector<double> knots;    // 1D
  std::vector<double> slopes;   // 1D
  std::size_t dictionary_index = 0;  // d > 1
};

namespace detail {

/// Per-scenario means of the segment overlap weights: F(phi_slopes) =
/// max_s coeff[s] . slopes for the family's piecewise-linear phi.
inline std::vector<std::vector<double>> slope_coefficients(const RandomVariable& src,
                                                           const Lip1Family& fam) {
  const std::size_t K = fam.segment_count();
  std::vector<std::vector<double>> coeff(src.S, std::vector<double>(K, 0.0));
  const double inv_n = 1.0 / static_cast<double>(src.N);
  for (std::size_t s = 0; s < src.S; ++s)
    for (std::size_t p = 0; p < src.N; ++p) {
      const double x = src.at(s, p);
      if (x <= fam.knots.front()) {
        coeff[s][0] += (x - fam.knots.front()) * inv_n;
        continue;
      }
      for (std::size_t i = 0; i < K; ++i) {
        const double hi = std::min(x, fam.knots[i + 1]);
        if (hi > fam.knots[i]) coeff[s][i] += (hi - fam.knots[i]) * inv_n;
      }
      if (x > fam.knots.back()) coeff[s][K - 1] += (x - fam.knots.back()) * inv_n;
    }
  return coeff;
}

inline double max_linear(const std::vector<std::vector<double>>& coeff,
                         const std::vector<double>& slopes) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : coeff) {
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) acc += c[i] * slopes[i];
    best = std::max(best, acc);
  }
  return best;
}

}  // namespace detail

/// Certified lower bound on d(F, G) = sup_{Lip1} |F(phi) - G(phi)|.
/// 1D: coordinate ascent over segment slopes (the objective is a difference
/// of maxima of linear functions of the slopes, so optima sit at +-1).
/// d > 1: best dictionary entry. The certificate phi* is in Lip1 by
/// construction, so the value is a true lower bound.
inline MetricCertificate metric_d(const SublinearDistribution& F,
                                  const SublinearDistribution& G,
                                  const Lip1Family& fam, std::size_t refine_rounds = 8) {
  if (F.dim() != G.dim()) throw DimensionError("metric_d: dimension mismatch");
  MetricCertificate cert;
  if (fam.d == 1) {
    const auto cf = detail::slope_coefficients(F.source, fam);
    const auto cg = detail::slope_coefficients(G.source, fam);
    const std::size_t K = fam.segment_count();
    cert.knots = fam.knots;
    for (int sign : {1, -1}) {
      std::vector<double> slopes(K, sign >= 0 ? 1.0 : -1.0);
      auto objective = [&](const std::vector<double>& sl) {
        return sign * (detail::max_linear(cf, sl) - detail::max_linear(cg, sl));
      };
      double best = objective(slopes);
      for (std::size_t round = 0; round < refine_rounds; ++round) {
        bool changed = false;
        for (std::size_t i = 0; i < K; ++i) {
          const double keep = slopes[i];
          for (double trial : {1.0, -1.0}) {
            if (trial == keep) continue;
            slopes[i] = trial;
            const double v = objective(slopes);
            if (v > best + 1e-15) {
              best = v;
              changed = true;
            } else {
              slopes[i] = keep;
            }
          }
        }
        if (!changed) break;
      }
      if (best > cert.value) {
        cert.value = best;
        cert.sign = sign;
        cert.slopes = slopes;
      }
    }
    if (cert.slopes.empty()) cert.slopes.assign(K, 1.0);
  } else {
    for (std::size_t j = 0; j < fam.dictionary.size(); ++j) {
      const auto& [a, b] = fam.dictionary[j];
      TestFn phi = [&a, &b](std::span<const double> x) {
        double acc = b;
        for (std::size_t i = 0; i < x.size(); ++i) acc += a[i] * x[i];
        return acc;
      };
      const double v = std::abs(F.apply(phi) - G.apply(phi));
      if (v > cert.value) {
        cert.value = v;
        cert.dictionary_index = j;
        cert.sign = 1;
      }
    }
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Lifted Gateaux derivatives
// ---------------------------------------------------------------------------

struct GateauxResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
  bool kink_detected = false;  // one-sided derivatives disagree (scenario tie)
  std::vector<double> central_diffs;
};

inline std::vector<double> gateaux_eps_schedule() {
  std::vector<double> eps;
  for (int k = 4; k <= 10; ++k) eps.push_back(std::ldexp(1.0, -k));
  return eps;
}

/// Richardson-extrapolated central difference of eps -> f_hat(xi + eps x) in
/// the deterministic direction x. A kink (one-sided slopes disagreeing, e.g.
/// a tie of maximizing scenarios) is reported instead of silently averaged.
inline GateauxResult lifted_gateaux(const LiftedFn& f_hat, const RandomVariable& xi,
                                    const std::vector<double>& x,
                                    std::vector<double> eps_schedule = {}) {
  if (x.size() != xi.d) throw DimensionError("lifted_gateaux: direction dimension");
  if (eps_schedule.empty()) eps_schedule = gateaux_eps_schedule();
  const RandomVariable dir = RandomVariable::constant(xi.S, xi.N, x);
  auto shift = [&](double eps) { return f_hat(xi + eps * RandomVariable(dir)); };
  const double f0 = f_hat(xi);

  GateauxResult res;
  std::vector<double> rich;
  for (double eps : eps_schedule)
    res.central_diffs.push_back((shift(eps) - shift(-eps)) / (2.0 * eps));
  // one Richardson level: eliminates the O(eps^2) term under eps halving
  for (std::size_t i = 1; i < res.central_diffs.size(); ++i)
    rich.push_back(res.central_diffs[i] +
                   (res.central_diffs[i] - res.central_diffs[i - 1]) / 3.0);
  res.value = rich.back();
  res.error_estimate = std::abs(rich.back() - rich[rich.size() - 2]);

  const double eps_k = eps_schedule.back();
  const double fwd = (shift(eps_k) - f0) / eps_k;
  const double bwd = (f0 - shift(-eps_k)) / eps_k;
  const double scale = std::max({1.0, std::abs(fwd), std::abs(bwd)});
  res.kink_detected = std::abs(fwd - bwd) > 1e-4 * scale + 4.0 * eps_k;
  res.converged = !res.kink_detected &&
                  res.error_estimate <= 1e-7 * std::max(1.0, std::abs(res.value));
  return res;
}

// ---------------------------------------------------------------------------
// Representative independence
// ---------------------------------------------------------------------------

enum class Permutation { Identity, Reverse, Shuffle };

/// eta = xi with paths permuted independently within each scenario; preserves
/// every F_xi(phi) on the finite ensemble exactly.
inline RandomVariable permute_paths(const RandomVariable& xi, Permutation kind,
                                    std::uint64_t seed = 0) {
  RandomVariable out(xi.S, xi.N, xi.d);
  std::mt19937_64 gen(seed_stream(seed, "path-permutation"));
  std::vector<std::size_t> perm(xi.N);
  for (std::size_t s = 0; s < xi.S; ++s) {
    for (std::size_t p = 0; p < xi.N; ++p) perm[p] = p;
    if (kind == Permutation::Reverse) std::reverse(perm.begin(), perm.end());
    if (kind == Permutation::Shuffle) std::shuffle(perm.begin(), perm.end(), gen);
    for (std::size_t p = 0; p < xi.N; ++p)
      for (std::size_t j = 0; j < xi.d; ++j) out.at(s, p, j) = xi.at(s, perm[p], j);
  }
  return out;
}

struct IndependenceReport {
  std::vector<double> differences;  // per direction
  double max_difference = 0.0;
  bool all_converged = true;
  bool pass = true;
};

/// Same sublinear distribution must give the same Gateaux derivative in every
/// deterministic direction when f_hat factors through the distribution.
inline IndependenceReport representative_independence(
    const LiftedFn& f_hat, const RandomVariable& xi, Permutation kind,
    const std::vector<std::vector<double>>& directions, std::uint64_t seed = 0,
    double tol = 1e-8) {
  const RandomVariable eta = permute_paths(xi, kind, seed);
  IndependenceReport rep;
  for (const auto& x : directions) {
    const auto a = lifted_gateaux(f_hat, xi, x);
    const auto b = lifted_gateaux(f_hat, eta, x);
    rep.all_converged = rep.all_converged && a.converged && b.converged;
    const double diff = std::abs(a.value - b.value);
    rep.differences.push_back(diff);
    rep.max_difference = std::max(rep.max_difference, diff);
  }
  rep.pass = rep.all_converged && rep.max_difference <= tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Distributional derivative
// ---------------------------------------------------------------------------

struct DistributionalDerivative {
  double value = 0.0;
  bool ok = false;
  std::string reason;
};

/// del f(F_xi, F_eta) = E[ del f_hat(xi; x)|_{x = eta} ]: the Gateaux kernel
/// evaluated at every support point of eta, composed, and taken under E.
/// Refuses when the kernel fails a Lipschitz probe or any Gateaux difference
/// fails to converge.
inline DistributionalDerivative distributional_derivative(const LiftedFn& f_hat,
                                                          const RandomVariable& xi,
                                                          const RandomVariable& eta,
                                                          double lip_bound = 1e3) {
  DistributionalDerivative out;
  RandomVariable kernel(eta.S, eta.N, 1);
  std::vector<std::pair<std::vector<double>, double>> seen;
  for (std::size_t s = 0; s < eta.S; ++s)
    for (std::size_t p = 0; p < eta.N; ++p) {
      std::vector<double> x(eta.d);
      for (std::size_t j = 0; j < eta.d; ++j) x[j] = eta.at(s, p, j);
      const auto g = lifted_gateaux(f_hat, xi, x);
      if (!g.converged) {
        out.reason = g.kink_detected ? "gateaux kink (scenario tie) at a support point"
                                     : "gateaux difference did not converge";
        return out;
      }
      kernel.at(s, p) = g.value;
      for (const auto& [prev_x, prev_v] : seen) {
        double dist2 = 0.0;
        for (std::size_t j = 0; j < eta.d; ++j) dist2 += sqr(x[j] - prev_x[j]);
        const double dist = std::sqrt(dist2);
        if (dist > 1e-10 && std::abs(g.value - prev_v) > lip_bound * dist) {
          out.reason = "gateaux kernel failed the Lipschitz probe";
          return out;
        }
      }
      if (seen.size() < 64) seen.emplace_back(std::move(x), g.value);
    }
  out.value = sublinear_expectation(kernel);
  out.ok = true;
  return out;
}

// ---------------------------------------------------------------------------
// Functional axioms
// ---------------------------------------------------------------------------

struct AxiomReport {
  double constant_preservation = 0.0;  // max |F(phi + c) - F(phi) - c|
  double monotonicity = 0.0;           // max (F(phi) - F(psi)) for phi <= psi
  double homogeneity = 0.0;            // max |F(l phi) - l F(phi)|
  double subadditivity = 0.0;          // max (F(phi + psi) - F(phi) - F(psi))
  double lip_boundedness = 0.0;        // max (|F(phi) - F(psi)| - sup|phi - psi|)
  bool pass = true;
};

/// The five section-6 axioms on random piecewise-linear test pairs. All hold
/// by construction of the finite ensemble; violations beyond tol are FP only.
inline AxiomReport check_distribution_axioms(const SublinearDistribution& F,
                                             std::size_t probe_count,
                                             std::uint64_t seed, double tol = 1e-10) {
  if (F.dim() != 1) throw DimensionError("check_distribution_axioms: 1D source");
  AxiomReport rep;
  const auto fam = Lip1Family::for_sources(F.source, F.source, 8, 65);
  std::mt19937_64 gen(seed_stream(seed, "axiom-probes"));
  std::uniform_real_distribution<double> us(-1.0, 1.0);
  std::uniform_real_distribution<double> ul(0.0, 3.0);
  const std::size_t K = fam.segment_count();
  for (std::size_t probe = 0; probe < probe_count; ++probe) {
    std::vector<double> s1(K), s2(K);
    for (std::size_t i = 0; i < K; ++i) {
      s1[i] = us(gen);
      s2[i] = us(gen);
    }
    const double c = 2.0 * us(gen);
    const double lambda = ul(gen);
    auto phi = fam.make(s1);
    auto psi = fam.make(s2);
    auto eval = [&](const std::function<double(double)>& g) {
      return F.apply([&](std::span<const double> x) { return g(x[0]); });
    };
    const double fp = eval([&](double x) { return phi(std::span(&x, 1)); });
    const double fq = eval([&](double x) { return psi(std::span(&x, 1)); });
    rep.constant_preservation = std::max(
        rep.constant_preservation,
        std::abs(eval([&](double x) { return phi(std::span(&x, 1)) + c; }) - fp - c));
    // phi <= phi + |psi| + 0: build a dominated pair explicitly
    rep.monotonicity = std::max(
        rep.monotonicity,
        fp - eval([&](double x) {
          return phi(std::span(&x, 1)) + std::abs(psi(std::span(&x, 1)));
        }));
    rep.homogeneity = std::max(
        rep.homogeneity,
        std::abs(eval([&](double x) { return lambda * phi(std::span(&x, 1)); }) -
                 lambda * fp));
    rep.subadditivity = std::max(
        rep.subadditivity,
        eval([&](double x) { return phi(std::span(&x, 1)) + psi(std::span(&x, 1)); }) -
            fp - fq);
    double sup_diff = 0.0;
    for (double v : F.source.values) {
      sup_diff = std::max(sup_diff, std::abs(phi(std::span(&v, 1)) - psi(std::span(&v, 1))));
    }
    rep.lip_boundedness = std::max(rep.lip_boundedness, std::abs(fp - fq) - sup_diff);
  }
  rep.pass = rep.constant_preservation <= tol && rep.monotonicity <= tol &&
             rep.homogeneity <= tol && rep.subadditivity <= tol &&
             rep.lip_boundedness <= tol;
  return rep;
}

}  // namespace gmf
