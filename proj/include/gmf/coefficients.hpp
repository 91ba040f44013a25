#pragma once

// Coefficient interface (b, h, g) with derivative oracles and Lipschitz
// metadata, plus the built-in zero / affine / smooth families whose
// derivatives are exact in closed form. The xi-argument is always the full
// ensemble random variable; families reduce it through a bounded linear
// reference functional so that every Frechet derivative has a closed form.

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "gmf/core.hpp"
#include "gmf/ensemble.hpp"

namespace gmf {

/// ell(xi) = path mean of weight^T xi under one fixed scenario. Linear, with
/// |ell(xi)| <= ||weight|| * ||xi||_{L^2}.
struct ReferenceFunctional {
  std::size_t scenario_index = 0;
  std::vector<double> weight;  // length d

  double operator()(const RvView& xi) const {
    if (xi.d != weight.size())
      throw DimensionError("ReferenceFunctional: dimension mismatch");
    const std::size_t s = scenario_index < xi.S ? scenario_index : 0;
    std::vector<double> buf(xi.N);
    for (std::size_t p = 0; p < xi.N; ++p) {
      const double* v = xi.at(s, p);
      double acc = 0.0;
      for (std::size_t j = 0; j < weight.size(); ++j) acc += weight[j] * v[j];
      buf[p] = acc;
    }
    return pairwise_mean(buf);
  }

  double bound() const {
    return euclid_norm(std::span<const double>(weight.data(), weight.size()));
  }
};

/// Per-node evaluation context: the law argument Xi_k bound once per time
/// node, with family-computed summaries cached so pointwise evaluation is O(d).
struct LawContext {
  double s = 0.0;
  RvView xi;
  std::array<double, 3> stats{};  // family-defined (e.g. ell, sin(ell), cos(ell))
};

/// Direction context for D_xi applications: the direction random variable
/// bound once per node.
struct DirContext {
  RvView eta;
  double ell = 0.0;
};

enum class Coef { B, H, G };

class CoefficientBundle {
 public:
  CoefficientBundle(int d, int n) : d_(d), n_(n) {}
  virtual ~CoefficientBundle() = default;

  int dim_d() const { return d_; }
  int dim_n() const { return n_; }
  std::size_t out_size(Coef c) const {
    switch (c) {
      case Coef::B: return static_cast<std::size_t>(d_);
      case Coef::H: return static_cast<std::size_t>(d_) * n_ * n_;
      case Coef::G: return static_cast<std::size_t>(d_) * n_;
    }
    return 0;
  }

  virtual LawContext bind_law(double s, const RvView& xi) const {
    LawContext c;
    c.s = s;
    c.xi = xi;
    return c;
  }
  virtual DirContext bind_dir(const LawContext&, const RvView& eta) const {
    DirContext c;
    c.eta = eta;
    return c;
  }

  virtual void eval(Coef c, const LawContext& ctx, const double* x, double* out) const = 0;

  // First derivatives. D_xi applies to a direction random variable bound in a
  // DirContext. Missing oracles raise a configuration error, never a fallback.
  virtual bool has_first_derivatives() const { return false; }
  virtual void dx(Coef, const LawContext&, const double* /*x*/, const double* /*y*/,
                  double* /*out*/) const {
    throw ConfigError("coefficient bundle provides no first-derivative oracles");
  }
  virtual void dxi(Coef, const LawContext&, const double* /*x*/, const DirContext&,
                   double* /*out*/) const {
    throw ConfigError("coefficient bundle provides no first-derivative oracles");
  }

  // Second derivatives: D_x^2 f (y, z) and the two mixed derivatives
  // D_x[D_xi f . eta] . y and D_xi[D_x f . y] . eta.
  virtual bool has_second_derivatives() const { return false; }
  virtual void dxx(Coef, const LawContext&, const double*, const double*, const double*,
                   double*) const {
    throw ConfigError("coefficient bundle provides no second-derivative oracles");
  }
  virtual void dxdxi(Coef, const LawContext&, const double*, const DirContext&,
                     const double*, double*) const {
    throw ConfigError("coefficient bundle provides no second-derivative oracles");
  }
  virtual void dxidx(Coef, const LawContext&, const double*, const double*,
                     const DirContext&, double*) const {
    throw ConfigError("coefficient bundle provides no second-derivative oracles");
  }

  // Lipschitz metadata (integrable majorants >= 1) and integrability exponents.
  virtual double alpha0(double s) const = 0;
  virtual double alpha1(double /*s*/) const { return 1.0; }
  virtual double alpha2(double /*s*/) const { return 1.0; }
  double kappa(double s) const { return 4.0 * sqr(alpha0(s)); }
  virtual double q0() const { return std::numeric_limits<double>::infinity(); }
  virtual double q1() const { return std::numeric_limits<double>::infinity(); }

  // Pointwise convenience wrappers for probes and tests.
  std::vector<double> eval_at(Coef c, double s, const std::vector<double>& x,
                              const RandomVariable& xi) const {
    auto ctx = bind_law(s, xi.view());
    std::vector<double> out(out_size(c));
    eval(c, ctx, x.data(), out.data());
    return out;
  }
  std::vector<double> dx_at(Coef c, double s, const std::vector<double>& x,
                            const RandomVariable& xi, const std::vector<double>& y) const {
    auto ctx = bind_law(s, xi.view());
    std::vector<double> out(out_size(c));
    dx(c, ctx, x.data(), y.data(), out.data());
    return out;
  }
  std::vector<double> dxi_at(Coef c, double s, const std::vector<double>& x,
                             const RandomVariable& xi, const RandomVariable& eta) const {
    auto ctx = bind_law(s, xi.view());
    auto dir = bind_dir(ctx, eta.view());
    std::vector<double> out(out_size(c));
    dxi(c, ctx, x.data(), dir, out.data());
    return out;
  }

 private:
  int d_;
  int n_;
};

// ---------------------------------------------------------------------------
// Built-in families
// ---------------------------------------------------------------------------

class ZeroBundle final : public CoefficientBundle {
 public:
  ZeroBundle(int d, int n) : CoefficientBundle(d, n) {}

  void eval(Coef c, const LawContext&, const double*, double* out) const override {
    std::fill(out, out + out_size(c), 0.0);
  }
  bool has_first_derivatives() const override { return true; }
  void dx(Coef c, const LawContext&, const double*, const double*, double* out) const override {
    std::fill(out, out + out_size(c), 0.0);
  }
  void dxi(Coef c, const LawContext&, const double*, const DirContext&, double* out) const override {
    std::fill(out, out + out_size(c), 0.0);
  }
  bool has_second_derivatives() const override { return true; }
  void dxx(Coef c, const LawContext&, const double*, const double*, const double*,
           double* out) const override {
    std::fill(out, out + out_size(c), 0.0);
  }
  void dxdxi(Coef c, const LawContext&, const double*, const DirContext&, const double*,
             double* out) const override {
    std::fill(out, out + out_size(c), 0.0);
  }
  void dxidx(Coef c, const LawContext&, const double*, const double*, const DirContext&,
             double* out) const override {
    std::fill(out, out + out_size(c), 0.0);
  }
  double alpha0(double) const override { return 1.0; }
};

/// f_c(s, x, xi) = a_c . x + cst_c + q_c * ell(xi), componentwise.
class AffineBundle final : public CoefficientBundle {
 public:
  struct Component {
    std::vector<double> a;  // length d
    double cst = 0.0;
    double q = 0.0;
  };

  AffineBundle(int d, int n, ReferenceFunctional ell, std::vector<Component> b,
               std::vector<Component> h, std::vector<Component> g,
               double alpha0_override = 0.0)
      : CoefficientBundle(d, n), ell_(std::move(ell)), comps_{std::move(b), std::move(h), std::move(g)} {
    for (int c = 0; c < 3; ++c)
      if (comps_[c].size() != out_size(static_cast<Coef>(c)))
        throw DimensionError("AffineBundle: component count mismatch");
    const double w = ell_.bound();
    double a0 = 1.0, a1 = 1.0;
    for (const auto& cs : comps_)
      for (const auto& cc : cs) {
        a0 = std::max({a0, euclid_norm(cc.a), std::abs(cc.q) * w});
        a1 = std::max(a1, std::abs(cc.q) * w);
      }
    alpha0_ = alpha0_override > 0.0 ? alpha0_override : a0;
    alpha1_ = a1;
  }

  LawContext bind_law(double s, const RvView& xi) const override {
    LawContext c;
    c.s = s;
    c.xi = xi;
    c.stats[0] = ell_(xi);
    return c;
  }
  DirContext bind_dir(const LawContext&, const RvView& eta) const override {
    DirContext c;
    c.eta = eta;
    c.ell = ell_(eta);
    return c;
  }

  void eval(Coef c, const LawContext& ctx, const double* x, double* out) const override {
    const auto& cs = comps_[static_cast<int>(c)];
    for (std::size_t i = 0; i < cs.size(); ++i) {
      double acc = cs[i].cst + cs[i].q * ctx.stats[0];
      for (int j = 0; j < dim_d(); ++j) acc += cs[i].a[j] * x[j];
      out[i] = acc;
    }
  }
  bool has_first_derivatives() const override { return true; }
  void dx(Coef c, const LawContext&, const double*, const double* y, double* out) const override {
    const auto& cs = comps_[static_cast<int>(c)];
    for (std::size_t i = 0; i < cs.size(); ++i) {
      double acc = 0.0;
      for (int j = 0; j < dim_d(); ++j) acc += cs[i].a[j] * y[j];
      out[i] = acc;
    }
  }
  void dxi(Coef c, const LawContext&, const double*, const DirContext& dir,
           double* out) const override {
    const auto& cs = comps_[static_cast<int>(c)];
    for (std::size_t i = 0; i < cs.size(); ++i) out[i] = cs[i].q * dir.ell;
  }
  bool has_second_derivatives() const override { return true; }
  void dxx(Coef c, const LawContext&, const double*, const double*, const double*,
           double* out) const override {
    std::fill(out, out + out_size(c), 0.0);
  }
  void dxdxi(Coef c, const LawContext&, const double*, const DirContext&, const double*,
             double* out) const override {
    std::fill(out, out + out_size(c), 0.0);
  }
  void dxidx(Coef c, const LawContext&, const double*, const double*, const DirContext&,
             double* out) const override {
    std::fill(out, out + out_size(c), 0.0);
  }

  double alpha0(double) const override { return alpha0_; }
  double alpha1(double) const override { return alpha1_; }

  const ReferenceFunctional& functional() const { return ell_; }

 private:
  ReferenceFunctional ell_;
  std::array<std::vector<Component>, 3> comps_;
  double alpha0_ = 1.0;
  double alpha1_ = 1.0;
};

/// f_c = a_c tanh(x_{i_c}) + b_c sin(ell(xi)) + cst_c
///       + e_c tanh(x_{i_c}) sin(ell(xi)),   i_c = c mod d.
/// The cross term keeps the mixed x-xi derivatives nontrivial; with e = 0 the
/// family degenerates to the separable form.
class SmoothBundle final : public CoefficientBundle {
 public:
  struct Component {
    double a = 0.0;    // tanh amplitude
    double b = 0.0;    // sin amplitude
    double cst = 0.0;
    double e = 0.0;    // cross amplitude
  };

  SmoothBundle(int d, int n, ReferenceFunctional ell, std::vector<Component> b,
               std::vector<Component> h, std::vector<Component> g,
               double alpha0_override = 0.0)
      : CoefficientBundle(d, n), ell_(std::move(ell)), comps_{std::move(b), std::move(h), std::move(g)} {
    for (int c = 0; c < 3; ++c)
      if (comps_[c].size() != out_size(static_cast<Coef>(c)))
        throw DimensionError("SmoothBundle: component count mismatch");
    const double w = ell_.bound();
    // sup_R |d sech^2 / dx| = 4 / (3 sqrt 3)
    const double kSechSlope = 4.0 / (3.0 * std::sqrt(3.0));
    double a0 = 1.0, a1 = 1.0, a2 = 1.0;
    for (const auto& cs : comps_)
      for (const auto& cc : cs) {
        const double ae = std::abs(cc.a) + std::abs(cc.e);
        const double be = std::abs(cc.b) + std::abs(cc.e);
        a0 = std::max({a0, ae, be * w});
        a1 = std::max({a1, ae * kSechSlope, std::abs(cc.e) * w, be * w * std::max(1.0, w),
                       be * w});
        a2 = std::max(a2, std::abs(cc.e) * w * std::max(1.0, w));
      }
    alpha0_ = alpha0_override > 0.0 ? alpha0_override : a0;
    alpha1_ = a1;
    alpha2_ = a2;
  }

  LawContext bind_law(double s, const RvView& xi) const override {
    LawContext c;
    c.s = s;
    c.xi = xi;
    const double L = ell_(xi);
    c.stats = {L, std::sin(L), std::cos(L)};
    return c;
  }
  DirContext bind_dir(const LawContext&, const RvView& eta) const override {
    DirContext c;
    c.eta = eta;
    c.ell = ell_(eta);
    return c;
  }

  void eval(Coef c, const LawContext& ctx, const double* x, double* out) const override {
    const auto& cs = comps_[static_cast<int>(c)];
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const double u = std::tanh(x[i % dim_d()]);
      out[i] = cs[i].a * u + cs[i].b * ctx.stats[1] + cs[i].cst + cs[i].e * u * ctx.stats[1];
    }
  }
  bool has_first_derivatives() const override { return true; }
  void dx(Coef c, const LawContext& ctx, const double* x, const double* y,
          double* out) const override {
    const auto& cs = comps_[static_cast<int>(c)];
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::size_t ix = i % dim_d();
      const double sech2 = 1.0 - sqr(std::tanh(x[ix]));
      out[i] = (cs[i].a + cs[i].e * ctx.stats[1]) * sech2 * y[ix];
    }
  }
  void dxi(Coef c, const LawContext& ctx, const double* x, const DirContext& dir,
           double* out) const override {
    const auto& cs = comps_[static_cast<int>(c)];
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const double u = std::tanh(x[i % dim_d()]);
      out[i] = (cs[i].b + cs[i].e * u) * ctx.stats[2] * dir.ell;
    }
  }
  bool has_second_derivatives() const override { return true; }
  void dxx(Coef c, const LawContext& ctx, const double* x, const double* y,
           const double* z, double* out) const override {
    const auto& cs = comps_[static_cast<int>(c)];
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::size_t ix = i % dim_d();
      const double u = std::tanh(x[ix]);
      const double sech2 = 1.0 - u * u;
      out[i] = (cs[i].a + cs[i].e * ctx.stats[1]) * (-2.0 * u * sech2) * y[ix] * z[ix];
    }
  }
  void dxdxi(Coef c, const LawContext& ctx, const double* x, const DirContext& dir,
             const double* y, double* out) const override {
    const auto& cs = comps_[static_cast<int>(c)];
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::size_t ix = i % dim_d();
      const double sech2 = 1.0 - sqr(std::tanh(x[ix]));
      out[i] = cs[i].e * sech2 * ctx.stats[2] * dir.ell * y[ix];
    }
  }
  void dxidx(Coef c, const LawContext& ctx, const double* x, const double* y,
             const DirContext& dir, double* out) const override {
    // Equals dxdxi by the interchange identity; computed from the other
    // factorization so the equality is a genuine cross-check.
    const auto& cs = comps_[static_cast<int>(c)];
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::size_t ix = i % dim_d();
      const double sech2 = 1.0 - sqr(std::tanh(x[ix]));
      out[i] = cs[i].e * ctx.stats[2] * sech2 * y[ix] * dir.ell;
    }
  }

  double alpha0(double) const override { return alpha0_; }
  double alpha1(double) const override { return alpha1_; }
  double alpha2(double) const override { return alpha2_; }

  const ReferenceFunctional& functional() const { return ell_; }

 private:
  ReferenceFunctional ell_;
  std::array<std::vector<Component>, 3> comps_;
  double alpha0_ = 1.0, alpha1_ = 1.0, alpha2_ = 1.0;
};

// ---------------------------------------------------------------------------
// Assumption probes
// ---------------------------------------------------------------------------

struct ProbeSpec {
  std::size_t count = 32;
  std::size_t S = 2;
  std::size_t N = 64;
  double x_range = 2.0;   // points sampled uniformly in [-x_range, x_range]^d
  double xi_scale = 1.0;  // RVs with N(0, xi_scale^2) entries
  std::uint64_t seed = 1;
};

struct AssumptionEntry {
  std::string name;
  double worst_ratio = 0.0;
  std::size_t included = 0;
  bool pass = true;
};

struct AssumptionReport {
  std::vector<AssumptionEntry> entries;
  bool pass = true;
};

namespace detail {

inline std::vector<double> random_point(std::mt19937_64& gen, int d, double range) {
  std::uniform_real_distribution<double> u(-range, range);
  std::vector<double> x(d);
  for (double& v : x) v = u(gen);
  return x;
}

inline RandomVariable random_rv(std::mt19937_64& gen, std::size_t S, std::size_t N,
                                std::size_t d, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  RandomVariable rv(S, N, d);
  for (double& v : rv.values) v = nd(gen);
  return rv;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace detail

/// Worst-case LHS/RHS ratios for every inequality of Assumptions 1.2, 2.2 and
/// 3.2 plus the uniform first-derivative bounds, on random probe sets.
/// Pass iff every ratio <= 1 + 1e-9. Probes with RHS < 1e-14 are excluded.
inline AssumptionReport probe_assumptions(const CoefficientBundle& bundle,
                                          const ProbeSpec& spec) {
  std::mt19937_64 gen(spec.seed);
  const int d = bundle.dim_d();
  const std::size_t dd = static_cast<std::size_t>(d);

  AssumptionReport rep;
  rep.entries.reserve(8);  // references below must survive later push_backs
  auto entry = [&rep](const std::string& name) -> AssumptionEntry& {
    rep.entries.push_back(AssumptionEntry{name, 0.0, 0, true});
    return rep.entries.back();
  };
  auto record = [](AssumptionEntry& e, double lhs, double rhs) {
    if (rhs < 1e-14) return;
    ++e.included;
    e.worst_ratio = std::max(e.worst_ratio, lhs / rhs);
  };

  auto& lip = entry("A1.2 f-Lipschitz");
  auto& dub_x = entry("first-derivative bound |Dx f y| <= a0 ||y||");
  auto& dub_xi = entry("first-derivative bound |Dxi f eta| <= a0 ||eta||_L2");
  AssumptionEntry* dlx = nullptr;
  AssumptionEntry* dlxi = nullptr;
  AssumptionEntry* dl1 = nullptr;
  if (bundle.has_first_derivatives()) {
    dlx = &entry("A2.2 Dx f Lipschitz");
    dlxi = &entry("A2.2 Dxi f Lipschitz");
    dl1 = &entry("A2.2 |Dxi f eta| <= a1 ||eta||_L1");
  }
  AssumptionEntry* sxx = nullptr;
  AssumptionEntry* smix = nullptr;
  if (bundle.has_second_derivatives()) {
    sxx = &entry("A3.2 Dx^2 f Lipschitz (kappa)");
    smix = &entry("A3.2 mixed derivative Lipschitz (alpha2)");
  }

  const double s_time = 0.0;  // built-in metadata is time-homogeneous
  for (std::size_t probe = 0; probe < spec.count; ++probe) {
    auto x = detail::random_point(gen, d, spec.x_range);
    auto y = detail::random_point(gen, d, spec.x_range);
    auto z = detail::random_point(gen, d, 1.0);
    auto v = detail::random_point(gen, d, spec.x_range);
    auto xi = detail::random_rv(gen, spec.S, spec.N, dd, spec.xi_scale);
    auto eta = detail::random_rv(gen, spec.S, spec.N, dd, spec.xi_scale);
    auto zeta = detail::random_rv(gen, spec.S, spec.N, dd, 1.0);

    const double dxy = [&] {
      double acc = 0.0;
      for (int j = 0; j < d; ++j) acc += sqr(x[j] - y[j]);
      return std::sqrt(acc);
    }();
    const double dxv = [&] {
      double acc = 0.0;
      for (int j = 0; j < d; ++j) acc += sqr(x[j] - v[j]);
      return std::sqrt(acc);
    }();
    const double dxieta = lp_norm(xi - eta, 2.0);
    const double ny = euclid_norm(std::span<const double>(y.data(), y.size()));
    const double nz = euclid_norm(std::span<const double>(z.data(), z.size()));
    const double nzeta2 = lp_norm(zeta, 2.0);
    const double neta2 = lp_norm(eta, 2.0);
    const double neta1 = lp_norm(eta, 1.0);

    const double a0 = bundle.alpha0(s_time);
    for (Coef c : {Coef::B, Coef::H, Coef::G}) {
      record(lip,
             detail::max_abs_diff(bundle.eval_at(c, s_time, x, xi),
                                  bundle.eval_at(c, s_time, y, eta)),
             a0 * (dxy + dxieta));
      if (bundle.has_first_derivatives()) {
        record(dub_x, detail::max_abs(bundle.dx_at(c, s_time, x, xi, y)), a0 * ny);
        record(dub_xi, detail::max_abs(bundle.dxi_at(c, s_time, x, xi, eta)), a0 * neta2);
        const double a1 = bundle.alpha1(s_time);
        record(*dlx,
               detail::max_abs_diff(bundle.dx_at(c, s_time, x, xi, z),
                                    bundle.dx_at(c, s_time, y, eta, z)),
               a1 * nz * (dxy + dxieta));
        record(*dlxi,
               detail::max_abs_diff(bundle.dxi_at(c, s_time, x, xi, zeta),
                                    bundle.dxi_at(c, s_time, y, eta, zeta)),
               a1 * nzeta2 * (dxy + dxieta));
        record(*dl1, detail::max_abs(bundle.dxi_at(c, s_time, x, xi, eta)), a1 * neta1);
      }
      if (bundle.has_second_derivatives()) {
        auto ctx_x = bundle.bind_law(s_time, xi.view());
        auto ctx_y = bundle.bind_law(s_time, eta.view());
        auto dir = bundle.bind_dir(ctx_x, zeta.view());
        auto dir_y = bundle.bind_dir(ctx_y, zeta.view());
        std::vector<double> o1(bundle.out_size(c)), o2(bundle.out_size(c));
        bundle.dxx(c, ctx_x, x.data(), y.data(), z.data(), o1.data());
        bundle.dxx(c, ctx_x, v.data(), y.data(), z.data(), o2.data());
        record(*sxx, detail::max_abs_diff(o1, o2), bundle.kappa(s_time) * ny * nz * dxv);
        bundle.dxdxi(c, ctx_x, x.data(), dir, z.data(), o1.data());
        bundle.dxdxi(c, ctx_y, y.data(), dir_y, z.data(), o2.data());
        record(*smix, detail::max_abs_diff(o1, o2),
               bundle.alpha2(s_time) * nz * nzeta2 * (dxy + dxieta));
        bundle.dxidx(c, ctx_x, x.data(), z.data(), dir, o1.data());
        bundle.dxidx(c, ctx_y, y.data(), z.data(), dir_y, o2.data());
        record(*smix, detail::max_abs_diff(o1, o2),
               bundle.alpha2(s_time) * nz * nzeta2 * (dxy + dxieta));
      }
    }
  }

  for (auto& e : rep.entries) {
    e.pass = e.worst_ratio <= 1.0 + 1e-9;
    rep.pass = rep.pass && e.pass;
  }
  return rep;
}

struct InterchangeReport {
  double max_abs_diff = 0.0;
  bool pass = true;
};

/// Max over probes of |dxdxi f - dxidx f|; the two mixed derivatives must
/// agree (interchange identity).
inline InterchangeReport interchange_check(const CoefficientBundle& bundle,
                                           const ProbeSpec& spec, double tol = 1e-9) {
  if (!bundle.has_second_derivatives())
    throw ConfigError("interchange_check: bundle has no second-derivative oracles");
  std::mt19937_64 gen(spec.seed);
  const int d = bundle.dim_d();
  InterchangeReport rep;
  for (std::size_t probe = 0; probe < spec.count; ++probe) {
    auto x = detail::random_point(gen, d, spec.x_range);
    auto y = detail::random_point(gen, d, 1.0);
    auto xi = detail::random_rv(gen, spec.S, spec.N, d, spec.xi_scale);
    auto eta = detail::random_rv(gen, spec.S, spec.N, d, 1.0);
    auto ctx = bundle.bind_law(0.0, xi.view());
    auto dir = bundle.bind_dir(ctx, eta.view());
    for (Coef c : {Coef::B, Coef::H, Coef::G}) {
      std::vector<double> o1(bundle.out_size(c)), o2(bundle.out_size(c));
      bundle.dxdxi(c, ctx, x.data(), dir, y.data(), o1.data());
      bundle.dxidx(c, ctx, x.data(), y.data(), dir, o2.data());
      rep.max_abs_diff = std::max(rep.max_abs_diff, detail::max_abs_diff(o1, o2));
    }
  }
  rep.pass = rep.max_abs_diff <= tol;
  return rep;
}

/// 17-point Gauss-Legendre rule on [0, 1] (nodes, weights).
inline const std::array<std::array<double, 2>, 17>& gauss_legendre_17() {
  static const std::array<std::array<double, 2>, 17> rule = [] {
    // nodes/weights on [-1,1], mapped to [0,1]
    constexpr std::array<double, 17> xs = {
        -0.9905754753144174, -0.9506755217687678, -0.8802391537269859,
        -0.7815140038968014, -0.6576711592166908, -0.5126905370864769,
        -0.3512317634538763, -0.1784841814958479, 0.0,
        0.1784841814958479, 0.3512317634538763, 0.5126905370864769,
        0.6576711592166908, 0.7815140038968014, 0.8802391537269859,
        0.9506755217687678, 0.9905754753144174};
    constexpr std::array<double, 17> ws = {
        0.0241483028685479, 0.0554595293739872, 0.0850361483171792,
        0.1118838471934040, 0.1351363684685255, 0.1540457610768103,
        0.1680041021564500, 0.1765627053669926, 0.1794464703562065,
        0.1765627053669926, 0.1680041021564500, 0.1540457610768103,
        0.1351363684685255, 0.1118838471934040, 0.0850361483171792,
        0.0554595293739872, 0.0241483028685479};
    std::array<std::array<double, 2>, 17> r{};
    for (int i = 0; i < 17; ++i) r[i] = {0.5 * (xs[i] + 1.0), 0.5 * ws[i]};
    return r;
  }();
  return rule;
}

}  // namespace gmf
