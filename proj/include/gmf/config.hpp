#pragma once

// Config-driven experiment runner. A run is fully determined by one JSON
// config: every random draw flows from the single top-level seed through
// named streams, so adding an experiment never perturbs another's numbers.

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmf/coefficients.hpp"
#include "gmf/distribution.hpp"
#include "gmf/ensemble.hpp"
#include "gmf/gbrownian.hpp"
#include "gmf/io.hpp"
#include "gmf/solver.hpp"
#include "gmf/tangent.hpp"
#include "gmf/verify.hpp"

namespace gmf {

constexpr int kSchemaVersion = 1;

namespace detail {

inline void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                       const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": object expected");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Coefficient family registry
// ---------------------------------------------------------------------------

inline std::unique_ptr<CoefficientBundle> make_builtin(const std::string& family,
                                                       const nlohmann::json& params) {
  const int d = params.at("d").get<int>();
  const int n = params.at("n").get<int>();
  if (family == "zero") {
    detail::check_keys(params, {"d", "n"}, "coefficients.params");
    return std::make_unique<ZeroBundle>(d, n);
  }
  auto ell_from = [&](const nlohmann::json& j) {
    detail::check_keys(j, {"scenario", "weight"}, "coefficients.params.ell");
    ReferenceFunctional ell;
    ell.scenario_index = j.at("scenario").get<std::size_t>();
    ell.weight = j.at("weight").get<std::vector<double>>();
    return ell;
  };
  const double a0_override = params.value("alpha0_override", 0.0);
  if (family == "affine") {
    detail::check_keys(params, {"d", "n", "ell", "b", "h", "g", "alpha0_override"},
                       "coefficients.params");
    auto comps = [&](const nlohmann::json& arr) {
      std::vector<AffineBundle::Component> out;
      for (const auto& c : arr) {
        detail::check_keys(c, {"a", "cst", "q"}, "affine component");
        AffineBundle::Component cc;
        cc.a = c.at("a").get<std::vector<double>>();
        cc.cst = c.value("cst", 0.0);
        cc.q = c.value("q", 0.0);
        out.push_back(std::move(cc));
      }
      return out;
    };
    return std::make_unique<AffineBundle>(d, n, ell_from(params.at("ell")),
                                          comps(params.at("b")), comps(params.at("h")),
                                          comps(params.at("g")), a0_override);
  }
  if (family == "smooth") {
    detail::check_keys(params, {"d", "n", "ell", "b", "h", "g", "alpha0_override"},
                       "coefficients.params");
    auto comps = [&](const nlohmann::json& arr) {
      std::vector<SmoothBundle::Component> out;
      for (const auto& c : arr) {
        detail::check_keys(c, {"a", "b", "cst", "e"}, "smooth component");
        SmoothBundle::Component cc;
        cc.a = c.value("a", 0.0);
        cc.b = c.value("b", 0.0);
        cc.cst = c.value("cst", 0.0);
        cc.e = c.value("e", 0.0);
        out.push_back(cc);
      }
      return out;
    };
    return std::make_unique<SmoothBundle>(d, n, ell_from(params.at("ell")),
                                          comps(params.at("b")), comps(params.at("h")),
                                          comps(params.at("g")), a0_override);
  }
  throw ConfigError("unknown coefficient family '" + family + "'");
}

// ---------------------------------------------------------------------------
// Run config
// ---------------------------------------------------------------------------

struct RunConfig {
  std::uint64_t seed = 0;
  EnsembleSpec ensemble;
  std::string family;
  nlohmann::json family_params;
  nlohmann::json experiments;  // array, validated per type at execution
  std::string output_dir = "out";
  nlohmann::json raw;

  static RunConfig parse(const nlohmann::json& j) {
    detail::check_keys(j, {"schema_version", "seed", "ensemble", "coefficients",
                           "experiments", "output_dir"},
                       "config");
    if (!j.contains("schema_version") ||
        j.at("schema_version").get<int>() != kSchemaVersion)
      throw ConfigError("config: schema_version " + std::to_string(kSchemaVersion) +
                        " required");
    if (!j.contains("seed")) throw ConfigError("config: seed is mandatory");
    RunConfig c;
    c.seed = j.at("seed").get<std::uint64_t>();
    detail::check_keys(j.at("ensemble"),
                       {"sigma", "grid", "scenario_count", "switching_count",
                        "path_count", "seed"},
                       "config.ensemble");
    c.ensemble = ensemble_from_json(j.at("ensemble"));
    const auto& coef = j.at("coefficients");
    detail::check_keys(coef, {"family", "params"}, "config.coefficients");
    c.family = coef.at("family").get<std::string>();
    c.family_params = coef.at("params");
    make_builtin(c.family, c.family_params);  // validate eagerly
    c.experiments = j.value("experiments", nlohmann::json::array());
    if (!c.experiments.is_array()) throw ConfigError("config: experiments must be an array");
    c.output_dir = j.value("output_dir", std::string("out"));
    c.raw = j;
    return c;
  }

  static RunConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigError(std::string("config parse error: ") + ex.what());
    }
    return parse(j);
  }

  std::uint64_t hash() const {
    return fnv1a(raw.dump());
  }
};

inline const char* config_schema_text() {
  return
      "{\n"
      "  \"schema_version\": 1,            // required, exactly 1\n"
      "  \"seed\": <uint64>,               // required, sole entropy source\n"
      "  \"output_dir\": <string>,         // optional, default \"out\"\n"
      "  \"ensemble\": {\n"
      "    \"sigma\": {\"type\": \"interval\", \"n\": 1, \"sigma_low\": r, \"sigma_high\": r}\n"
      "           | {\"type\": \"vertices\", \"n\": k, \"vertices\": [[...k*k...], ...]},\n"
      "    \"grid\": {\"t_start\": r, \"t_end\": r, \"steps\": m},\n"
      "    \"scenario_count\": S,          // must equal the generated control count\n"
      "    \"switching_count\": k,         // optional alternating controls, default 0\n"
      "    \"path_count\": N,\n"
      "    \"seed\": <uint64>              // Wiener increment stream seed\n"
      "  },\n"
      "  \"coefficients\": {\"family\": \"zero\"|\"affine\"|\"smooth\", \"params\": {...}},\n"
      "  \"experiments\": [                // executed in order\n"
      "    {\"type\": \"solve\", \"name\": s, \"x0\": [..]},\n"
      "    {\"type\": \"fd_check_x\",   \"name\": s, \"x\": [..], \"y\": [..], \"xi_scale\": r},\n"
      "    {\"type\": \"fd_check_xi\",  \"name\": s, \"xi_scale\": r, \"eta_scale\": r},\n"
      "    {\"type\": \"fd_check_xx\",  \"name\": s, \"x\": [..], \"y\": [..], \"z\": [..], \"xi_scale\": r},\n"
      "    {\"type\": \"fd_check_x_xi\",\"name\": s, \"x\": [..], \"y\": [..], \"sweep\": \"x\"|\"xi\", \"xi_scale\": r},\n"
      "    {\"type\": \"ratio_audit\",  \"name\": s, \"lemma\": id, \"p\": r, \"probes\": k},\n"
      "    {\"type\": \"appendix_check\", \"name\": s, \"p\": 2|4, \"probes\": k},\n"
      "    {\"type\": \"probe_assumptions\", \"name\": s, \"count\": k},\n"
      "    {\"type\": \"interchange\", \"name\": s, \"count\": k},\n"
      "    {\"type\": \"distribution\", \"name\": s, \"shift\": r}\n"
      "  ]\n"
      "}\n"
      "CSV columns: convergence (epsilon, remainder); process summary\n"
      "(node, time, upper_mean, lower_mean, l2_norm); ratio audit\n"
      "(probe, numerator, denominator, ratio, included); certificate (knot, slope).\n";
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

struct ExperimentResult {
  std::string name;
  std::string type;
  bool pass = false;
  std::string detail;
};

struct RunSummary {
  std::vector<ExperimentResult> results;
  bool all_pass = true;
  std::string output_dir;
};

namespace detail {

inline RandomVariable seeded_rv(std::uint64_t top_seed, const std::string& stream,
                                std::size_t S, std::size_t N, std::size_t d,
                                double scale) {
  std::mt19937_64 gen(seed_stream(top_seed, stream));
  return random_rv(gen, S, N, d, scale);
}

}  // namespace detail

inline RunSummary run_config(const RunConfig& cfg, const std::string& out_override = "") {
  namespace fs = std::filesystem;
  RunSummary summary;
  summary.output_dir = out_override.empty() ? cfg.output_dir : out_override;
  fs::create_directories(summary.output_dir);
  const auto out_path = [&](const std::string& leaf) {
    return (fs::path(summary.output_dir) / leaf).string();
  };

  auto ensemble = cfg.ensemble.make();
  auto paths = synthesize(ensemble);
  auto bundle = make_builtin(cfg.family, cfg.family_params);
  const std::size_t S = ensemble.scenario_count(), N = ensemble.path_count();
  const std::size_t dd = static_cast<std::size_t>(bundle->dim_d());

  int index = 0;
  for (const auto& exp : cfg.experiments) {
    const std::string type = exp.at("type").get<std::string>();
    const std::string name =
        exp.value("name", type + "_" + std::to_string(index));
    ++index;
    ExperimentResult res;
    res.name = name;
    res.type = type;
    const std::string stream = "experiment:" + name;

    if (type == "solve") {
      detail::check_keys(exp, {"type", "name", "x0"}, name);
      auto x0 = RandomVariable::constant(S, N, exp.at("x0").get<std::vector<double>>());
      auto sol = solve_mean_field(ensemble, paths, *bundle, x0);
      res.pass = sol.x.all_finite();
      res.detail = "hp2=" + csv_double(hp_norm(sol.x, 2.0));
      if (dd == 1)
        write_process_summary_csv(out_path(name + "_summary.csv"), sol.x, ensemble.grid);
    } else if (type == "fd_check_x" || type == "fd_check_xi" || type == "fd_check_xx" ||
               type == "fd_check_x_xi") {
      const double xi_scale = exp.value("xi_scale", 1.0);
      auto xi = detail::seeded_rv(cfg.seed, stream + ":xi", S, N, dd, xi_scale);
      const auto eps = default_eps_schedule();
      ConvergenceReport rep;
      if (type == "fd_check_x") {
        detail::check_keys(exp, {"type", "name", "x", "y", "xi_scale"}, name);
        rep = fd_check_x(ensemble, paths, *bundle, exp.at("x").get<std::vector<double>>(),
                         xi, exp.at("y").get<std::vector<double>>(), eps);
      } else if (type == "fd_check_xi") {
        detail::check_keys(exp, {"type", "name", "xi_scale", "eta_scale"}, name);
        auto eta = detail::seeded_rv(cfg.seed, stream + ":eta", S, N, dd,
                                     exp.value("eta_scale", 1.0));
        rep = fd_check_xi(ensemble, paths, *bundle, xi, eta, eps);
      } else if (type == "fd_check_xx") {
        detail::check_keys(exp, {"type", "name", "x", "y", "z", "xi_scale"}, name);
        rep = fd_check_xx(ensemble, paths, *bundle, exp.at("x").get<std::vector<double>>(),
                          xi, exp.at("y").get<std::vector<double>>(),
                          exp.at("z").get<std::vector<double>>(), eps);
      } else {
        detail::check_keys(exp, {"type", "name", "x", "y", "sweep", "xi_scale"}, name);
        auto eta = detail::seeded_rv(cfg.seed, stream + ":eta", S, N, dd, 1.0);
        const auto sweep = exp.value("sweep", std::string("x")) == "xi"
                               ? MixedSweep::Xi
                               : MixedSweep::X;
        rep = fd_check_x_xi(ensemble, paths, *bundle,
                            exp.at("x").get<std::vector<double>>(), xi,
                            exp.at("y").get<std::vector<double>>(), eta, eps, sweep);
      }
      res.pass = rep.pass_window(1.7, 2.3);
      res.detail = rep.all_below_floor
                       ? "exact (max remainder " + csv_double(rep.max_remainder) + ")"
                       : "order=" + csv_double(rep.fitted_order);
      write_convergence_csv(out_path(name + "_remainders.csv"), rep);
    } else if (type == "ratio_audit") {
      detail::check_keys(exp, {"type", "name", "lemma", "p", "probes", "x_range",
                               "xi_scale"},
                         name);
      AuditSpec spec;
      spec.p = exp.value("p", 2.0);
      spec.probe_count = exp.value("probes", std::size_t{10});
      spec.x_range = exp.value("x_range", 1.0);
      spec.xi_scale = exp.value("xi_scale", 1.0);
      spec.seed = seed_stream(cfg.seed, stream);
      auto audit = ratio_audit(exp.at("lemma").get<std::string>(), ensemble, paths,
                               *bundle, spec);
      res.pass = audit.pass;
      res.detail = "max_ratio=" + csv_double(audit.max_ratio) +
                   " bound=" + csv_double(audit.theoretical_constant * audit.safety_factor);
      write_ratio_audit_csv(out_path(name + "_ratios.csv"), audit);
    } else if (type == "appendix_check") {
      detail::check_keys(exp, {"type", "name", "p", "probes"}, name);
      auto rep = appendix_check(ensemble, paths, exp.value("p", 2.0),
                                exp.value("probes", std::size_t{10}),
                                seed_stream(cfg.seed, stream));
      res.pass = rep.pass;
      res.detail = "violations=" + std::to_string(rep.violations);
    } else if (type == "probe_assumptions") {
      detail::check_keys(exp, {"type", "name", "count"}, name);
      ProbeSpec spec;
      spec.count = exp.value("count", std::size_t{32});
      spec.seed = seed_stream(cfg.seed, stream);
      auto rep = probe_assumptions(*bundle, spec);
      res.pass = rep.pass;
      double worst = 0.0;
      for (const auto& e2 : rep.entries) worst = std::max(worst, e2.worst_ratio);
      res.detail = "worst_ratio=" + csv_double(worst);
    } else if (type == "interchange") {
      detail::check_keys(exp, {"type", "name", "count"}, name);
      ProbeSpec spec;
      spec.count = exp.value("count", std::size_t{100});
      spec.seed = seed_stream(cfg.seed, stream);
      auto rep = interchange_check(*bundle, spec);
      res.pass = rep.pass;
      res.detail = "max_diff=" + csv_double(rep.max_abs_diff);
    } else if (type == "distribution") {
      detail::check_keys(exp, {"type", "name", "shift"}, name);
      if (dd != 1) throw ConfigError(name + ": distribution suite requires d = 1");
      const double shift = exp.value("shift", 0.5);
      auto xi = detail::seeded_rv(cfg.seed, stream + ":xi", S, N, 1, 1.0);
      RandomVariable sh = xi;
      for (double& v : sh.values) v += shift;
      SublinearDistribution F{xi}, G{sh};
      auto fam = Lip1Family::for_sources(xi, sh);
      auto self = metric_d(F, F, fam);
      auto cert = metric_d(F, G, fam);
      auto axioms = check_distribution_axioms(F, 100, seed_stream(cfg.seed, stream));
      const bool shift_ok = std::abs(cert.value - std::abs(shift)) <=
                            0.02 * std::max(std::abs(shift), 1e-12);
      res.pass = self.value <= 1e-12 && shift_ok && axioms.pass;
      res.detail = "d(F,G)=" + csv_double(cert.value);
      write_certificate_csv(out_path(name + "_certificate.csv"), cert);
    } else {
      throw ConfigError("unknown experiment type '" + type + "'");
    }
    summary.all_pass = summary.all_pass && res.pass;
    summary.results.push_back(std::move(res));
  }

  nlohmann::json manifest;
  manifest["schema_version"] = kSchemaVersion;
  manifest["config_hash"] = cfg.hash();
  manifest["seed"] = cfg.seed;
  manifest["all_pass"] = summary.all_pass;
  auto arr = nlohmann::json::array();
  for (const auto& r : summary.results)
    arr.push_back({{"name", r.name}, {"type", r.type}, {"pass", r.pass},
                   {"detail", r.detail}});
  manifest["experiments"] = arr;
  std::ofstream mout(out_path("manifest.json"));
  mout << manifest.dump(2) << '\n';
  return summary;
}

}  // namespace gmf
