#pragma once

// Serialization: binary tensor files, JSON ensemble specs, and the CSV
// emitters used by the experiment runner. All text output is locale-free and
// formatted with maximum round-trip precision so reruns are byte-comparable.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmf/distribution.hpp"
#include "gmf/ensemble.hpp"
#include "gmf/verify.hpp"

namespace gmf {

// Binary tensor layout: 16-byte header (magic "GMFT", version byte, rank
// byte, 2 zero bytes, uint64 element count), rank uint64 dims, then the
// payload as little-endian doubles.
constexpr char kTensorMagic[4] = {'G', 'M', 'F', 'T'};
constexpr std::uint8_t kTensorVersion = 1;

inline void write_tensor(const std::string& path, const std::vector<std::size_t>& dims,
                         const std::vector<double>& data) {
  std::size_t count = 1;
  for (std::size_t d : dims) count *= d;
  if (count != data.size()) throw DimensionError("write_tensor: dims/data mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("write_tensor: cannot open " + path);
  char header[16] = {};
  std::memcpy(header, kTensorMagic, 4);
  header[4] = static_cast<char>(kTensorVersion);
  header[5] = static_cast<char>(dims.size());
  const std::uint64_t n = count;
  std::memcpy(header + 8, &n, 8);
  out.write(header, 16);
  for (std::size_t d : dims) {
    const std::uint64_t v = d;
    out.write(reinterpret_cast<const char*>(&v), 8);
  }
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
}

inline std::vector<double> read_tensor(const std::string& path,
                                       std::vector<std::size_t>& dims) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("read_tensor: cannot open " + path);
  char header[16];
  in.read(header, 16);
  if (!in || std::memcmp(header, kTensorMagic, 4) != 0)
    throw ConfigError("read_tensor: bad magic in " + path);
  if (static_cast<std::uint8_t>(header[4]) != kTensorVersion)
    throw ConfigError("read_tensor: unsupported version");
  const int rank = static_cast<std::uint8_t>(header[5]);
  std::uint64_t count;
  std::memcpy(&count, header + 8, 8);
  dims.resize(rank);
  for (int i = 0; i < rank; ++i) {
    std::uint64_t v;
    in.read(reinterpret_cast<char*>(&v), 8);
    dims[i] = v;
  }
  std::vector<double> data(count);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw ConfigError("read_tensor: truncated file " + path);
  return data;
}

inline void write_tensor(const std::string& path, const ProcessTensor& t) {
  write_tensor(path, {t.S, t.N, t.K, t.d}, t.values);
}
inline void write_tensor(const std::string& path, const RandomVariable& rv) {
  write_tensor(path, {rv.S, rv.N, rv.d}, rv.values);
}

// ---------------------------------------------------------------------------
// JSON ensemble specs
// ---------------------------------------------------------------------------

inline nlohmann::json sigma_to_json(const SigmaSet& s) {
  nlohmann::json j;
  j["n"] = s.dim_n;
  if (s.is_interval) {
    j["type"] = "interval";
    j["sigma_low"] = s.sigma_low;
    j["sigma_high"] = s.sigma_high;
  } else {
    j["type"] = "vertices";
    j["vertices"] = s.vertex_list;
  }
  return j;
}

inline SigmaSet sigma_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "interval")
    return SigmaSet::interval(j.at("sigma_low").get<double>(),
                              j.at("sigma_high").get<double>());
  if (type == "vertices")
    return SigmaSet::vertices(j.at("n").get<int>(),
                              j.at("vertices").get<std::vector<std::vector<double>>>());
  throw ConfigError("sigma: unknown type " + type);
}

struct EnsembleSpec {
  SigmaSet sigma;
  TimeGrid grid;
  std::size_t scenario_count = 2;   // constant extreme controls; extra entries
  std::size_t switching_count = 0;  // are alternating switching controls
  std::size_t path_count = 1024;
  std::uint64_t seed = 1;

  ScenarioEnsemble make() const {
    auto controls = default_controls(sigma, grid, switching_count);
    if (controls.size() != scenario_count)
      throw ConfigError("ensemble: scenario_count does not match control set (" +
                        std::to_string(controls.size()) + " controls)");
    return ScenarioEnsemble::make(sigma, grid, std::move(controls), path_count, seed);
  }
};

inline nlohmann::json ensemble_to_json(const EnsembleSpec& e) {
  nlohmann::json j;
  j["sigma"] = sigma_to_json(e.sigma);
  j["grid"] = {{"t_start", e.grid.t_start}, {"t_end", e.grid.t_end}, {"steps", e.grid.steps_m}};
  j["scenario_count"] = e.scenario_count;
  j["switching_count"] = e.switching_count;
  j["path_count"] = e.path_count;
  j["seed"] = e.seed;
  return j;
}

inline EnsembleSpec ensemble_from_json(const nlohmann::json& j) {
  EnsembleSpec e;
  e.sigma = sigma_from_json(j.at("sigma"));
  const auto& g = j.at("grid");
  e.grid = TimeGrid(g.at("t_start").get<double>(), g.at("t_end").get<double>(),
                    g.at("steps").get<std::size_t>());
  e.scenario_count = j.at("scenario_count").get<std::size_t>();
  e.switching_count = j.value("switching_count", std::size_t{0});
  e.path_count = j.at("path_count").get<std::size_t>();
  e.seed = j.at("seed").get<std::uint64_t>();
  return e;
}

// ---------------------------------------------------------------------------
// CSV emitters
// ---------------------------------------------------------------------------

inline std::string csv_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Per-node summary of a scalar process: node, time, sublinear mean, lower
/// mean (-E[-X]), and the L2 norm of the slice.
inline void write_process_summary_csv(const std::string& path, const ProcessTensor& x,
                                      const TimeGrid& grid) {
  if (x.d != 1) throw DimensionError("process summary: scalar process required");
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path);
  out << "node,time,upper_mean,lower_mean,l2_norm\n";
  for (std::size_t k = 0; k < x.K; ++k) {
    const auto slice = RandomVariable::from_view(x.node_view(k));
    RandomVariable neg = slice;
    neg *= -1.0;
    out << k << ',' << csv_double(grid.node(k)) << ','
        << csv_double(sublinear_expectation(slice)) << ','
        << csv_double(-sublinear_expectation(neg)) << ','
        << csv_double(lp_norm(slice, 2.0)) << '\n';
  }
}

inline void write_convergence_csv(const std::string& path, const ConvergenceReport& r) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path);
  out << "epsilon,remainder\n";
  for (std::size_t i = 0; i < r.epsilons.size(); ++i)
    out << csv_double(r.epsilons[i]) << ',' << csv_double(r.remainders[i]) << '\n';
}

inline void write_ratio_audit_csv(const std::string& path, const RatioAudit& a) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path);
  out << "probe,numerator,denominator,ratio,included\n";
  for (std::size_t i = 0; i < a.probes.size(); ++i)
    out << i << ',' << csv_double(a.probes[i].numerator) << ','
        << csv_double(a.probes[i].denominator) << ',' << csv_double(a.probes[i].ratio)
        << ',' << (a.probes[i].included ? 1 : 0) << '\n';
}

/// Certificate phi* as a knot/slope table (slope row i spans knot i..i+1).
inline void write_certificate_csv(const std::string& path, const MetricCertificate& c) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path);
  out << "knot,slope\n";
  for (std::size_t i = 0; i < c.knots.size(); ++i)
    out << csv_double(c.knots[i]) << ','
        << (i < c.slopes.size() ? csv_double(c.slopes[i]) : std::string()) << '\n';
}

}  // namespace gmf
