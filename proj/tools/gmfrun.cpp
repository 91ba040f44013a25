// Experiment runner CLI. Verbs:
//   run <config.json>   execute the experiment list, write artifacts + manifest
//   report <dir>        render a summary table (and optional SVG remainder plots)
//   schema              print the config schema
// Exit codes: 0 all pass, 1 check failure, 2 config error, 3 divergence.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "gmf/config.hpp"

namespace fs = std::filesystem;

static int do_run(const std::string& config_path, std::string out_dir) {
  if (out_dir.empty())
    if (const char* env = std::getenv("GMF_OUTPUT_DIR")) out_dir = env;
  try {
    const auto cfg = gmf::RunConfig::load(config_path);
    const auto summary = gmf::run_config(cfg, out_dir);
    for (const auto& r : summary.results)
      std::printf("%-6s %-24s %s\n", r.pass ? "pass" : "FAIL", r.name.c_str(),
                  r.detail.c_str());
    if (!summary.all_pass) {
      for (const auto& r : summary.results)
        if (!r.pass) std::printf("failing experiment: %s\n", r.name.c_str());
      return 1;
    }
    return 0;
  } catch (const gmf::ConfigError& ex) {
    std::fprintf(stderr, "config error: %s\n", ex.what());
    return 2;
  } catch (const gmf::ParameterError& ex) {
    std::fprintf(stderr, "config error: %s\n", ex.what());
    return 2;
  } catch (const gmf::DimensionError& ex) {
    std::fprintf(stderr, "config error: %s\n", ex.what());
    return 2;
  } catch (const gmf::DivergenceError& ex) {
    std::fprintf(stderr, "divergence at step %zu scenario %zu: %s\n", ex.step,
                 ex.scenario, ex.what());
    return 3;
  }
}

static void write_svg_plot(const fs::path& csv, const fs::path& svg) {
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::pair<double, double>> pts;
  while (std::getline(in, line)) {
    double e, r;
    if (std::sscanf(line.c_str(), "%lf,%lf", &e, &r) == 2 && e > 0 && r > 0)
      pts.emplace_back(std::log10(e), std::log10(r));
  }
  if (pts.size() < 2) return;
  double x0 = pts[0].first, x1 = pts[0].first, y0 = pts[0].second, y1 = pts[0].second;
  for (auto& [x, y] : pts) {
    x0 = std::min(x0, x); x1 = std::max(x1, x);
    y0 = std::min(y0, y); y1 = std::max(y1, y);
  }
  const double w = 360, h = 240, pad = 30;
  auto sx = [&](double x) { return pad + (x - x0) / std::max(x1 - x0, 1e-12) * (w - 2 * pad); };
  auto sy = [&](double y) { return h - pad - (y - y0) / std::max(y1 - y0, 1e-12) * (h - 2 * pad); };
  std::ofstream out(svg);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
      << "'>\n<rect width='100%' height='100%' fill='white'/>\n<polyline fill='none' "
         "stroke='black' points='";
  for (auto& [x, y] : pts) out << sx(x) << ',' << sy(y) << ' ';
  out << "'/>\n<text x='10' y='16' font-size='11'>log10 remainder vs log10 epsilon ("
      << csv.stem().string() << ")</text>\n</svg>\n";
}

static int do_report(const std::string& dir, bool plots) {
  const fs::path manifest_path = fs::path(dir) / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) {
    std::fprintf(stderr, "missing manifest: %s\n", manifest_path.string().c_str());
    return 2;
  }
  nlohmann::json manifest;
  in >> manifest;
  std::printf("config hash: %llu  seed: %llu  all pass: %s\n",
              static_cast<unsigned long long>(manifest.at("config_hash").get<std::uint64_t>()),
              static_cast<unsigned long long>(manifest.at("seed").get<std::uint64_t>()),
              manifest.at("all_pass").get<bool>() ? "yes" : "no");
  std::printf("%-6s %-16s %-24s %s\n", "status", "type", "name", "detail");
  for (const auto& r : manifest.at("experiments"))
    std::printf("%-6s %-16s %-24s %s\n", r.at("pass").get<bool>() ? "pass" : "FAIL",
                r.at("type").get<std::string>().c_str(),
                r.at("name").get<std::string>().c_str(),
                r.at("detail").get<std::string>().c_str());
  if (plots) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      const auto p = entry.path();
      if (p.extension() == ".csv" && p.stem().string().ends_with("_remainders"))
        write_svg_plot(p, fs::path(dir) / (p.stem().string() + ".svg"));
    }
  }
  return 0;
}

int main(int argc, char** argv) {
  CLI::App app{"scenario-ensemble experiment runner"};
  app.require_subcommand(1);

  std::string config_path, out_dir, report_dir;
  bool plots = false;

  auto* run = app.add_subcommand("run", "execute a config");
  run->add_option("config", config_path, "JSON config path")->required();
  run->add_option("-o,--output", out_dir,
                  "output directory (overrides config and GMF_OUTPUT_DIR)");

  auto* report = app.add_subcommand("report", "summarize an artifact directory");
  report->add_option("dir", report_dir, "artifact directory")->required();
  report->add_flag("--plots", plots, "emit SVG plots for remainder curves");

  app.add_subcommand("schema", "print the config schema");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("run")) return do_run(config_path, out_dir);
  if (app.got_subcommand("report")) return do_report(report_dir, plots);
  std::fputs(gmf::config_schema_text(), stdout);
  return 0;
}
