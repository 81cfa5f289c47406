// flatshell: shallow-shell energy minimisation and shell-to-plate convergence studies.
//
//   flatshell study    --config study.cfg [--out DIR] [--seed N] [--grid N1xN2]
//   flatshell verify   --config study.cfg
//   flatshell solve    --config study.cfg [--t T]
//   flatshell rigidity --config study.cfg
//   flatshell geometry --config study.cfg [--t T]
//
// Exit codes: 0 success, 2 configuration error, 3 solver nonconvergence,
// 4 verification failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "flatshell/config.hpp"
#include "flatshell/csv_io.hpp"
#include "flatshell/study.hpp"

namespace fs = std::filesystem;
using namespace flatshell;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNonconverged = 3;
constexpr int kExitVerification = 4;

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string grid;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--config", opt.config, "Study configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", opt.out, "Output directory (overrides [output] directory)");
  cmd->add_option("--seed", opt.seed, "RNG seed (overrides [solver] seed)");
  cmd->add_option("--grid", opt.grid, "Grid override, e.g. 33x33");
}

StudyConfig load(const CommonOptions& opt) {
  StudyConfig cfg = parse_config(opt.config);
  if (!opt.out.empty()) cfg.output.directory = opt.out;
  if (opt.seed) cfg.solver.seed = *opt.seed;
  if (!opt.grid.empty()) {
    static const std::regex pattern(R"((\d+)x(\d+))");
    std::smatch m;
    if (!std::regex_match(opt.grid, m, pattern)) throw ConfigError("--grid expects N1xN2, got '" + opt.grid + "'");
    cfg.domain.n1 = std::stoi(m[1]);
    cfg.domain.n2 = std::stoi(m[2]);
    try {
      (void)cfg.grid();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), "domain");
    }
  }
  return cfg;
}

fs::path output_path(const StudyConfig& cfg, const std::string& suffix) {
  fs::create_directories(cfg.output.directory);
  return cfg.output.directory / (cfg.output.prefix + "_" + suffix);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

int cmd_study(const StudyConfig& cfg) {
  const StudyReport report = run_convergence_study(cfg);
  const std::string csv = study_csv(report, cfg);
  const fs::path path = output_path(cfg, "study.csv");
  write_text(path, csv);
  for (std::size_t k = 0; k < report.steps.size(); ++k) {
    export_solution(report.steps[k].u, output_path(cfg, fmt::format("solution_{}.csv", k)),
                    fmt::format("{} t={:.17g}", metadata_line(cfg), report.steps[k].t));
  }
  fmt::print("{:>10} {:>12} {:>16} {:>12} {:>12} {:>10} {:>6}\n", "t", "c2_dist", "energy", "|u_t|_V",
             "|u_t-u_0|_V", "residual", "iters");
  for (const StudyRow& r : report.rows) {
    fmt::print("{:>10.4g} {:>12.5g} {:>16.9g} {:>12.6g} {:>12.6g} {:>10.3e} {:>6}{}\n", r.t, r.c2_distance,
               r.final_energy, r.v_norm, r.v_norm_error, r.residual, r.iterations, r.converged ? "" : "  NOT CONVERGED");
  }
  fmt::print("boundedness max_t |u_t|_V = {:.6g}\nwrote {}\n", report.boundedness, path.string());
  return report.all_converged() ? kExitOk : kExitNonconverged;
}

int cmd_verify(const StudyConfig& cfg) {
  const VerificationSummary summary = run_verification(cfg);
  const std::string text = summary.to_text();
  fmt::print("{}", text);
  write_text(output_path(cfg, "verify.txt"), text);
  return summary.all_passed() ? kExitOk : kExitVerification;
}

int cmd_solve(const StudyConfig& cfg, std::optional<double> t_opt) {
  const double t = t_opt.value_or(cfg.study.ts.front());
  const Grid grid = cfg.grid();
  const EnergyAssembly e(geometry_field(cfg.immersion_at(t), grid), cfg.material, cfg.force_density(grid));
  const SolveResult res = minimize(e, DiscreteDisplacement(grid), cfg.solver);
  const fs::path path = output_path(cfg, "solution.csv");
  export_solution(res.u, path, fmt::format("{} t={:.17g}", metadata_line(cfg), t));
  fmt::print("t={} iterations={} energy={:.12g} residual={:.3e} |u|_V={:.6g} converged={}\nwrote {}\n", t,
             res.diag.iterations, res.diag.final_energy, res.diag.final_residual, v_norm(res.u),
             res.diag.converged, path.string());
  return res.diag.converged ? kExitOk : kExitNonconverged;
}

int cmd_rigidity(const StudyConfig& cfg) {
  RigidityConfig rc;
  rc.starts = cfg.study.rigidity_starts;
  rc.max_iter = cfg.study.rigidity_max_iter;
  rc.seed = cfg.solver.seed;
  const RigidityResult r = rigidity_gap(cfg.grid(), rc);
  std::string csv = metadata_line(cfg) + "\nstart,value,iterations\n";
  for (std::size_t k = 0; k < r.values.size(); ++k) {
    csv += fmt::format("{},{:.17g},{}\n", k, r.values[k], r.iterations[k]);
  }
  write_text(output_path(cfg, "rigidity.csv"), csv);
  fmt::print("rigidity gap {:.6e} over {} starts (all converged: {})\n", r.gap, r.values.size(), r.converged);
  return r.converged ? kExitOk : kExitNonconverged;
}

int cmd_geometry(const StudyConfig& cfg, std::optional<double> t_opt) {
  const double t = t_opt.value_or(cfg.study.ts.front());
  const fs::path path = output_path(cfg, "geometry.csv");
  std::ofstream out(path, std::ios::binary);
  write_geometry_csv(out, geometry_field(cfg.immersion_at(t), cfg.grid()),
                     fmt::format("{} t={:.17g}", metadata_line(cfg), t));
  fmt::print("wrote {}\n", path.string());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear shallow-shell minimisation and shell-to-plate convergence studies"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  CommonOptions opt;
  std::optional<double> t;
  auto* study = app.add_subcommand("study", "Homotopy convergence study over the configured t-list");
  auto* verify = app.add_subcommand("verify", "Run the invariant suite and report pass/fail per check");
  auto* solve = app.add_subcommand("solve", "Minimise the energy for a single immersion");
  auto* rigidity = app.add_subcommand("rigidity", "Probe the plate rigidity gap on the configured grid");
  auto* geometry = app.add_subcommand("geometry", "Dump the geometry field of one immersion");
  for (auto* cmd : {study, verify, solve, rigidity, geometry}) add_common(cmd, opt);
  for (auto* cmd : {solve, geometry}) cmd->add_option("--t", t, "Immersion scale (default: first t of the list)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const StudyConfig cfg = load(opt);
    if (*study) return cmd_study(cfg);
    if (*verify) return cmd_verify(cfg);
    if (*solve) return cmd_solve(cfg, t);
    if (*rigidity) return cmd_rigidity(cfg);
    if (*geometry) return cmd_geometry(cfg, t);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const HomotopyError& e) {
    fmt::print(stderr, "solver failure at t={}: {}\n", e.t, e.what());
    return kExitNonconverged;
  } catch (const SolverStall& e) {
    fmt::print(stderr, "solver stall: {}\n", e.what());
    return kExitNonconverged;
  }
  return kExitOk;
}
