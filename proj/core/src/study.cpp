#include "flatshell/study.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "flatshell/csv_io.hpp"

namespace flatshell {

bool StudyReport::all_converged() const {
  for (const StudyRow& r : rows) {
    if (!r.converged) return false;
  }
  return true;
}

StudyReport run_convergence_study(const StudyConfig& cfg) {
  const Grid grid = cfg.grid();
  const ForceDensity force = cfg.force_density(grid);
  const Immersion family = cfg.immersion_at(0.0);

  StudyReport report;
  report.steps = homotopy_solve(family, cfg.study.ts, grid, cfg.material, force, cfg.solver);
  const DifferenceOperators ops(grid);
  const DiscreteDisplacement& plate_solution = report.steps.back().u;
  for (const HomotopyStep& s : report.steps) {
    StudyRow row;
    row.t = s.t;
    row.c2_distance = s.c2_distance;
    row.final_energy = s.diag.final_energy;
    row.v_norm = v_norm(s.u, ops);
    row.v_norm_error = v_norm(s.u - plate_solution, ops);
    row.residual = s.diag.final_residual;
    row.iterations = s.diag.iterations;
    row.line_search_failures = s.diag.line_search_failures;
    row.converged = s.diag.converged;
    row.positivity_gap = positivity_gap(geometry_field(family.with_scale(s.t), grid), cfg.material);
    report.rows.push_back(row);
  }
  report.boundedness = boundedness_certificate(report.steps);
  return report;
}

std::string metadata_line(const StudyConfig& cfg) {
  return fmt::format("# flatshell {} config_hash={} seed={}", kToolVersion, cfg.hash(), cfg.solver.seed);
}

std::string study_csv(const StudyReport& report, const StudyConfig& cfg) {
  std::ostringstream out;
  out << metadata_line(cfg) << '\n';
  out << "t,c2_distance,final_energy,v_norm,v_norm_error,residual,iterations,positivity_gap,"
         "line_search_failures,converged\n";
  for (const StudyRow& r : report.rows) {
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{:.17g},{},{}\n", r.t, r.c2_distance,
                       r.final_energy, r.v_norm, r.v_norm_error, r.residual, r.iterations, r.positivity_gap,
                       r.line_search_failures, r.converged ? 1 : 0);
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Verification

bool VerificationSummary::all_passed() const {
  for (const CheckResult& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

std::string VerificationSummary::to_text() const {
  std::string out;
  for (const CheckResult& c : checks) {
    out += fmt::format("{} {} {} observed={:.6e} threshold={:.6e}\n", c.passed ? "PASS" : "FAIL", c.module,
                       c.invariant, c.observed, c.threshold);
  }
  return out;
}

double gradient_check(const EnergyAssembly& e, int directions, std::uint64_t seed, double tau, double corrupt) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_field = [&](double scale) {
    DiscreteDisplacement u(e.grid());
    for (Eigen::Index k = 0; k < u.packed().size(); ++k) u.packed()[k] = scale * normal(rng);
    u.clamp();
    return u;
  };
  double worst = 0.0;
  for (int n = 0; n < directions; ++n) {
    const DiscreteDisplacement u = random_field(0.05);
    const DiscreteDisplacement v = random_field(1.0);
    const double analytic = (1.0 + corrupt) * e.gradient(u).packed().dot(v.packed());
    const double fd = (e.energy(u + tau * v) - e.energy(u - tau * v)) / (2.0 * tau);
    const double scale = std::max({std::abs(analytic), std::abs(fd), 1e-300});
    worst = std::max(worst, std::abs(analytic - fd) / scale);
  }
  return worst;
}

namespace {

CheckResult below(std::string module, std::string invariant, double observed, double threshold) {
  return {std::move(module), std::move(invariant), observed <= threshold, observed, threshold};
}

CheckResult above(std::string module, std::string invariant, double observed, double threshold) {
  return {std::move(module), std::move(invariant), observed > threshold, observed, threshold};
}

/// Max relative mismatch between the analytic jet and Richardson-extrapolated
/// central differences, at `points` random interior points.
double derivative_mismatch(const Immersion& imm, int points, std::uint64_t seed) {
  const double h = 1e-5;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u1(2 * h, imm.L1() - 2 * h), u2(2 * h, imm.L2() - 2 * h);
  double worst = 0.0;
  auto rel = [](const Vec3& approx, const Vec3& exact) { return (approx - exact).norm() / std::max(1.0, exact.norm()); };
  for (int p = 0; p < points; ++p) {
    const double y1 = u1(rng), y2 = u2(rng);
    const ImmersionJet jet = imm.eval(y1, y2);
    for (int a = 0; a < 2; ++a) {
      auto shifted = [&](double s) { return a == 0 ? imm.eval(y1 + s, y2) : imm.eval(y1, y2 + s); };
      auto central = [&](double s, auto pick) { return Vec3((pick(shifted(s)) - pick(shifted(-s))) / (2 * s)); };
      auto richardson = [&](auto pick) { return Vec3((4.0 * central(h / 2, pick) - central(h, pick)) / 3.0); };
      worst = std::max(worst, rel(richardson([](const ImmersionJet& j) { return j.value; }), jet.grad[a]));
      for (int b = 0; b < 2; ++b) {
        worst = std::max(worst, rel(richardson([b](const ImmersionJet& j) { return j.grad[b]; }), jet.second(a, b)));
      }
    }
  }
  return worst;
}

}  // namespace

VerificationSummary run_verification(const StudyConfig& cfg, const VerifyOptions& options) {
  VerificationSummary summary;
  auto& out = summary.checks;
  const Grid grid = cfg.grid();
  const ForceDensity force = cfg.force_density(grid);
  const double t_check = cfg.study.ts.front() > 0.0 ? cfg.study.ts.front() : 0.1;
  const Immersion shell = cfg.immersion_at(t_check);
  const Immersion flat = Immersion::plate(grid.L1(), grid.L2());
  const SurfaceGeometryField shell_field = geometry_field(shell, grid);
  const SurfaceGeometryField flat_field = geometry_field(flat, grid);

  // geometry_kernel
  out.push_back(below("geometry_kernel", "analytic_derivatives_vs_fd", derivative_mismatch(shell, 100, 11), 1e-8));
  {
    double worst = 0.0;
    for (std::size_t k = 0; k < shell_field.size(); ++k) {
      const SurfacePoint& p = shell_field[k];
      worst = std::max(worst, (p.metric * p.inverse_metric - Mat2::Identity()).cwiseAbs().maxCoeff());
    }
    out.push_back(below("geometry_kernel", "metric_inverse", worst, 1e-13));
  }
  {
    // Christoffel symbols against 1/2 a^{sn}(d_a a_nb + d_b a_an - d_n a_ab), metric derivatives from the jet.
    double worst = 0.0;
    for (int j = 0; j < grid.n2(); ++j) {
      for (int i = 0; i < grid.n1(); ++i) {
        const ImmersionJet jet = shell.eval(grid.y1(i), grid.y2(j));
        const SurfacePoint& p = shell_field.at(i, j);
        auto dmetric = [&](int g, int a, int b) {
          return jet.second(a, g).dot(jet.grad[b]) + jet.grad[a].dot(jet.second(b, g));
        };
        for (int s = 0; s < 2; ++s)
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
              double g = 0.0;
              for (int n = 0; n < 2; ++n)
                g += 0.5 * p.inverse_metric(s, n) * (dmetric(a, n, b) + dmetric(b, a, n) - dmetric(n, a, b));
              worst = std::max(worst, std::abs(g - p.gamma[s](a, b)));
            }
      }
    }
    out.push_back(below("geometry_kernel", "christoffel_metric_formula", worst, 1e-10));
  }

  // elasticity_tensor
  out.push_back(above("elasticity_tensor", "positivity_gap_plate", positivity_gap(flat_field, cfg.material), 0.0));
  out.push_back(above("elasticity_tensor", "positivity_gap_shell", positivity_gap(shell_field, cfg.material), 0.0));
  {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    double worst = 0.0;
    for (std::size_t k = 0; k < shell_field.size(); k += 7) {
      const SurfacePoint& p = shell_field[k];
      const ElasticityTensor A = build_tensor(p.inverse_metric, cfg.material);
      Mat2 s;
      s(0, 0) = normal(rng);
      s(1, 1) = normal(rng);
      s(0, 1) = s(1, 0) = normal(rng);
      const double full = contract(A, s, s);
      worst = std::max(worst, std::abs(trace_decomposition(A, p.inverse_metric, s).sum() - full) / std::abs(full));
    }
    out.push_back(below("elasticity_tensor", "trace_decomposition", worst, 1e-12));
  }

  // energy_model
  const EnergyAssembly plate_energy(flat_field, cfg.material, force);
  const EnergyAssembly shell_energy(shell_field, cfg.material, force);
  out.push_back(below("energy_model", "gradient_vs_fd_plate",
                      gradient_check(plate_energy, 20, 101, 1e-6, options.corrupt_gradient), 1e-6));
  out.push_back(below("energy_model", "gradient_vs_fd_shell",
                      gradient_check(shell_energy, 20, 202, 1e-6, options.corrupt_gradient), 1e-6));
  {
    std::mt19937_64 rng(303);
    std::normal_distribution<double> normal(0.0, 0.05);
    double worst = 0.0;
    for (int n = 0; n < 50; ++n) {
      DiscreteDisplacement u(grid);
      for (Eigen::Index k = 0; k < u.packed().size(); ++k) u.packed()[k] = normal(rng);
      u.clamp();
      const double a = plate_energy.energy(u);
      const double b = plate::energy(cfg.material, force, u);
      worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-300));
      const DiscreteDisplacement ga = plate_energy.gradient(u);
      const DiscreteDisplacement gb = plate::gradient(cfg.material, force, u);
      worst = std::max(worst, (ga.packed() - gb.packed()).norm() / std::max(gb.packed().norm(), 1e-300));
    }
    out.push_back(below("energy_model", "plate_reduction", worst, 1e-12));
  }
  {
    const EnergyAssembly unloaded(shell_field, cfg.material, ForceDensity(grid));
    std::mt19937_64 rng(404);
    std::normal_distribution<double> normal(0.0, 0.1);
    double lowest = 1.0;
    for (int n = 0; n < 20; ++n) {
      DiscreteDisplacement u(grid);
      for (Eigen::Index k = 0; k < u.packed().size(); ++k) u.packed()[k] = normal(rng);
      u.clamp();
      lowest = std::min(lowest, unloaded.energy(u));
    }
    out.push_back(above("energy_model", "unloaded_energy_positive", lowest, 0.0));
  }

  // minimizer
  {
    RigidityConfig rc;
    rc.starts = std::min(cfg.study.rigidity_starts, 5);
    rc.max_iter = cfg.study.rigidity_max_iter;
    rc.seed = cfg.solver.seed;
    const RigidityResult r = rigidity_gap(Grid(grid.L1(), grid.L2(), 9, 9), rc);
    out.push_back(above("minimizer", "rigidity_gap_9x9", r.gap, 0.0));
  }
  return summary;
}

}  // namespace flatshell
