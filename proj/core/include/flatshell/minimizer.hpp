#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flatshell/discrete_space.hpp"
#include "flatshell/energy.hpp"
#include "flatshell/geometry.hpp"

namespace flatshell {

struct SolverConfig {
  double grad_tol = 1e-9;  // residual threshold, relative to (1 + load norm)
  int max_iter = 5000;
  int memory = 10;
  double ls_shrink = 0.5;
  double ls_c1 = 1e-4;
  int restarts = 1;
  std::uint64_t seed = 0;
  double restart_amplitude = 1e-2;  // std-dev of the random perturbation of restarted starts
  bool precondition = true;         // initial inverse-Hessian = linearised stiffness at u = 0

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct SolveDiagnostics {
  int iterations = 0;
  double final_energy = 0.0;
  double final_residual = 0.0;
  int line_search_failures = 0;
  double wall_time = 0.0;  // seconds
  bool converged = false;
  int restart_index = 0;  // which start produced the result
};

struct SolveResult {
  DiscreteDisplacement u;
  SolveDiagnostics diag;
};

/// The line search could not find an acceptable step.
class SolverStall : public std::runtime_error {
 public:
  SolverStall(const std::string& what, SolveDiagnostics diag) : std::runtime_error(what), diag(diag) {}
  SolveDiagnostics diag;
};

/// Residual threshold used by minimize: grad_tol * (1 + load norm).
double residual_target(const EnergyAssembly& asm_, const SolverConfig& cfg);

/// Limited-memory quasi-Newton descent with Armijo backtracking.
///
/// Returns the first iterate whose residual meets residual_target(); a run
/// that exhausts max_iter comes back with diag.converged = false. With
/// cfg.restarts > 1 the remaining starts are u0 plus seeded Gaussian noise, and
/// the lowest-energy converged result wins.
SolveResult minimize(const EnergyAssembly& asm_, const DiscreteDisplacement& u0, const SolverConfig& cfg);

struct HomotopyStep {
  double t = 0.0;
  double c2_distance = 0.0;
  DiscreteDisplacement u;
  SolveDiagnostics diag;
};

/// Thrown when a solve along the homotopy fails; carries the parameter value.
class HomotopyError : public std::runtime_error {
 public:
  HomotopyError(const std::string& what, double t) : std::runtime_error(what), t(t) {}
  double t;
};

/// Solves the plate (t = 0) from rest, then every t > 0 in decreasing order,
/// each warm-started from the previous minimiser (the largest t from the
/// plate solution). `ts` must be strictly decreasing; the returned steps
/// follow the order of `ts`.
std::vector<HomotopyStep> homotopy_solve(const Immersion& family, const std::vector<double>& ts,
                                         const Grid& grid, const Material& mat, const ForceDensity& force,
                                         const SolverConfig& cfg);

/// max_t v_norm(u_t).
double boundedness_certificate(const std::vector<HomotopyStep>& steps);

struct RigidityConfig {
  int starts = 20;
  int max_iter = 2000;
  double rel_tol = 1e-10;  // stop when the relative decrease per step falls below this
  std::uint64_t seed = 0;
};

struct RigidityResult {
  double gap = 0.0;             // best value of R found on the unit sphere
  std::vector<double> values;   // per start
  std::vector<int> iterations;  // per start
  bool converged = false;       // every start reached rel_tol
  DiscreteDisplacement best;
};

/// R(u) = sum_ab ||E0_ab(u)||^2_{L2}, the squared nonlinear plate membrane strain.
double rigidity_functional(const DifferenceOperators& ops, const DiscreteDisplacement& u);
double rigidity_functional(const DifferenceOperators& ops, const DiscreteDisplacement& u,
                           DiscreteDisplacement& grad);

/// Descends R over {v_norm(u) = 1} by Sobolev-preconditioned gradient steps
/// followed by renormalisation, from `cfg.starts` random starts (plus the
/// optional start). Returns the smallest value reached.
RigidityResult rigidity_gap(const Grid& grid, const RigidityConfig& cfg,
                            const std::optional<DiscreteDisplacement>& start = std::nullopt);

}  // namespace flatshell
