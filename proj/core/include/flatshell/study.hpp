#pragma once

#include <functional>
#include <string>
#include <vector>

#include "flatshell/config.hpp"
#include "flatshell/minimizer.hpp"

namespace flatshell {

struct StudyRow {
  double t = 0.0;
  double c2_distance = 0.0;
  double final_energy = 0.0;
  double v_norm = 0.0;        // ||u_t||_V
  double v_norm_error = 0.0;  // ||u_t - u_0||_V
  double residual = 0.0;
  int iterations = 0;
  double positivity_gap = 0.0;
  int line_search_failures = 0;
  bool converged = false;
};

struct StudyReport {
  std::vector<StudyRow> rows;  // in the order of the t-list, plate row last
  std::vector<HomotopyStep> steps;
  double boundedness = 0.0;
  bool all_converged() const;
};

StudyReport run_convergence_study(const StudyConfig& cfg);

/// `# flatshell <version> config_hash=<hash> seed=<seed>` followed by the table.
std::string study_csv(const StudyReport& report, const StudyConfig& cfg);
std::string metadata_line(const StudyConfig& cfg);

struct CheckResult {
  std::string module;
  std::string invariant;
  bool passed = false;
  double observed = 0.0;
  double threshold = 0.0;
};

struct VerificationSummary {
  std::vector<CheckResult> checks;
  bool all_passed() const;
  /// One `PASS|FAIL module invariant observed threshold` line per check.
  std::string to_text() const;
};

struct VerifyOptions {
  /// Test hook: scales the analytic gradient by (1 + corrupt_gradient) before
  /// it is compared with finite differences. Zero disables the corruption.
  double corrupt_gradient = 0.0;
};

/// Largest relative mismatch between <grad J(u), v> and the central difference
/// (J(u + tau v) - J(u - tau v)) / (2 tau) over `directions` seeded random pairs.
double gradient_check(const EnergyAssembly& e, int directions, std::uint64_t seed, double tau = 1e-6,
                      double corrupt = 0.0);

VerificationSummary run_verification(const StudyConfig& cfg, const VerifyOptions& options = {});

}  // namespace flatshell
