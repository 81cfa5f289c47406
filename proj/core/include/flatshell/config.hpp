#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "flatshell/elasticity.hpp"
#include "flatshell/energy.hpp"
#include "flatshell/geometry.hpp"
#include "flatshell/grid.hpp"
#include "flatshell/minimizer.hpp"

namespace flatshell {

/// Configuration problem; `section` and `key` name the offending entry when known,
/// `line` is 1-based (0 when the problem is not tied to a line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string section = {}, std::string key = {}, int line = 0);
  std::string section;
  std::string key;
  int line;
};

struct DomainConfig {
  double L1 = 1.0;
  double L2 = 1.0;
  int n1 = 33;
  int n2 = 33;
};

struct ImmersionConfig {
  std::string kind;
  std::map<std::string, double> params;  // family parameters other than the scale t
};

struct ForceConfig {
  std::string kind = "constant";          // constant | polynomial | gaussian_bump | csv
  std::map<std::string, double> params;   // catalog parameters
  std::array<std::filesystem::path, 3> paths;  // csv: one field file per component (empty = zero)
};

struct StudySettings {
  std::vector<double> ts{0.0};
  int rigidity_starts = 20;
  int rigidity_max_iter = 2000;
};

struct OutputConfig {
  std::filesystem::path directory = ".";
  std::string prefix = "flatshell";
};

/// Parsed study configuration.
///
/// Text format: `[section]` headers followed by `key = value` lines; `#` starts
/// a comment. Sections: [domain] [material] [immersion] [force] [solver]
/// [study] [output]. Required keys: [material] lambda, mu, eps and
/// [immersion] kind. Everything else has a default; unknown keys are errors.
struct StudyConfig {
  DomainConfig domain;
  Material material{1.0, 1.0, 0.1};
  ImmersionConfig immersion;
  ForceConfig force;
  SolverConfig solver;
  StudySettings study;
  OutputConfig output;
  std::string source_text;

  Grid grid() const { return Grid(domain.L1, domain.L2, domain.n1, domain.n2); }
  /// Family member at scale t.
  Immersion immersion_at(double t) const;
  ForceDensity force_density(const Grid& grid) const;
  /// FNV-1a hash of the configuration text, as 16 hex digits.
  std::string hash() const;
};

StudyConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = ".");
StudyConfig parse_config(const std::filesystem::path& path);

}  // namespace flatshell
