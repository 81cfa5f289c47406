#include "flatshell/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "flatshell/csv_io.hpp"

namespace flatshell {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Entry {
  std::string value;
  int line;
};
using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"domain", {"L1", "L2", "n1", "n2"}},
      {"material", {"lambda", "mu", "eps"}},
      {"immersion", {}},  // kind + family parameters, checked against the catalog
      {"force", {}},      // kind + catalog parameters or csv paths
      {"solver",
       {"grad_tol", "max_iter", "memory", "ls_shrink", "ls_c1", "restarts", "seed", "restart_amplitude",
        "precondition"}},
      {"study", {"ts", "rigidity_starts", "rigidity_max_iter"}},
      {"output", {"directory", "prefix"}},
  };
  return keys;
}

double to_real(const std::string& section, const std::string& key, const Entry& e) {
  double v = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError(fmt::format("expected a real number, got '{}'", e.value), section, key, e.line);
  }
  return v;
}

long long to_integer(const std::string& section, const std::string& key, const Entry& e) {
  long long v = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError(fmt::format("expected an integer, got '{}'", e.value), section, key, e.line);
  }
  return v;
}

bool to_bool(const std::string& section, const std::string& key, const Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw ConfigError(fmt::format("expected true/false, got '{}'", e.value), section, key, e.line);
}

}  // namespace

ConfigError::ConfigError(const std::string& what, std::string section_, std::string key_, int line_)
    : std::runtime_error([&] {
        std::string where;
        if (line_ > 0) where += fmt::format("line {}: ", line_);
        if (!section_.empty()) where += fmt::format("[{}]{}{}: ", section_, key_.empty() ? "" : " ", key_);
        return where + what;
      }()),
      section(std::move(section_)),
      key(std::move(key_)),
      line(line_) {}

Immersion StudyConfig::immersion_at(double t) const {
  std::map<std::string, double> named = immersion.params;
  if (immersion.kind != "plate") named["t"] = t;
  return Immersion::from_named(immersion.kind, named, domain.L1, domain.L2);
}

ForceDensity StudyConfig::force_density(const Grid& grid) const {
  if (force.kind != "csv") return ForceDensity::from_catalog(grid, force.kind, force.params);
  std::array<Eigen::VectorXd, 3> p;
  for (int c = 0; c < 3; ++c) {
    p[c] = force.paths[c].empty() ? Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()))
                                  : read_field_csv(force.paths[c], grid).values();
  }
  return ForceDensity(grid, p[0], p[1], p[2]);
}

std::string StudyConfig::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : source_text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return fmt::format("{:016x}", h);
}

StudyConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  std::map<std::string, Section> sections;
  std::string current;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", {}, {}, line_no);
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!known_keys().contains(current)) {
        throw ConfigError(fmt::format("unknown section [{}]", current), {}, {}, line_no);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", current, {}, line_no);
    if (current.empty()) throw ConfigError("key outside of any section", {}, {}, line_no);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", current, {}, line_no);
    const auto& allowed = known_keys().at(current);
    if (!allowed.empty() && !allowed.contains(key)) {
      throw ConfigError("unknown key", current, key, line_no);
    }
    if (!sections[current].emplace(key, Entry{value, line_no}).second) {
      throw ConfigError("duplicate key", current, key, line_no);
    }
  }

  StudyConfig cfg;
  cfg.source_text = text;
  auto find = [&](const std::string& s, const std::string& k) -> const Entry* {
    auto sit = sections.find(s);
    if (sit == sections.end()) return nullptr;
    auto kit = sit->second.find(k);
    return kit == sit->second.end() ? nullptr : &kit->second;
  };
  auto real_or = [&](const std::string& s, const std::string& k, double fallback) {
    const Entry* e = find(s, k);
    return e ? to_real(s, k, *e) : fallback;
  };
  auto int_or = [&](const std::string& s, const std::string& k, long long fallback) {
    const Entry* e = find(s, k);
    return e ? to_integer(s, k, *e) : fallback;
  };
  auto required_real = [&](const std::string& s, const std::string& k) {
    const Entry* e = find(s, k);
    if (!e) throw ConfigError("missing required key", s, k);
    return to_real(s, k, *e);
  };

  // [domain]
  cfg.domain.L1 = real_or("domain", "L1", cfg.domain.L1);
  cfg.domain.L2 = real_or("domain", "L2", cfg.domain.L2);
  cfg.domain.n1 = static_cast<int>(int_or("domain", "n1", cfg.domain.n1));
  cfg.domain.n2 = static_cast<int>(int_or("domain", "n2", cfg.domain.n2));
  try {
    (void)cfg.grid();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), "domain");
  }

  // [material]
  {
    const double lambda = required_real("material", "lambda");
    const double mu = required_real("material", "mu");
    const double eps = required_real("material", "eps");
    auto reject = [&](const std::string& key, const std::string& what) {
      throw ConfigError(what, "material", key, find("material", key)->line);
    };
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) reject("lambda", "must be >= 0");
    if (!(mu > 0.0) || !std::isfinite(mu)) reject("mu", "must be > 0");
    if (!(eps > 0.0) || !std::isfinite(eps)) reject("eps", "must be > 0");
    cfg.material = Material(lambda, mu, eps);
  }

  // [immersion]
  {
    const Entry* kind = find("immersion", "kind");
    if (!kind) throw ConfigError("missing required key", "immersion", "kind");
    cfg.immersion.kind = kind->value;
    for (const auto& [k, e] : sections["immersion"]) {
      if (k == "kind") continue;
      if (k == "t") throw ConfigError("the scale t is set by [study] ts", "immersion", k, e.line);
      cfg.immersion.params[k] = to_real("immersion", k, e);
    }
    try {
      (void)cfg.immersion_at(0.0);
    } catch (const GeometryError& e) {
      throw ConfigError(e.what(), "immersion", {}, kind->line);
    }
  }

  // [force]
  {
    if (const Entry* kind = find("force", "kind")) cfg.force.kind = kind->value;
    const std::array<std::string, 3> path_keys = {"p1_path", "p2_path", "p3_path"};
    for (const auto& [k, e] : sections["force"]) {
      if (k == "kind") continue;
      const auto pk = std::find(path_keys.begin(), path_keys.end(), k);
      if (pk != path_keys.end()) {
        if (cfg.force.kind != "csv") throw ConfigError("paths are only valid with kind = csv", "force", k, e.line);
        std::filesystem::path p = e.value;
        if (p.is_relative()) p = base_dir / p;
        if (!std::filesystem::exists(p)) {
          throw ConfigError(fmt::format("file '{}' does not exist", p.string()), "force", k, e.line);
        }
        cfg.force.paths[static_cast<std::size_t>(pk - path_keys.begin())] = p;
        continue;
      }
      if (cfg.force.kind == "csv") throw ConfigError("unknown key", "force", k, e.line);
      cfg.force.params[k] = to_real("force", k, e);
    }
    if (cfg.force.kind != "csv") {
      try {
        (void)cfg.force_density(cfg.grid());
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), "force");
      }
    }
  }

  // [solver]
  {
    SolverConfig& s = cfg.solver;
    s.grad_tol = real_or("solver", "grad_tol", s.grad_tol);
    s.max_iter = static_cast<int>(int_or("solver", "max_iter", s.max_iter));
    s.memory = static_cast<int>(int_or("solver", "memory", s.memory));
    s.ls_shrink = real_or("solver", "ls_shrink", s.ls_shrink);
    s.ls_c1 = real_or("solver", "ls_c1", s.ls_c1);
    s.restarts = static_cast<int>(int_or("solver", "restarts", s.restarts));
    s.seed = static_cast<std::uint64_t>(int_or("solver", "seed", static_cast<long long>(s.seed)));
    s.restart_amplitude = real_or("solver", "restart_amplitude", s.restart_amplitude);
    if (const Entry* e = find("solver", "precondition")) s.precondition = to_bool("solver", "precondition", *e);
    try {
      s.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), "solver");
    }
  }

  // [study]
  if (const Entry* e = find("study", "ts")) {
    cfg.study.ts.clear();
    std::stringstream list(e->value);
    std::string item;
    while (std::getline(list, item, ',')) cfg.study.ts.push_back(to_real("study", "ts", Entry{trim(item), e->line}));
    const int line = e->line;
    if (cfg.study.ts.empty()) throw ConfigError("empty t-list", "study", "ts", line);
    for (std::size_t k = 1; k < cfg.study.ts.size(); ++k) {
      if (!(cfg.study.ts[k] < cfg.study.ts[k - 1])) {
        throw ConfigError("t-list must be strictly decreasing", "study", "ts", line);
      }
    }
    if (cfg.study.ts.back() != 0.0) throw ConfigError("t-list must end at 0", "study", "ts", line);
  }
  cfg.study.rigidity_starts = static_cast<int>(int_or("study", "rigidity_starts", cfg.study.rigidity_starts));
  cfg.study.rigidity_max_iter = static_cast<int>(int_or("study", "rigidity_max_iter", cfg.study.rigidity_max_iter));

  // [output]
  if (const Entry* e = find("output", "directory")) cfg.output.directory = e->value;
  if (const Entry* e = find("output", "prefix")) cfg.output.prefix = e->value;

  return cfg;
}

StudyConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace flatshell
