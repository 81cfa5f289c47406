#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "flatshell/config.hpp"
#include "flatshell/csv_io.hpp"
#include "flatshell/study.hpp"
#include "support.hpp"

using namespace flatshell;
using flatshell::testing::random_displacement;

namespace {

const char* kMinimal = R"(
[material]
lambda = 1
mu = 1
eps = 0.1

[immersion]
kind = paraboloid
)";

std::string config_error(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string with(const std::string& extra) { return std::string(kMinimal) + extra; }

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("flatshell_tests_" + name);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("minimal configuration gets the documented defaults") {
  const StudyConfig c = parse_config_text(kMinimal);
  CHECK(c.domain.L1 == 1.0);
  CHECK(c.domain.n1 == 33);
  CHECK(c.domain.n2 == 33);
  CHECK(c.material.mu() == 1.0);
  CHECK(c.immersion.kind == "paraboloid");
  CHECK(c.force.kind == "constant");
  CHECK(c.study.ts == std::vector<double>{0.0});
  CHECK(c.solver.grad_tol == 1e-9);
  CHECK(c.solver.max_iter == 5000);
  CHECK(c.solver.memory == 10);
  CHECK(c.solver.ls_shrink == 0.5);
  CHECK(c.solver.ls_c1 == 1e-4);
  CHECK(c.solver.restarts == 1);
  CHECK(c.output.prefix == "flatshell");
}

TEST_CASE("configuration errors name the section and key") {
  const std::string missing_mu = config_error("[material]\nlambda = 1\neps = 0.1\n[immersion]\nkind = plate\n");
  CHECK(missing_mu.find("[material] mu") != std::string::npos);

  const std::string negative = config_error("[material]\nlambda = -1\nmu = 1\neps = 0.1\n[immersion]\nkind = plate\n");
  CHECK(negative.find("line 2: [material] lambda") != std::string::npos);

  const std::string bad_eps = config_error("[material]\nlambda = 1\nmu = 1\neps = 0\n[immersion]\nkind = plate\n");
  CHECK(bad_eps.find("[material] eps") != std::string::npos);

  CHECK(config_error(with("[study]\nts = 0.2, 0.1\n")).find("[study] ts") != std::string::npos);
  CHECK(config_error(with("[study]\nts = 0.1, 0.2, 0\n")).find("strictly decreasing") != std::string::npos);
  CHECK(config_error(with("[solver]\nlinesearch = wolfe\n")).find("[solver] linesearch: unknown key") != std::string::npos);
  CHECK(config_error(with("[plot]\n")).find("unknown section") != std::string::npos);
  CHECK(config_error(with("[domain]\nn1 = 3\n")).find("[domain]") != std::string::npos);
  CHECK(config_error(with("[domain]\nn1 = many\n")).find("expected an integer") != std::string::npos);
  CHECK(config_error(with("[immersion]\nkappa1 = 2\n")).empty());
  CHECK(config_error(with("[force]\np1_path = nowhere.csv\n")).find("[force] p1_path") != std::string::npos);
  CHECK(config_error(std::string(kMinimal) + "[material]\nmu = 2\n").find("duplicate key") != std::string::npos);
}

TEST_CASE("immersion scale comes from the t-list") {
  const std::string e = config_error("[material]\nlambda = 1\nmu = 1\neps = 0.1\n[immersion]\nkind = paraboloid\nt = 0.1\n");
  CHECK(e.find("[immersion] t") != std::string::npos);
  const StudyConfig c = parse_config_text(with("[study]\nts = 0.2, 0.1, 0\n"));
  CHECK(c.immersion_at(0.1).params().t == 0.1);
}

TEST_CASE("config hash follows the text") {
  const StudyConfig a = parse_config_text(kMinimal), b = parse_config_text(with("[solver]\nseed = 3\n"));
  CHECK(a.hash().size() == 16);
  CHECK(a.hash() == parse_config_text(kMinimal).hash());
  CHECK(a.hash() != b.hash());
}

TEST_CASE("force fields from csv files") {
  const auto dir = scratch_dir("force");
  const Grid g(1, 1, 9, 9);
  const DiscreteField p3 = DiscreteField::sample(g, [](double a, double b) { return a - 2 * b; });
  {
    std::ofstream out(dir / "p3.csv");
    write_field_csv(out, p3, "# test field");
  }
  const StudyConfig c = parse_config_text(
      with("[domain]\nn1 = 9\nn2 = 9\n[force]\nkind = csv\np3_path = p3.csv\n"), dir);
  const ForceDensity f = c.force_density(c.grid());
  CHECK(f.component(2) == p3.values());
  CHECK(f.component(0).norm() == 0.0);
}

TEST_CASE("displacement csv format") {
  const Grid g(1, 1, 9, 9);
  std::ostringstream zero;
  write_displacement_csv(zero, DiscreteDisplacement(g));
  std::istringstream lines(zero.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "i,j,y1,y2,u1,u2,u3");
  std::string row;
  int count = 0;
  while (std::getline(lines, row)) {
    ++count;
    CHECK(row.substr(row.size() - 6) == ",0,0,0");
  }
  CHECK(count == 81);
  CHECK(format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("solution export round-trips bitwise") {
  const auto dir = scratch_dir("roundtrip");
  const Grid g(1, 1, 17, 9);
  const DiscreteDisplacement u = random_displacement(g, 17, 1e-3);
  export_solution(u, dir / "u.csv", "# flatshell metadata");
  const DiscreteDisplacement v = import_solution(dir / "u.csv", g);
  CHECK(std::equal(u.packed().data(), u.packed().data() + u.packed().size(), v.packed().data()));
  std::ifstream in(dir / "u.csv");
  std::string first;
  std::getline(in, first);
  CHECK(first.rfind("#", 0) == 0);
}

TEST_CASE("study reports") {
  StudyConfig cfg = parse_config_text(with("[domain]\nn1 = 9\nn2 = 9\n[force]\np1 = 0.5\np2 = -0.3\np3 = 1\n"));

  SUBCASE("plate only") {
    const StudyReport r = run_convergence_study(cfg);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].v_norm_error == 0.0);
    CHECK(r.rows[0].c2_distance == 0.0);
    CHECK(r.all_converged());
  }

  SUBCASE("zero force") {
    StudyConfig z = parse_config_text(with("[domain]\nn1 = 9\nn2 = 9\n[study]\nts = 0.2, 0.1, 0\n"));
    const StudyReport r = run_convergence_study(z);
    for (const StudyRow& row : r.rows) {
      CHECK(row.v_norm == 0.0);
      CHECK(row.v_norm_error == 0.0);
    }
  }

  SUBCASE("sweep columns") {
    cfg = parse_config_text(with("[domain]\nn1 = 9\nn2 = 9\n[force]\np1 = 0.5\np2 = -0.3\np3 = 1\n[study]\nts = 0.2, 0.1, 0.05, 0\n"));
    const StudyReport r = run_convergence_study(cfg);
    REQUIRE(r.rows.size() == 4);
    CHECK(r.rows.back().t == 0.0);
    CHECK(r.rows.back().v_norm_error == 0.0);
    for (std::size_t k = 1; k < r.rows.size(); ++k) {
      CHECK(r.rows[k].c2_distance < r.rows[k - 1].c2_distance);
      CHECK(r.rows[k].v_norm_error < r.rows[k - 1].v_norm_error);
      CHECK(r.rows[k].positivity_gap > 0.0);
    }
    const std::string csv = study_csv(r, cfg);
    CHECK(csv.rfind("# flatshell " + std::string(kToolVersion) + " config_hash=" + cfg.hash(), 0) == 0);
    CHECK(csv.find("\nt,c2_distance,final_energy,v_norm,v_norm_error,residual,iterations,positivity_gap,"
                   "line_search_failures,converged\n") != std::string::npos);
    CHECK(csv == study_csv(run_convergence_study(cfg), cfg));
  }
}

TEST_CASE("verification suite") {
  const StudyConfig cfg = parse_config_text(with("[domain]\nn1 = 9\nn2 = 9\n[force]\np1 = 0.5\np2 = -0.3\np3 = 1\n[study]\nts = 0.1, 0\n"));
  const VerificationSummary ok = run_verification(cfg);
  INFO(ok.to_text());
  CHECK(ok.all_passed());

  VerifyOptions corrupt;
  corrupt.corrupt_gradient = 1e-3;
  const VerificationSummary bad = run_verification(cfg, corrupt);
  CHECK_FALSE(bad.all_passed());
  const std::string text = bad.to_text();
  CHECK(text.find("FAIL energy_model gradient_vs_fd_plate observed=") != std::string::npos);
}

}
