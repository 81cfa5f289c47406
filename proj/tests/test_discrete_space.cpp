#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <doctest.h>

#include "flatshell/discrete_space.hpp"
#include "flatshell/energy.hpp"
#include "support.hpp"

using namespace flatshell;
using flatshell::testing::random_displacement;
using flatshell::testing::random_field;
using doctest::Approx;

namespace {

constexpr double pi = std::numbers::pi;

double interior_max_error(const DiscreteField& f, double expected) {
  const Grid& g = f.grid();
  double worst = 0.0;
  for (int j = 1; j < g.n2() - 1; ++j)
    for (int i = 1; i < g.n1() - 1; ++i) worst = std::max(worst, std::abs(f(i, j) - expected));
  return worst;
}

// Rows of interior nodes only; used to restrict quadratic forms to the clamped space.
Eigen::MatrixXd interior_columns(const Grid& g) {
  std::vector<int> idx;
  for (int j = 0; j < g.n2(); ++j)
    for (int i = 0; i < g.n1(); ++i)
      if (!g.on_boundary(i, j)) idx.push_back(static_cast<int>(g.index(i, j)));
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) P(idx[c], static_cast<Eigen::Index>(c)) = 1.0;
  return P;
}

double smallest_generalized_eigenvalue(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B, Eigen::EigenvaluesOnly);
  REQUIRE(es.info() == Eigen::Success);
  return es.eigenvalues()(0);
}

double poincare_constant(int n) {
  const Grid g(1, 1, n, n);
  const DifferenceOperators ops(g);
  const Eigen::MatrixXd P = interior_columns(g);
  const Eigen::MatrixXd W = quadrature_weights(g).asDiagonal();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(P.cols(), P.cols());
  for (int a = 0; a < 2; ++a) {
    const Eigen::MatrixXd D = Eigen::MatrixXd(ops.first(a, BoundaryKind::h2_0)) * P;
    K += D.transpose() * W * D;
  }
  const Eigen::MatrixXd M = P.transpose() * W * P;
  return 1.0 / std::sqrt(smallest_generalized_eigenvalue(K, M));
}

double korn_constant(int n) {
  const Grid g(1, 1, n, n);
  const DifferenceOperators ops(g);
  const Eigen::MatrixXd P = interior_columns(g);
  const Eigen::Index m = P.cols();
  const Eigen::MatrixXd W = quadrature_weights(g).asDiagonal();
  const Eigen::MatrixXd D1 = Eigen::MatrixXd(ops.first(0, BoundaryKind::h1_0)) * P;
  const Eigen::MatrixXd D2 = Eigen::MatrixXd(ops.first(1, BoundaryKind::h1_0)) * P;
  const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(D1.rows(), m);
  // strain rows: e11, e12, e22 as maps of the stacked (u1, u2)
  Eigen::MatrixXd E11(D1.rows(), 2 * m), E12(D1.rows(), 2 * m), E22(D1.rows(), 2 * m);
  E11 << D1, Z;
  E12 << 0.5 * D2, 0.5 * D1;
  E22 << Z, D2;
  const Eigen::MatrixXd S = E11.transpose() * W * E11 + 2.0 * E12.transpose() * W * E12 + E22.transpose() * W * E22;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  const Eigen::MatrixXd block = D1.transpose() * W * D1 + D2.transpose() * W * D2;
  G.topLeftCorner(m, m) = block;
  G.bottomRightCorner(m, m) = block;
  return smallest_generalized_eigenvalue(S, G);
}

}  // namespace

TEST_SUITE("discrete_space") {

TEST_CASE("grid invariants") {
  CHECK_THROWS_AS(Grid(1, 1, 4, 9), std::invalid_argument);
  CHECK_THROWS_AS(Grid(0, 1, 9, 9), std::invalid_argument);
  const Grid g(2.0, 3.0, 9, 7);
  CHECK(g.h1() == 0.25);
  CHECK(g.h2() == 0.5);
  CHECK(g.y1(8) == 2.0);
  CHECK(g.y2(6) == 3.0);
  CHECK(quadrature_weights(g).sum() == Approx(6.0).epsilon(1e-15));
}

TEST_CASE("first differences are exact on linears and bilinears") {
  const Grid g(1, 1, 9, 9);
  CHECK(interior_max_error(d1(DiscreteField::sample(g, [](double, double) { return 3.5; }), 0), 0.0) == 0.0);
  CHECK(interior_max_error(d1(DiscreteField::sample(g, [](double y1, double) { return y1; }), 0), 1.0) <= 1e-14);
  const DiscreteField f = DiscreteField::sample(g, [](double y1, double y2) { return y1 * y2; });
  CHECK(d1(f, 1)(4, 4) == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("second differences") {
  const Grid g(1, 1, 9, 9);
  CHECK(interior_max_error(d2(DiscreteField::sample(g, [](double y1, double) { return y1 * y1; }), 0, 0), 2.0) <= 1e-12);
  CHECK(interior_max_error(d2(DiscreteField::sample(g, [](double y1, double y2) { return y1 * y2; }), 0, 1), 1.0) <= 1e-12);
  const DiscreteField zero(g, BoundaryKind::h2_0);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) CHECK(d2(zero, a, b).values().cwiseAbs().maxCoeff() == 0.0);

  const DiscreteField r = random_field(g, 2, BoundaryKind::h2_0);
  CHECK(d2(r, 0, 1).values() == d2(r, 1, 0).values());
}

TEST_CASE("difference operators are linear") {
  const Grid g(1, 1, 17, 17);
  for (BoundaryKind kind : {BoundaryKind::free, BoundaryKind::h1_0, BoundaryKind::h2_0}) {
    const DiscreteField f = random_field(g, 10, kind), h = random_field(g, 11, kind);
    const DiscreteField sum(g, f.values() + h.values(), kind), scaled(g, -2.5 * f.values(), kind);
    for (int a = 0; a < 2; ++a) {
      const double scale = d1(f, a).values().cwiseAbs().maxCoeff();
      CHECK((d1(sum, a).values() - d1(f, a).values() - d1(h, a).values()).cwiseAbs().maxCoeff() <= 1e-14 * scale);
      CHECK((d1(scaled, a).values() + 2.5 * d1(f, a).values()).cwiseAbs().maxCoeff() <= 1e-14 * scale);
      for (int b = 0; b < 2; ++b) {
        const double s2 = d2(f, a, b).values().cwiseAbs().maxCoeff();
        CHECK((d2(sum, a, b).values() - d2(f, a, b).values() - d2(h, a, b).values()).cwiseAbs().maxCoeff() <=
              1e-14 * s2);
      }
    }
  }
}

TEST_CASE("trapezoidal quadrature") {
  const Grid g(1, 1, 9, 9);
  const DiscreteField one = DiscreteField::sample(g, [](double, double) { return 1.0; });
  CHECK(integrate(one, one) == Approx(1.0).epsilon(1e-15));
  CHECK(integrate(DiscreteField::sample(g, [](double y1, double) { return y1; }), one) ==
        Approx(0.5).epsilon(1e-15));

  double previous = 1.0;
  for (int n : {9, 17, 33}) {
    const Grid gn(1, 1, n, n);
    const double err = std::abs(integrate(DiscreteField::sample(gn, [](double y1, double) { return y1 * y1; })) - 1.0 / 3.0);
    CHECK(err < previous);
    CHECK(err == Approx(gn.h1() * gn.h1() / 6.0).epsilon(1e-10));
    previous = err;
  }
}

TEST_CASE("bubble H2 seminorm converges at second order") {
  // f = y1(1-y1)y2(1-y2): int f11^2 = int f22^2 = 2/15, int f12^2 = 1/9.
  const double exact = 4.0 / 15.0 + 2.0 / 9.0;
  std::vector<double> errs;
  for (int n : {9, 17, 33, 65}) {
    const Grid g(1, 1, n, n);
    const DiscreteField f =
        DiscreteField::sample(g, [](double a, double b) { return a * (1 - a) * b * (1 - b); }, BoundaryKind::free);
    const DiscreteField f11 = d2(f, 0, 0), f12 = d2(f, 0, 1), f22 = d2(f, 1, 1);
    const DiscreteField sq(g, f11.values().cwiseAbs2() + 2.0 * f12.values().cwiseAbs2() + f22.values().cwiseAbs2());
    errs.push_back(std::abs(integrate(sq) - exact));
  }
  for (std::size_t k = 1; k < errs.size(); ++k) CHECK(errs[k - 1] / errs[k] == Approx(4.0).epsilon(0.1));

  const Grid g(1, 1, 17, 17);
  DiscreteDisplacement u(g);
  u.component(2) = DiscreteField::sample(g, [](double a, double b) { return a * (1 - a) * b * (1 - b); }).values();
  u.clamp();
  CHECK(seminorms(u).h2 > 0.0);
}

TEST_CASE("summation by parts for clamped fields") {
  auto f = [](double a, double b) { return std::sin(pi * a) * std::sin(pi * b) * (1 + a); };
  auto h = [](double a, double b) { return a * (1 - a) * b * (1 - b) * std::cos(b); };
  for (int n : {9, 17, 33, 65}) {
    const Grid g(1, 1, n, n);
    const DiscreteField F = DiscreteField::sample(g, f, BoundaryKind::h1_0);
    const DiscreteField H = DiscreteField::sample(g, h, BoundaryKind::h1_0);
    const double norms = std::sqrt(integrate(DiscreteField(g, F.values().cwiseAbs2())) *
                                   integrate(DiscreteField(g, H.values().cwiseAbs2())));
    double worst = 0.0;
    for (int a = 0; a < 2; ++a) {
      const double ibp = integrate(DiscreteField(g, d1(F, a).values().cwiseProduct(H.values()))) +
                         integrate(DiscreteField(g, F.values().cwiseProduct(d1(H, a).values())));
      worst = std::max(worst, std::abs(ibp) / norms);
    }
    CHECK(worst <= g.h1() * g.h1());
  }
}

TEST_CASE("first differences of clamped fields have no sawtooth kernel") {
  for (int n : {9, 17}) {
    const Grid g(1, 1, n, n);
    const DiscreteField saw = DiscreteField::sample(
        g, [&](double a, double b) {
          const int i = static_cast<int>(std::lround(a / g.h1())), j = static_cast<int>(std::lround(b / g.h2()));
          return (i % 2 == 1 && j % 2 == 1) ? 1.0 : 0.0;
        },
        BoundaryKind::h2_0);
    CHECK(d1(saw, 0).values().norm() > 0.0);
    CHECK(d1(saw, 1).values().norm() > 0.0);
  }
}

TEST_CASE("norms") {
  const Grid g(1, 1, 9, 9);
  DiscreteDisplacement zero(g);
  CHECK(v_norm(zero) == 0.0);
  const Seminorms s0 = seminorms(zero);
  for (int c = 0; c < 3; ++c) {
    CHECK(s0.l2[c] == 0.0);
    CHECK(s0.h1[c] == 0.0);
  }
  CHECK(s0.h2 == 0.0);

  std::mt19937_64 rng(1);
  std::normal_distribution<double> N(0.0, 3.0);
  for (int n = 0; n < 50; ++n) {
    const DiscreteDisplacement u = random_displacement(g, 100 + n), w = random_displacement(g, 500 + n);
    const double c = N(rng);
    CHECK(v_norm(c * u) == Approx(std::abs(c) * v_norm(u)).epsilon(1e-13));
    CHECK(v_norm(u + w) <= v_norm(u) + v_norm(w) + 1e-12);
  }
}

TEST_CASE("displacements are clamped") {
  const Grid g(1, 1, 9, 9);
  DiscreteDisplacement u(g, Eigen::VectorXd::Ones(3 * 81));
  CHECK_FALSE(u.is_clamped());
  u.clamp();
  CHECK(u.is_clamped());
  CHECK(u.component(2)[g.index(0, 4)] == 0.0);
  CHECK(u.component(0)[g.index(4, 4)] == 1.0);
}

TEST_CASE("discrete Poincare constant is stable under refinement") {
  const double c9 = poincare_constant(9), c17 = poincare_constant(17);
  MESSAGE("C_P(9) = " << c9 << ", C_P(17) = " << c17);
  CHECK(c9 > 0.0);
  CHECK(std::abs(c9 - c17) <= 0.05 * c17);
  CHECK(c17 == Approx(1.0 / (pi * std::sqrt(2.0))).epsilon(0.05));
}

TEST_CASE("discrete Korn constant is positive and stable under refinement") {
  const double k9 = korn_constant(9), k17 = korn_constant(17);
  MESSAGE("c_K(9) = " << k9 << ", c_K(17) = " << k17);
  CHECK(k9 > 0.1);
  CHECK(k17 > 0.1);
  CHECK(std::abs(k9 - k17) <= 0.1 * k17);

  // the strain map used above is the one of the energy model
  const Grid g(1, 1, 9, 9);
  DiscreteDisplacement u = random_displacement(g, 77);
  u.component(2).setZero();
  const SymmetricField e = linearized_strain(u);
  const DifferenceOperators ops(g);
  const Eigen::VectorXd u1 = u.component(0), u2 = u.component(1);
  const Eigen::VectorXd e11 = ops.first(0, BoundaryKind::h1_0) * u1;
  const Eigen::VectorXd e12 = 0.5 * (ops.first(1, BoundaryKind::h1_0) * u1 + ops.first(0, BoundaryKind::h1_0) * u2);
  const Eigen::VectorXd e22 = ops.first(1, BoundaryKind::h1_0) * u2;
  CHECK((e.c11 - e11).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((e.c12 - e12).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((e.c22 - e22).cwiseAbs().maxCoeff() <= 1e-12);
}

}
