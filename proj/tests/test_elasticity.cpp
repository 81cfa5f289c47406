#include <cmath>
#include <random>

#include <doctest.h>

#include "flatshell/elasticity.hpp"

using namespace flatshell;
using doctest::Approx;

namespace {

Mat2 random_symmetric(std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Mat2 s;
  s(0, 0) = N(rng);
  s(1, 1) = N(rng);
  s(0, 1) = s(1, 0) = N(rng);
  return s;
}

int delta(int a, int b) { return a == b ? 1 : 0; }

}  // namespace

TEST_SUITE("elasticity") {

TEST_CASE("material invariants") {
  CHECK_THROWS_AS(Material(-1, 1, 0.1), MaterialError);
  CHECK_THROWS_AS(Material(1, 0, 0.1), MaterialError);
  CHECK_THROWS_AS(Material(1, 1, 0), MaterialError);
  CHECK_NOTHROW(Material(0, 1, 0.1));
}

TEST_CASE("plate tensor components") {
  const ElasticityTensor A = build_tensor(Mat2::Identity(), Material(1, 1, 0.1));
  CHECK(A(0, 0, 0, 0) == Approx(16.0 / 3.0).epsilon(1e-15));
  CHECK(A(0, 0, 1, 1) == Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(A(0, 1, 0, 1) == Approx(2.0).epsilon(1e-15));

  const ElasticityTensor B = build_tensor(Mat2::Identity(), Material(0, 1, 0.1));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t)
          CHECK(B(a, b, s, t) == 2.0 * (delta(a, s) * delta(b, t) + delta(a, t) * delta(b, s)));
}

TEST_CASE("plate tensor equals the general tensor at the flat metric") {
  for (double lambda : {0.0, 0.3, 1.0, 7.5}) {
    for (double mu : {0.2, 1.0, 3.0}) {
      const Material m(lambda, mu, 0.1);
      const ElasticityTensor A = build_tensor(Mat2::Identity(), m);
      const ElasticityTensor P = plate_tensor(m);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int s = 0; s < 2; ++s)
            for (int t = 0; t < 2; ++t) CHECK(A(a, b, s, t) == P(a, b, s, t));
    }
  }
}

TEST_CASE("tensor symmetries") {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 20; ++n) {
    const Mat2 m = random_symmetric(rng);
    const Mat2 inv = (m * m.transpose() + 0.5 * Mat2::Identity()).eval();
    const ElasticityTensor A = build_tensor(inv, Material(0.7, 1.3, 0.1));
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int s = 0; s < 2; ++s)
          for (int t = 0; t < 2; ++t) {
            CHECK(A(a, b, s, t) == A(b, a, s, t));
            CHECK(A(a, b, s, t) == A(a, b, t, s));
            CHECK(A(a, b, s, t) == A(s, t, a, b));
          }
    CHECK(voigt(A).isApprox(voigt(A).transpose(), 0.0));
  }
}

TEST_CASE("contraction") {
  const ElasticityTensor A = build_tensor(Mat2::Identity(), Material(1, 1, 0.1));
  std::mt19937_64 rng(4);
  CHECK(contract(A, Mat2::Zero(), random_symmetric(rng)) == 0.0);
  CHECK(contract(A, Mat2::Identity(), Mat2::Identity()) == Approx(40.0 / 3.0).epsilon(1e-15));

  const Mat2 inv = (Mat2() << 1.2, 0.1, 0.1, 0.9).finished();
  const ElasticityTensor B = build_tensor(inv, Material(1, 1, 0.1));
  for (int n = 0; n < 50; ++n) {
    const Mat2 s = random_symmetric(rng), t = random_symmetric(rng);
    const double st = contract(B, s, t), ts = contract(B, t, s);
    CHECK(std::abs(st - ts) <= 1e-13 * std::max(1.0, std::abs(st)));
    const Mat2 u = random_symmetric(rng);
    CHECK(contract(B, s + 2.0 * u, t) ==
          Approx(contract(B, s, t) + 2.0 * contract(B, u, t)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("trace decomposition") {
  const ElasticityTensor A = build_tensor(Mat2::Identity(), Material(1, 1, 0.1));
  const TraceParts zero = trace_decomposition(A, Mat2::Identity(), Mat2::Zero());
  CHECK(zero.isotropic == 0.0);
  CHECK(zero.deviatoric == 0.0);
  const TraceParts id = trace_decomposition(A, Mat2::Identity(), Mat2::Identity());
  CHECK(id.isotropic == Approx(16.0 / 3.0).epsilon(1e-15));
  CHECK(id.deviatoric == Approx(8.0).epsilon(1e-15));

  std::mt19937_64 rng(8);
  for (int n = 0; n < 100; ++n) {
    const Mat2 m = random_symmetric(rng);
    const Mat2 inv = (m * m.transpose() + 0.2 * Mat2::Identity()).eval();
    const Material mat(std::abs(random_symmetric(rng)(0, 0)), 0.5 + std::abs(m(0, 1)), 0.1);
    const ElasticityTensor B = build_tensor(inv, mat);
    const Mat2 s = random_symmetric(rng);
    const double full = contract(B, s, s);
    CHECK(std::abs(trace_decomposition(B, inv, s).sum() - full) <= 1e-12 * std::abs(full));
  }
}

TEST_CASE("positivity gap") {
  const Grid g(1, 1, 9, 9);
  const SurfaceGeometryField flat = geometry_field(Immersion::plate(), g);
  CHECK(std::abs(positivity_gap(flat, Material(0, 1, 0.1)) - 4.0) <= 1e-12);
  CHECK(positivity_gap(flat, Material(1, 1, 0.1)) >= 4.0 - 1e-12);
  const double plate_gap = positivity_gap(flat, Material(1, 1, 0.1));
  const double shell_gap = positivity_gap(geometry_field(Immersion::paraboloid(0.1), g), Material(1, 1, 0.1));
  CHECK(plate_gap >= 3.9);
  CHECK(shell_gap >= 3.9);
  CHECK(std::abs(plate_gap - shell_gap) <= 10 * 0.1);
}

TEST_CASE("coercivity bound holds at every node") {
  const Grid g(1, 1, 9, 9);
  const Material mat(1, 1, 0.1);
  const SurfaceGeometryField field = geometry_field(Immersion::paraboloid(0.2), g);
  const double gap = positivity_gap(field, mat);
  std::mt19937_64 rng(12);
  for (std::size_t k = 0; k < field.size(); ++k) {
    const ElasticityTensor A = build_tensor(field[k].inverse_metric, mat);
    for (int n = 0; n < 100; ++n) {
      const Mat2 t = random_symmetric(rng);
      const double lhs = contract(A, t, t) * field[k].sqrt_a;
      CHECK(lhs >= gap * t.squaredNorm() * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("tensor depends Lipschitz-continuously on the metric") {
  const Material mat(1, 1, 0.1);
  const Mat2 inv = (Mat2() << 1.1, 0.2, 0.2, 0.8).finished();
  const ElasticityTensor A = build_tensor(inv, mat);
  double constant = 0.0;
  for (double eta : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const Mat2 perturbed = inv + eta * (Mat2() << 1, -1, -1, 0.5).finished();
    const ElasticityTensor B = build_tensor(perturbed, mat);
    double diff = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int s = 0; s < 2; ++s)
          for (int t = 0; t < 2; ++t) diff = std::max(diff, std::abs(A(a, b, s, t) - B(a, b, s, t)));
    constant = std::max(constant, diff / eta);
  }
  MESSAGE("observed Lipschitz constant " << constant);
  CHECK(constant < 50.0);
}

}
