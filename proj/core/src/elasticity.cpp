#include "flatshell/elasticity.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace flatshell {

Material::Material(double lambda, double mu, double eps) : lambda_(lambda), mu_(mu), eps_(eps) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw MaterialError(fmt::format("material: lambda must be >= 0, got {}", lambda));
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw MaterialError(fmt::format("material: mu must be > 0, got {}", mu));
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw MaterialError(fmt::format("material: eps must be > 0, got {}", eps));
  }
}

Mat2 ElasticityTensor::apply(const Mat2& s) const {
  Mat2 out;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      double acc = 0.0;
      for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) acc += (*this)(a, b, p, q) * s(p, q);
      }
      out(a, b) = acc;
    }
  }
  return out;
}

ElasticityTensor build_tensor(const Mat2& g, const Material& mat) {
  ElasticityTensor A;
  A.isotropic_coefficient = mat.isotropic_coefficient();
  A.mu = mat.mu();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t)
          A(a, b, s, t) = A.isotropic_coefficient * (g(a, b) * g(s, t)) +
                          2.0 * mat.mu() * (g(a, s) * g(b, t) + g(a, t) * g(b, s));
  return A;
}

ElasticityTensor plate_tensor(const Material& mat) {
  auto delta = [](int x, int y) { return x == y ? 1.0 : 0.0; };
  ElasticityTensor A;
  A.isotropic_coefficient = mat.isotropic_coefficient();
  A.mu = mat.mu();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t)
          A(a, b, s, t) = A.isotropic_coefficient * delta(a, b) * delta(s, t) +
                          2.0 * mat.mu() * (delta(a, s) * delta(b, t) + delta(a, t) * delta(b, s));
  return A;
}

double contract(const ElasticityTensor& A, const Mat2& s, const Mat2& t) {
  double acc = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) acc += A(a, b, p, q) * s(p, q) * t(a, b);
  return acc;
}

TraceParts trace_decomposition(const ElasticityTensor& A, const Mat2& inverse_metric, const Mat2& s) {
  const double trace = (inverse_metric.array() * s.array()).sum();
  const Mat2 mixed = inverse_metric * s;  // (a^{sa} s_{ab})
  TraceParts parts;
  parts.isotropic = A.isotropic_coefficient * trace * trace;
  parts.deviatoric = 4.0 * A.mu * (mixed * mixed).trace();
  return parts;
}

Eigen::Matrix3d voigt(const ElasticityTensor& A) {
  const double r2 = std::sqrt(2.0);
  Eigen::Matrix3d V;
  V << A(0, 0, 0, 0), A(0, 0, 1, 1), r2 * A(0, 0, 0, 1),  //
      A(1, 1, 0, 0), A(1, 1, 1, 1), r2 * A(1, 1, 0, 1),   //
      r2 * A(0, 1, 0, 0), r2 * A(0, 1, 1, 1), 2.0 * A(0, 1, 0, 1);
  return V;
}

double positivity_gap(const SurfaceGeometryField& field, const Material& mat) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < field.size(); ++k) {
    const SurfacePoint& p = field[k];
    const Eigen::Matrix3d V = voigt(build_tensor(p.inverse_metric, mat)) * p.sqrt_a;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(V, Eigen::EigenvaluesOnly);
    gap = std::min(gap, eig.eigenvalues()(0));
  }
  if (!(gap > 0.0)) {
    throw MaterialError(fmt::format("elasticity tensor is not positive-definite (gap {})", gap));
  }
  return gap;
}

}  // namespace flatshell
