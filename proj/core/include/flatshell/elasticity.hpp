#pragma once

#include <array>
#include <stdexcept>
#include <utility>

#include <Eigen/Core>

#include "flatshell/geometry.hpp"

namespace flatshell {

class MaterialError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Isotropic shell material: Lame-type coefficients and half-thickness.
class Material {
 public:
  /// Requires lambda >= 0, mu > 0, eps > 0.
  Material(double lambda, double mu, double eps);

  double lambda() const { return lambda_; }
  double mu() const { return mu_; }
  double eps() const { return eps_; }

  /// 4 lambda mu / (lambda + 2 mu)
  double isotropic_coefficient() const { return 4.0 * lambda_ * mu_ / (lambda_ + 2.0 * mu_); }

 private:
  double lambda_;
  double mu_;
  double eps_;
};

/// The sixteen components A^{abst} of the two-dimensional elasticity tensor
/// at one node, together with the coefficients it was built from.
class ElasticityTensor {
 public:
  double operator()(int a, int b, int s, int t) const { return c_[((a * 2 + b) * 2 + s) * 2 + t]; }
  double& operator()(int a, int b, int s, int t) { return c_[((a * 2 + b) * 2 + s) * 2 + t]; }

  double isotropic_coefficient = 0.0;
  double mu = 0.0;

  /// Applies the tensor to a symmetric matrix: (A s)^{ab} = A^{abst} s_{st}.
  Mat2 apply(const Mat2& s) const;

 private:
  std::array<double, 16> c_{};
};

/// A^{abst} = (4 lambda mu/(lambda+2 mu)) a^{ab} a^{st} + 2 mu (a^{as} a^{bt} + a^{at} a^{bs}).
ElasticityTensor build_tensor(const Mat2& inverse_metric, const Material& mat);

/// The flat-plate tensor written directly with Kronecker deltas.
ElasticityTensor plate_tensor(const Material& mat);

/// A^{abst} s_{st} t_{ab}.
double contract(const ElasticityTensor& A, const Mat2& s, const Mat2& t);

struct TraceParts {
  double isotropic = 0.0;
  double deviatoric = 0.0;
  double sum() const { return isotropic + deviatoric; }
};

/// Splits A:s:s into (4 lambda mu/(lambda+2 mu)) (a^{ab} s_{ab})^2 and 4 mu Tr(M M), M = a^{-1} s.
TraceParts trace_decomposition(const ElasticityTensor& A, const Mat2& inverse_metric, const Mat2& s);

/// Voigt matrix in the (t11, t22, sqrt(2) t12) convention, so that
/// x^T V x = A:t:t and |x|^2 = sum |t_ab|^2.
Eigen::Matrix3d voigt(const ElasticityTensor& A);

/// Smallest eigenvalue of voigt(A) * sqrt_a over all nodes of the field.
/// Throws MaterialError if it is not strictly positive.
double positivity_gap(const SurfaceGeometryField& field, const Material& mat);

}  // namespace flatshell
