#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "flatshell/discrete_space.hpp"
#include "flatshell/elasticity.hpp"
#include "flatshell/geometry.hpp"

namespace flatshell {

/// Applied force density (p1, p2, p3) sampled at the nodes. Any finite values
/// are allowed, including arbitrary tangential components.
class ForceDensity {
 public:
  explicit ForceDensity(const Grid& grid);
  ForceDensity(const Grid& grid, Eigen::VectorXd p1, Eigen::VectorXd p2, Eigen::VectorXd p3);

  /// Constant force (p1, p2, p3).
  static ForceDensity constant(const Grid& grid, double p1, double p2, double p3);

  /// Catalog: "constant" (p1 p2 p3), "polynomial" (p1 p2 p3 scaled by the
  /// bubble 16 y1(L1-y1) y2(L2-y2)/(L1 L2)^2), "gaussian_bump" (p1 p2 p3 scaled
  /// by exp(-|y-c|^2/(2 sigma^2)), parameters c1 c2 sigma).
  static ForceDensity from_catalog(const Grid& grid, const std::string& kind,
                                   const std::map<std::string, double>& params);

  const Grid& grid() const { return grid_; }
  const Eigen::VectorXd& component(int i) const { return p_[i]; }

  ForceDensity scaled(double c) const;

 private:
  Grid grid_;
  std::array<Eigen::VectorXd, 3> p_;
};

/// Symmetric 2x2 tensor field stored as its three independent components.
struct SymmetricField {
  Eigen::VectorXd c11, c12, c22;

  const Eigen::VectorXd& operator()(int a, int b) const { return a != b ? c12 : (a == 0 ? c11 : c22); }
  Mat2 at(Eigen::Index k) const {
    Mat2 m;
    m << c11[k], c12[k], c12[k], c22[k];
    return m;
  }
};

/// Membrane strains E and bending strains F of a displacement.
struct StrainFields {
  SymmetricField membrane;
  SymmetricField bending;
};

/// Evaluator of the shallow-shell energy for one immersion, material and load.
/// Immutable after construction; all methods are const and reentrant.
class EnergyAssembly {
 public:
  EnergyAssembly(SurfaceGeometryField geometry, Material material, ForceDensity force);

  const Grid& grid() const { return geometry_.grid(); }
  const SurfaceGeometryField& geometry() const { return geometry_; }
  const Material& material() const { return material_; }
  const ForceDensity& force() const { return force_; }
  const DifferenceOperators& operators() const { return ops_; }
  const std::vector<ElasticityTensor>& tensors() const { return tensors_; }
  /// Trapezoidal weight times sqrt(a) at every node.
  const Eigen::VectorXd& area_weights() const { return area_weights_; }

  /// E_ab = 1/2(d_b u_a + d_a u_b) - Gamma^s_ab u_s - b_ab u3 + 1/2 d_a u3 d_b u3
  SymmetricField membrane_strain(const DiscreteDisplacement& u) const;
  /// F_ab = d_ab u3 - Gamma^s_ab d_s u3
  SymmetricField bending_strain(const DiscreteField& u3) const;
  StrainFields strains(const DiscreteDisplacement& u) const;

  /// E'(u)(v): derivative of the membrane strain at u in direction v.
  SymmetricField strain_first_variation(const DiscreteDisplacement& u, const DiscreteDisplacement& v) const;

  double energy(const DiscreteDisplacement& u) const;

  /// Euclidean gradient of the discrete energy with respect to the nodal
  /// values; zero on boundary nodes.
  DiscreteDisplacement gradient(const DiscreteDisplacement& u) const;
  double energy_and_gradient(const DiscreteDisplacement& u, DiscreteDisplacement& grad) const;

  /// energy(u + du) - energy(u), evaluated from strain increments so that it
  /// stays accurate when the change is far below the energy itself.
  double energy_change(const DiscreteDisplacement& u, const DiscreteDisplacement& du) const;

  /// Dual-weighted norm sqrt(sum_k g_k^2 / w_k) of the gradient; approximates
  /// the L2 norm of the Euler-Lagrange residual density.
  double residual_norm(const DiscreteDisplacement& u) const;
  double residual_norm_of(const DiscreteDisplacement& grad) const;

  /// sqrt(sum_k w_k |p_k|^2).
  double load_norm() const;

  /// int p^i u_i sqrt(a) dy.
  double load_work(const DiscreteDisplacement& u) const;

 private:
  struct Derivatives {
    std::array<Eigen::VectorXd, 2> du1, du2, du3;  // first derivatives of each component
    std::array<Eigen::VectorXd, 3> ddu3;           // 11, 12, 22
  };
  Derivatives derivatives(const DiscreteDisplacement& u) const;
  SymmetricField linear_membrane(const DiscreteDisplacement& v, const Derivatives& d) const;
  SymmetricField membrane_from(const DiscreteDisplacement& u, const Derivatives& d) const;
  SymmetricField bending_from(const Derivatives& d) const;

  SurfaceGeometryField geometry_;
  Material material_;
  ForceDensity force_;
  DifferenceOperators ops_;
  std::vector<ElasticityTensor> tensors_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd area_weights_;
  Eigen::VectorXd mask_;
  std::array<std::array<Eigen::VectorXd, 3>, 2> gamma_;  // gamma_[s][11|12|22]
  std::array<Eigen::VectorXd, 3> curvature_;             // b_11, b_12, b_22
};

/// Plate energy computed directly with the flat tensor, no geometry involved.
namespace plate {

/// E0_ab = 1/2(d_a u_b + d_b u_a) + 1/2 d_a u3 d_b u3
SymmetricField membrane_strain(const DiscreteDisplacement& u);
SymmetricField bending_strain(const DiscreteDisplacement& u);
double energy(const Material& mat, const ForceDensity& force, const DiscreteDisplacement& u);
DiscreteDisplacement gradient(const Material& mat, const ForceDensity& force, const DiscreteDisplacement& u);

}  // namespace plate

/// e_ab(v) = 1/2(d_a v_b + d_b v_a)
SymmetricField linearized_strain(const DiscreteDisplacement& v);

}  // namespace flatshell
