#pragma once

#include <array>
#include <functional>
#include <stdexcept>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "flatshell/grid.hpp"

namespace flatshell {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Boundary treatment of a nodal field.
///   free  no constraint; derivatives one-sided on the boundary
///   h1_0  zero on the boundary; same stencils as free
///   h2_0  zero on the boundary with zero normal derivative, realised by an
///         even ghost reflection (ghost value = first interior value)
enum class BoundaryKind { free, h1_0, h2_0 };

class DiscreteField {
 public:
  DiscreteField(const Grid& grid, BoundaryKind kind = BoundaryKind::free);
  DiscreteField(const Grid& grid, Eigen::VectorXd values, BoundaryKind kind = BoundaryKind::free);

  /// Samples f at the nodes. For clamped kinds the boundary values are pinned to zero.
  static DiscreteField sample(const Grid& grid, const std::function<double(double, double)>& f,
                              BoundaryKind kind = BoundaryKind::free);

  const Grid& grid() const { return grid_; }
  BoundaryKind kind() const { return kind_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }

 private:
  Grid grid_;
  BoundaryKind kind_;
  Eigen::VectorXd values_;
};

/// Element of the discrete V = H1_0 x H1_0 x H2_0: nodal values of (u1, u2, u3)
/// packed as [u1 | u2 | u3], each block of grid.size() entries.
class DiscreteDisplacement {
 public:
  explicit DiscreteDisplacement(const Grid& grid);
  DiscreteDisplacement(const Grid& grid, Eigen::VectorXd packed);
  DiscreteDisplacement(const DiscreteField& u1, const DiscreteField& u2, const DiscreteField& u3);

  const Grid& grid() const { return grid_; }
  const Eigen::VectorXd& packed() const { return data_; }
  Eigen::VectorXd& packed() { return data_; }

  Eigen::VectorXd::ConstSegmentReturnType component(int c) const {
    return data_.segment(static_cast<Eigen::Index>(c) * n(), n());
  }
  Eigen::VectorXd::SegmentReturnType component(int c) {
    return data_.segment(static_cast<Eigen::Index>(c) * n(), n());
  }
  DiscreteField field(int c) const;

  /// Zeroes all boundary values.
  void clamp();
  bool is_clamped() const;

  DiscreteDisplacement& operator+=(const DiscreteDisplacement& o);
  DiscreteDisplacement& operator-=(const DiscreteDisplacement& o);
  DiscreteDisplacement& operator*=(double c);
  friend DiscreteDisplacement operator+(DiscreteDisplacement a, const DiscreteDisplacement& b) { return a += b; }
  friend DiscreteDisplacement operator-(DiscreteDisplacement a, const DiscreteDisplacement& b) { return a -= b; }
  friend DiscreteDisplacement operator*(double c, DiscreteDisplacement a) { return a *= c; }

 private:
  Eigen::Index n() const { return static_cast<Eigen::Index>(grid_.size()); }
  Grid grid_;
  Eigen::VectorXd data_;
};

/// Sparse difference operators on nodal vectors of one grid.
///
/// Second-order centred stencils in the interior, one-sided second-order
/// stencils in the boundary rows of first derivatives. Second derivatives of
/// h2_0 fields use the even ghost reflection instead, so the pure second
/// differences reproduce the clamped biharmonic stencil and the cross
/// derivative vanishes on the boundary. Cross derivatives are tensor products
/// of 1D first-derivative stencils (the four-point cross in the interior).

class DifferenceOperators {
 public:
  explicit DifferenceOperators(const Grid& grid);

  const Grid& grid() const { return grid_; }

  /// d/dy_alpha, alpha in {0, 1}.
  const SparseMatrix& first(int alpha, BoundaryKind) const { return first_[alpha]; }
  /// d^2/dy_alpha dy_beta.
  const SparseMatrix& second(int alpha, int beta, BoundaryKind kind) const {
    return kind == BoundaryKind::h2_0 ? second_ghost_[alpha + beta] : second_onesided_[alpha + beta];
  }

 private:
  Grid grid_;
  std::array<SparseMatrix, 2> first_;
  std::array<SparseMatrix, 3> second_onesided_;
  std::array<SparseMatrix, 3> second_ghost_;
};

/// Trapezoidal weights of every node.
Eigen::VectorXd quadrature_weights(const Grid& grid);

/// Selects interior nodes: 1 in the interior, 0 on the boundary.
Eigen::VectorXd interior_mask(const Grid& grid);

DiscreteField d1(const DiscreteField& f, int alpha);
DiscreteField d2(const DiscreteField& f, int alpha, int beta);

/// Trapezoidal rule of f * weight over the grid.
double integrate(const DiscreteField& f, const DiscreteField& weight);
double integrate(const DiscreteField& f);

struct Seminorms {
  std::array<double, 3> l2{};  // ||u_i||_{L2}
  std::array<double, 3> h1{};  // |u_i|_{H1}
  double h2 = 0.0;             // |u_3|_{H2}, all four second derivatives
};

Seminorms seminorms(const DiscreteDisplacement& u);
Seminorms seminorms(const DiscreteDisplacement& u, const DifferenceOperators& ops);

/// ||u1||_{H1} + ||u2||_{H1} + ||u3||_{H2}.
double v_norm(const DiscreteDisplacement& u);
double v_norm(const DiscreteDisplacement& u, const DifferenceOperators& ops);

}  // namespace flatshell
