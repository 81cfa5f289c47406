#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "flatshell/grid.hpp"

namespace flatshell {

using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the tangent vectors of an immersion are (numerically) parallel.
class ImmersionFailure : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// Cross-product norms below this are treated as a degenerate immersion.
inline constexpr double kDegenerateImmersionThreshold = 1e-12;

enum class ImmersionKind { plate, paraboloid, cylinder_patch, sinusoidal_bump };

std::string_view to_string(ImmersionKind kind);
ImmersionKind parse_immersion_kind(std::string_view tag);

/// Parameters of the analytic catalog. Which ones are read depends on the kind:
///   paraboloid       z = (t/2)(kappa1 y1^2 + kappa2 y2^2)
///   cylinder_patch   circular arc of curvature t in y1, straight in y2
///   sinusoidal_bump  z = t sin(pi m1 y1/L1) sin(pi m2 y2/L2)
struct ImmersionParams {
  double t = 0.0;
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double m1 = 1.0;
  double m2 = 1.0;
};

/// Value and exact first/second partial derivatives of an immersion at a point.
struct ImmersionJet {
  Vec3 value;
  std::array<Vec3, 2> grad;  // d1, d2
  std::array<Vec3, 3> hess;  // d11, d12, d22

  const Vec3& second(int alpha, int beta) const { return hess[alpha + beta]; }
};

class Immersion {
 public:
  Immersion(ImmersionKind kind, ImmersionParams params, double L1, double L2);

  static Immersion plate(double L1 = 1.0, double L2 = 1.0) {
    return Immersion(ImmersionKind::plate, {}, L1, L2);
  }
  static Immersion paraboloid(double t, double L1 = 1.0, double L2 = 1.0) {
    ImmersionParams p;
    p.t = t;
    return Immersion(ImmersionKind::paraboloid, p, L1, L2);
  }

  /// Builds an immersion from a catalog tag and named parameters; unknown tags
  /// and parameter names not used by the kind are rejected.
  static Immersion from_named(std::string_view tag, const std::map<std::string, double>& named,
                              double L1, double L2);

  /// Same family member with the scale parameter replaced.
  Immersion with_scale(double t) const;

  ImmersionKind kind() const { return kind_; }
  const ImmersionParams& params() const { return params_; }
  double L1() const { return L1_; }
  double L2() const { return L2_; }

  /// Throws GeometryError when y lies outside the closed domain.
  ImmersionJet eval(double y1, double y2) const;

 private:
  ImmersionKind kind_;
  ImmersionParams params_;
  double L1_;
  double L2_;
};

/// (d1 ^ d2) / |d1 ^ d2|.
Vec3 unit_normal(const Vec3& d1, const Vec3& d2);

struct FundamentalForms {
  Mat2 metric;          // a_{ab}
  Mat2 inverse_metric;  // a^{ab}
  double sqrt_a = 1.0;  // |d1 ^ d2|
  Mat2 curvature;       // b_{ab}
};

FundamentalForms fundamental_forms(const ImmersionJet& jet, const Vec3& normal);

/// gamma[s](a, b) = Gamma^s_{ab}.
using ChristoffelSymbols = std::array<Mat2, 2>;

/// Tangential Christoffel symbols a^s . d_b a_a with a^s = a^{sn} d_n theta.
ChristoffelSymbols christoffel(const ImmersionJet& jet, const Mat2& inverse_metric);

/// det(a^{as} b_{sb}).
double gaussian_curvature(const Mat2& inverse_metric, const Mat2& curvature);

struct SurfacePoint {
  Mat2 metric = Mat2::Identity();
  Mat2 inverse_metric = Mat2::Identity();
  Mat2 curvature = Mat2::Zero();
  ChristoffelSymbols gamma{Mat2::Zero(), Mat2::Zero()};
  double sqrt_a = 1.0;
  double K = 0.0;
};

/// Evaluates every geometric quantity of one immersion at a point.
SurfacePoint surface_point(const Immersion& imm, double y1, double y2);

/// Per-node geometric quantities of an immersion sampled on a grid.
class SurfaceGeometryField {
 public:
  SurfaceGeometryField(Grid grid, std::vector<SurfacePoint> nodes);

  const Grid& grid() const { return grid_; }
  const SurfacePoint& at(int i, int j) const { return nodes_[grid_.index(i, j)]; }
  const SurfacePoint& operator[](std::size_t k) const { return nodes_[k]; }
  std::size_t size() const { return nodes_.size(); }

 private:
  Grid grid_;
  std::vector<SurfacePoint> nodes_;
};

/// Throws ImmersionFailure naming the offending node.
SurfaceGeometryField geometry_field(const Immersion& imm, const Grid& grid);

/// Grid-sampled surrogate for the C^2 distance between two immersions.
double c2_distance(const Immersion& imm, const Immersion& ref, const Grid& grid);

}  // namespace flatshell
