#include "flatshell/geometry.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/Geometry>
#include <fmt/format.h>

namespace flatshell {

std::string_view to_string(ImmersionKind kind) {
  switch (kind) {
    case ImmersionKind::plate:
      return "plate";
    case ImmersionKind::paraboloid:
      return "paraboloid";
    case ImmersionKind::cylinder_patch:
      return "cylinder_patch";
    case ImmersionKind::sinusoidal_bump:
      return "sinusoidal_bump";
  }
  return "unknown";
}

ImmersionKind parse_immersion_kind(std::string_view tag) {
  for (auto kind : {ImmersionKind::plate, ImmersionKind::paraboloid, ImmersionKind::cylinder_patch,
                    ImmersionKind::sinusoidal_bump}) {
    if (to_string(kind) == tag) return kind;
  }
  throw GeometryError(fmt::format("unknown immersion kind '{}'", tag));
}

Immersion::Immersion(ImmersionKind kind, ImmersionParams params, double L1, double L2)
    : kind_(kind), params_(params), L1_(L1), L2_(L2) {
  if (!(L1 > 0.0) || !(L2 > 0.0)) throw GeometryError("immersion domain must have positive sides");
  if (!std::isfinite(params.t) || !std::isfinite(params.kappa1) || !std::isfinite(params.kappa2) ||
      !std::isfinite(params.m1) || !std::isfinite(params.m2)) {
    throw GeometryError("immersion parameters must be finite");
  }
}

Immersion Immersion::from_named(std::string_view tag, const std::map<std::string, double>& named,
                                double L1, double L2) {
  const ImmersionKind kind = parse_immersion_kind(tag);
  std::set<std::string> allowed;
  switch (kind) {
    case ImmersionKind::plate:
      break;
    case ImmersionKind::paraboloid:
      allowed = {"t", "kappa1", "kappa2"};
      break;
    case ImmersionKind::cylinder_patch:
      allowed = {"t"};
      break;
    case ImmersionKind::sinusoidal_bump:
      allowed = {"t", "m1", "m2"};
      break;
  }
  ImmersionParams p;
  for (const auto& [name, value] : named) {
    if (!allowed.contains(name)) {
      throw GeometryError(fmt::format("immersion '{}' has no parameter '{}'", tag, name));
    }
    if (name == "t") p.t = value;
    if (name == "kappa1") p.kappa1 = value;
    if (name == "kappa2") p.kappa2 = value;
    if (name == "m1") p.m1 = value;
    if (name == "m2") p.m2 = value;
  }
  return Immersion(kind, p, L1, L2);
}

Immersion Immersion::with_scale(double t) const {
  ImmersionParams p = params_;
  p.t = t;
  return Immersion(kind_, p, L1_, L2_);
}

ImmersionJet Immersion::eval(double y1, double y2) const {
  const double slack1 = 1e-12 * L1_;
  const double slack2 = 1e-12 * L2_;
  if (!(y1 >= -slack1 && y1 <= L1_ + slack1 && y2 >= -slack2 && y2 <= L2_ + slack2)) {
    throw GeometryError(fmt::format("point ({}, {}) outside domain (0,{})x(0,{})", y1, y2, L1_, L2_));
  }

  ImmersionJet jet;
  jet.value = Vec3(y1, y2, 0.0);
  jet.grad = {Vec3::UnitX(), Vec3::UnitY()};
  jet.hess = {Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  const double t = params_.t;

  switch (kind_) {
    case ImmersionKind::plate:
      break;
    case ImmersionKind::paraboloid: {
      const double k1 = params_.kappa1;
      const double k2 = params_.kappa2;
      jet.value.z() = 0.5 * t * (k1 * y1 * y1 + k2 * y2 * y2);
      jet.grad[0].z() = t * k1 * y1;
      jet.grad[1].z() = t * k2 * y2;
      jet.hess[0].z() = t * k1;
      jet.hess[2].z() = t * k2;
      break;
    }
    case ImmersionKind::cylinder_patch: {
      // Arc of radius 1/t tangent to the plate at y1 = 0.
      if (t == 0.0) break;
      const double s = std::sin(t * y1);
      const double c = std::cos(t * y1);
      const double half = std::sin(0.5 * t * y1);
      jet.value = Vec3(s / t, y2, 2.0 * half * half / t);
      jet.grad[0] = Vec3(c, 0.0, s);
      jet.hess[0] = Vec3(-t * s, 0.0, t * c);
      break;
    }
    case ImmersionKind::sinusoidal_bump: {
      const double w1 = std::numbers::pi * params_.m1 / L1_;
      const double w2 = std::numbers::pi * params_.m2 / L2_;
      const double s1 = std::sin(w1 * y1), c1 = std::cos(w1 * y1);
      const double s2 = std::sin(w2 * y2), c2 = std::cos(w2 * y2);
      jet.value.z() = t * s1 * s2;
      jet.grad[0].z() = t * w1 * c1 * s2;
      jet.grad[1].z() = t * w2 * s1 * c2;
      jet.hess[0].z() = -t * w1 * w1 * s1 * s2;
      jet.hess[1].z() = t * w1 * w2 * c1 * c2;
      jet.hess[2].z() = -t * w2 * w2 * s1 * s2;
      break;
    }
  }
  return jet;
}

Vec3 unit_normal(const Vec3& d1, const Vec3& d2) {
  const Vec3 n = d1.cross(d2);
  const double len = n.norm();
  if (!(len >= kDegenerateImmersionThreshold)) {
    throw ImmersionFailure(fmt::format("degenerate immersion: |d1 ^ d2| = {:.3e}", len));
  }
  return n / len;
}

FundamentalForms fundamental_forms(const ImmersionJet& jet, const Vec3& normal) {
  FundamentalForms ff;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      ff.metric(a, b) = jet.grad[a].dot(jet.grad[b]);
      ff.curvature(a, b) = normal.dot(jet.second(a, b));
    }
  }
  const double det = ff.metric(0, 0) * ff.metric(1, 1) - ff.metric(0, 1) * ff.metric(1, 0);
  if (!(det > 0.0)) throw ImmersionFailure("singular first fundamental form");
  ff.inverse_metric << ff.metric(1, 1) / det, -ff.metric(0, 1) / det, -ff.metric(1, 0) / det,
      ff.metric(0, 0) / det;
  ff.sqrt_a = jet.grad[0].cross(jet.grad[1]).norm();
  return ff;
}

ChristoffelSymbols christoffel(const ImmersionJet& jet, const Mat2& inverse_metric) {
  // Contravariant tangent vectors a^s = a^{sn} a_n.
  std::array<Vec3, 2> upper;
  for (int s = 0; s < 2; ++s) {
    upper[s] = inverse_metric(s, 0) * jet.grad[0] + inverse_metric(s, 1) * jet.grad[1];
  }
  ChristoffelSymbols gamma;
  for (int s = 0; s < 2; ++s) {
    gamma[s](0, 0) = upper[s].dot(jet.hess[0]);
    gamma[s](0, 1) = upper[s].dot(jet.hess[1]);
    gamma[s](1, 0) = gamma[s](0, 1);
    gamma[s](1, 1) = upper[s].dot(jet.hess[2]);
  }
  return gamma;
}

double gaussian_curvature(const Mat2& inverse_metric, const Mat2& curvature) {
  return (inverse_metric * curvature).determinant();
}

SurfacePoint surface_point(const Immersion& imm, double y1, double y2) {
  const ImmersionJet jet = imm.eval(y1, y2);
  const Vec3 normal = unit_normal(jet.grad[0], jet.grad[1]);
  const FundamentalForms ff = fundamental_forms(jet, normal);
  SurfacePoint p;
  p.metric = ff.metric;
  p.inverse_metric = ff.inverse_metric;
  p.curvature = ff.curvature;
  p.sqrt_a = ff.sqrt_a;
  p.gamma = christoffel(jet, ff.inverse_metric);
  p.K = gaussian_curvature(ff.inverse_metric, ff.curvature);
  return p;
}

SurfaceGeometryField::SurfaceGeometryField(Grid grid, std::vector<SurfacePoint> nodes)
    : grid_(grid), nodes_(std::move(nodes)) {
  if (nodes_.size() != grid_.size()) throw GeometryError("geometry field size does not match grid");
}

SurfaceGeometryField geometry_field(const Immersion& imm, const Grid& grid) {
  if (std::abs(imm.L1() - grid.L1()) > 1e-12 * grid.L1() ||
      std::abs(imm.L2() - grid.L2()) > 1e-12 * grid.L2()) {
    throw GeometryError("grid and immersion domains differ");
  }
  std::vector<SurfacePoint> nodes(grid.size());
  for (int j = 0; j < grid.n2(); ++j) {
    for (int i = 0; i < grid.n1(); ++i) {
      try {
        nodes[grid.index(i, j)] = surface_point(imm, grid.y1(i), grid.y2(j));
      } catch (const ImmersionFailure& e) {
        throw ImmersionFailure(fmt::format("node ({}, {}): {}", i, j, e.what()));
      }
    }
  }
  return SurfaceGeometryField(grid, std::move(nodes));
}

double c2_distance(const Immersion& imm, const Immersion& ref, const Grid& grid) {
  if (imm.L1() != ref.L1() || imm.L2() != ref.L2()) {
    throw GeometryError("c2_distance: immersions live on different domains");
  }
  double worst = 0.0;
  for (int j = 0; j < grid.n2(); ++j) {
    for (int i = 0; i < grid.n1(); ++i) {
      const ImmersionJet a = imm.eval(grid.y1(i), grid.y2(j));
      const ImmersionJet b = ref.eval(grid.y1(i), grid.y2(j));
      double d = (a.value - b.value).norm();
      for (int k = 0; k < 2; ++k) d += (a.grad[k] - b.grad[k]).norm();
      for (int k = 0; k < 3; ++k) d += (a.hess[k] - b.hess[k]).norm();
      worst = std::max(worst, d);
    }
  }
  return worst;
}

}  // namespace flatshell
