#include "flatshell/energy.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace flatshell {

namespace {

constexpr BoundaryKind kTangential = BoundaryKind::h1_0;
constexpr BoundaryKind kTransverse = BoundaryKind::h2_0;

// s:t for symmetric matrices.
double dot(const Mat2& s, const Mat2& t) { return (s.array() * t.array()).sum(); }

Eigen::VectorXd zeros(const Grid& g) { return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size())); }

}  // namespace

// ---------------------------------------------------------------------------
// ForceDensity

ForceDensity::ForceDensity(const Grid& grid) : grid_(grid), p_{zeros(grid), zeros(grid), zeros(grid)} {}

ForceDensity::ForceDensity(const Grid& grid, Eigen::VectorXd p1, Eigen::VectorXd p2, Eigen::VectorXd p3)
    : grid_(grid), p_{std::move(p1), std::move(p2), std::move(p3)} {
  for (const auto& p : p_) {
    if (p.size() != static_cast<Eigen::Index>(grid_.size())) {
      throw std::invalid_argument("force density: value count does not match grid");
    }
    if (!p.allFinite()) throw std::invalid_argument("force density: non-finite value");
  }
}

ForceDensity ForceDensity::constant(const Grid& grid, double p1, double p2, double p3) {
  return from_catalog(grid, "constant", {{"p1", p1}, {"p2", p2}, {"p3", p3}});
}

ForceDensity ForceDensity::from_catalog(const Grid& grid, const std::string& kind,
                                        const std::map<std::string, double>& params) {
  auto get = [&](const std::string& name, double fallback) {
    auto it = params.find(name);
    return it == params.end() ? fallback : it->second;
  };
  std::vector<std::string> allowed = {"p1", "p2", "p3"};
  std::function<double(double, double)> shape;
  if (kind == "constant") {
    shape = [](double, double) { return 1.0; };
  } else if (kind == "polynomial") {
    const double L1 = grid.L1(), L2 = grid.L2();
    shape = [L1, L2](double y1, double y2) { return 16.0 * y1 * (L1 - y1) * y2 * (L2 - y2) / (L1 * L1 * L2 * L2); };
  } else if (kind == "gaussian_bump") {
    allowed.insert(allowed.end(), {"c1", "c2", "sigma"});
    const double c1 = get("c1", 0.5 * grid.L1());
    const double c2 = get("c2", 0.5 * grid.L2());
    const double sigma = get("sigma", 0.1 * std::min(grid.L1(), grid.L2()));
    if (!(sigma > 0.0)) throw std::invalid_argument("force gaussian_bump: sigma must be positive");
    shape = [c1, c2, sigma](double y1, double y2) {
      const double r2 = (y1 - c1) * (y1 - c1) + (y2 - c2) * (y2 - c2);
      return std::exp(-r2 / (2.0 * sigma * sigma));
    };
  } else {
    throw std::invalid_argument(fmt::format("unknown force kind '{}'", kind));
  }
  for (const auto& [name, value] : params) {
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
      throw std::invalid_argument(fmt::format("force '{}' has no parameter '{}'", kind, name));
    }
  }
  const std::array<double, 3> amp = {get("p1", 0.0), get("p2", 0.0), get("p3", 0.0)};
  std::array<Eigen::VectorXd, 3> p{zeros(grid), zeros(grid), zeros(grid)};
  for (int j = 0; j < grid.n2(); ++j) {
    for (int i = 0; i < grid.n1(); ++i) {
      const double s = shape(grid.y1(i), grid.y2(j));
      const auto k = static_cast<Eigen::Index>(grid.index(i, j));
      for (int c = 0; c < 3; ++c) p[c][k] = amp[c] * s;
    }
  }
  return ForceDensity(grid, p[0], p[1], p[2]);
}

ForceDensity ForceDensity::scaled(double c) const {
  return ForceDensity(grid_, c * p_[0], c * p_[1], c * p_[2]);
}

// ---------------------------------------------------------------------------
// EnergyAssembly

EnergyAssembly::EnergyAssembly(SurfaceGeometryField geometry, Material material, ForceDensity force)
    : geometry_(std::move(geometry)),
      material_(material),
      force_(std::move(force)),
      ops_(geometry_.grid()),
      weights_(quadrature_weights(geometry_.grid())),
      mask_(interior_mask(geometry_.grid())) {
  if (!(force_.grid() == geometry_.grid())) throw std::invalid_argument("energy: force and geometry grids differ");
  const auto n = static_cast<Eigen::Index>(grid().size());
  tensors_.reserve(static_cast<std::size_t>(n));
  area_weights_.resize(n);
  for (int s = 0; s < 2; ++s)
    for (auto& g : gamma_[s]) g.resize(n);
  for (auto& b : curvature_) b.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const SurfacePoint& p = geometry_[static_cast<std::size_t>(k)];
    tensors_.push_back(build_tensor(p.inverse_metric, material_));
    area_weights_[k] = weights_[k] * p.sqrt_a;
    for (int s = 0; s < 2; ++s) {
      gamma_[s][0][k] = p.gamma[s](0, 0);
      gamma_[s][1][k] = p.gamma[s](0, 1);
      gamma_[s][2][k] = p.gamma[s](1, 1);
    }
    curvature_[0][k] = p.curvature(0, 0);
    curvature_[1][k] = p.curvature(0, 1);
    curvature_[2][k] = p.curvature(1, 1);
  }
}

EnergyAssembly::Derivatives EnergyAssembly::derivatives(const DiscreteDisplacement& u) const {
  if (!(u.grid() == grid())) throw std::invalid_argument("energy: displacement lives on another grid");
  Derivatives d;
  const Eigen::VectorXd u1 = u.component(0), u2 = u.component(1), u3 = u.component(2);
  for (int a = 0; a < 2; ++a) {
    d.du1[a] = ops_.first(a, kTangential) * u1;
    d.du2[a] = ops_.first(a, kTangential) * u2;
    d.du3[a] = ops_.first(a, kTransverse) * u3;
  }
  d.ddu3[0] = ops_.second(0, 0, kTransverse) * u3;
  d.ddu3[1] = ops_.second(0, 1, kTransverse) * u3;
  d.ddu3[2] = ops_.second(1, 1, kTransverse) * u3;
  return d;
}

SymmetricField EnergyAssembly::linear_membrane(const DiscreteDisplacement& v, const Derivatives& d) const {
  const auto v1 = v.component(0), v2 = v.component(1), v3 = v.component(2);
  auto christoffel_term = [&](int ab) {
    return (gamma_[0][ab].array() * v1.array() + gamma_[1][ab].array() * v2.array()).matrix();
  };
  SymmetricField e;
  e.c11 = d.du1[0] - christoffel_term(0) - curvature_[0].cwiseProduct(v3);
  e.c12 = 0.5 * (d.du1[1] + d.du2[0]) - christoffel_term(1) - curvature_[1].cwiseProduct(v3);
  e.c22 = d.du2[1] - christoffel_term(2) - curvature_[2].cwiseProduct(v3);
  return e;
}

SymmetricField EnergyAssembly::membrane_from(const DiscreteDisplacement& u, const Derivatives& d) const {
  SymmetricField e = linear_membrane(u, d);
  e.c11 += 0.5 * d.du3[0].cwiseAbs2();
  e.c12 += 0.5 * d.du3[0].cwiseProduct(d.du3[1]);
  e.c22 += 0.5 * d.du3[1].cwiseAbs2();
  return e;
}

SymmetricField EnergyAssembly::bending_from(const Derivatives& d) const {
  SymmetricField f;
  auto corr = [&](int ab) {
    return (gamma_[0][ab].array() * d.du3[0].array() + gamma_[1][ab].array() * d.du3[1].array()).matrix();
  };
  f.c11 = d.ddu3[0] - corr(0);
  f.c12 = d.ddu3[1] - corr(1);
  f.c22 = d.ddu3[2] - corr(2);
  return f;
}

SymmetricField EnergyAssembly::membrane_strain(const DiscreteDisplacement& u) const {
  return membrane_from(u, derivatives(u));
}

SymmetricField EnergyAssembly::bending_strain(const DiscreteField& u3) const {
  DiscreteDisplacement u(grid());
  u.component(2) = u3.values();
  return bending_from(derivatives(u));
}

StrainFields EnergyAssembly::strains(const DiscreteDisplacement& u) const {
  const Derivatives d = derivatives(u);
  return {membrane_from(u, d), bending_from(d)};
}

SymmetricField EnergyAssembly::strain_first_variation(const DiscreteDisplacement& u,
                                                      const DiscreteDisplacement& v) const {
  const Derivatives du = derivatives(u);
  const Derivatives dv = derivatives(v);
  SymmetricField e = linear_membrane(v, dv);
  e.c11 += du.du3[0].cwiseProduct(dv.du3[0]);
  e.c12 += 0.5 * (du.du3[0].cwiseProduct(dv.du3[1]) + dv.du3[0].cwiseProduct(du.du3[1]));
  e.c22 += du.du3[1].cwiseProduct(dv.du3[1]);
  return e;
}

double EnergyAssembly::load_work(const DiscreteDisplacement& u) const {
  double acc = 0.0;
  for (int c = 0; c < 3; ++c) acc += area_weights_.dot(force_.component(c).cwiseProduct(u.component(c)));
  return acc;
}

double EnergyAssembly::energy(const DiscreteDisplacement& u) const {
  const Derivatives d = derivatives(u);
  const SymmetricField E = membrane_from(u, d);
  const SymmetricField F = bending_from(d);
  const double eps = material_.eps();
  const double bend = eps * eps * eps / 3.0;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < area_weights_.size(); ++k) {
    const ElasticityTensor& A = tensors_[static_cast<std::size_t>(k)];
    const Mat2 Ek = E.at(k), Fk = F.at(k);
    acc += 0.5 * area_weights_[k] * (bend * contract(A, Fk, Fk) + eps * contract(A, Ek, Ek));
  }
  return acc - load_work(u);
}

double EnergyAssembly::energy_and_gradient(const DiscreteDisplacement& u, DiscreteDisplacement& grad) const {
  const Derivatives d = derivatives(u);
  const SymmetricField E = membrane_from(u, d);
  const SymmetricField F = bending_from(d);
  const double eps = material_.eps();
  const double bend = eps * eps * eps / 3.0;
  const auto n = area_weights_.size();

  // Weighted membrane stresses T and bending moments M (both symmetric).
  SymmetricField T{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  SymmetricField M{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  double acc = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const ElasticityTensor& A = tensors_[static_cast<std::size_t>(k)];
    const Mat2 Ek = E.at(k), Fk = F.at(k);
    const Mat2 S = A.apply(Ek);
    const Mat2 Mo = A.apply(Fk);
    const double w = area_weights_[k];
    acc += 0.5 * w * (bend * dot(Mo, Fk) + eps * dot(S, Ek));
    T.c11[k] = w * eps * S(0, 0);
    T.c12[k] = w * eps * S(0, 1);
    T.c22[k] = w * eps * S(1, 1);
    M.c11[k] = w * bend * Mo(0, 0);
    M.c12[k] = w * bend * Mo(0, 1);
    M.c22[k] = w * bend * Mo(1, 1);
  }
  const double energy = acc - load_work(u);

  auto contract_sym = [](const SymmetricField& X, const std::array<Eigen::VectorXd, 3>& c) {
    return (X.c11.array() * c[0].array() + 2.0 * X.c12.array() * c[1].array() + X.c22.array() * c[2].array())
        .matrix();
  };
  const SparseMatrix& D1 = ops_.first(0, kTangential);
  const SparseMatrix& D2 = ops_.first(1, kTangential);
  const SparseMatrix& G1 = ops_.first(0, kTransverse);
  const SparseMatrix& G2 = ops_.first(1, kTransverse);

  grad = DiscreteDisplacement(grid());
  grad.component(0) = D1.transpose() * T.c11 + D2.transpose() * T.c12 - contract_sym(T, gamma_[0]) -
                      area_weights_.cwiseProduct(force_.component(0));
  grad.component(1) = D1.transpose() * T.c12 + D2.transpose() * T.c22 - contract_sym(T, gamma_[1]) -
                      area_weights_.cwiseProduct(force_.component(1));

  // sum_a T^{ab} d_a u3
  const Eigen::VectorXd q1 = T.c11.cwiseProduct(d.du3[0]) + T.c12.cwiseProduct(d.du3[1]);
  const Eigen::VectorXd q2 = T.c12.cwiseProduct(d.du3[0]) + T.c22.cwiseProduct(d.du3[1]);
  Eigen::VectorXd g3 = -contract_sym(T, curvature_) + G1.transpose() * q1 + G2.transpose() * q2;
  g3 += ops_.second(0, 0, kTransverse).transpose() * M.c11;
  g3 += 2.0 * (ops_.second(0, 1, kTransverse).transpose() * M.c12);
  g3 += ops_.second(1, 1, kTransverse).transpose() * M.c22;
  g3 -= G1.transpose() * contract_sym(M, gamma_[0]);
  g3 -= G2.transpose() * contract_sym(M, gamma_[1]);
  g3 -= area_weights_.cwiseProduct(force_.component(2));
  grad.component(2) = g3;

  for (int c = 0; c < 3; ++c) grad.component(c) = grad.component(c).cwiseProduct(mask_);
  return energy;
}

DiscreteDisplacement EnergyAssembly::gradient(const DiscreteDisplacement& u) const {
  DiscreteDisplacement g(grid());
  energy_and_gradient(u, g);
  return g;
}

double EnergyAssembly::energy_change(const DiscreteDisplacement& u, const DiscreteDisplacement& du) const {
  const Derivatives d = derivatives(u);
  const Derivatives dd = derivatives(du);
  const SymmetricField E = membrane_from(u, d);
  const SymmetricField F = bending_from(d);
  SymmetricField dE = linear_membrane(du, dd);
  dE.c11 += d.du3[0].cwiseProduct(dd.du3[0]) + 0.5 * dd.du3[0].cwiseAbs2();
  dE.c12 += 0.5 * (d.du3[0].cwiseProduct(dd.du3[1]) + dd.du3[0].cwiseProduct(d.du3[1])) +
            0.5 * dd.du3[0].cwiseProduct(dd.du3[1]);
  dE.c22 += d.du3[1].cwiseProduct(dd.du3[1]) + 0.5 * dd.du3[1].cwiseAbs2();
  const SymmetricField dF = bending_from(dd);

  const double eps = material_.eps();
  const double bend = eps * eps * eps / 3.0;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < area_weights_.size(); ++k) {
    const ElasticityTensor& A = tensors_[static_cast<std::size_t>(k)];
    const Mat2 dEk = dE.at(k), dFk = dF.at(k);
    acc += 0.5 * area_weights_[k] *
           (bend * contract(A, dFk, 2.0 * F.at(k) + dFk) + eps * contract(A, dEk, 2.0 * E.at(k) + dEk));
  }
  return acc - load_work(du);
}

double EnergyAssembly::residual_norm_of(const DiscreteDisplacement& grad) const {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < weights_.size(); ++k) {
    if (mask_[k] == 0.0) continue;
    double g2 = 0.0;
    for (int c = 0; c < 3; ++c) g2 += grad.component(c)[k] * grad.component(c)[k];
    acc += g2 / weights_[k];
  }
  return std::sqrt(acc);
}

double EnergyAssembly::residual_norm(const DiscreteDisplacement& u) const { return residual_norm_of(gradient(u)); }

double EnergyAssembly::load_norm() const {
  double acc = 0.0;
  for (int c = 0; c < 3; ++c) acc += weights_.dot(force_.component(c).cwiseAbs2());
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// Flat plate path

SymmetricField linearized_strain(const DiscreteDisplacement& v) {
  const DifferenceOperators ops(v.grid());
  const Eigen::VectorXd v1 = v.component(0), v2 = v.component(1);
  SymmetricField e;
  e.c11 = ops.first(0, kTangential) * v1;
  e.c12 = 0.5 * (ops.first(1, kTangential) * v1 + ops.first(0, kTangential) * v2);
  e.c22 = ops.first(1, kTangential) * v2;
  return e;
}

namespace plate {

namespace {

struct PlateFields {
  SymmetricField E;
  SymmetricField F;
  std::array<Eigen::VectorXd, 2> du3;
};

PlateFields plate_fields(const DifferenceOperators& ops, const DiscreteDisplacement& u) {
  const Eigen::VectorXd u1 = u.component(0), u2 = u.component(1), u3 = u.component(2);
  PlateFields f;
  f.du3[0] = ops.first(0, kTransverse) * u3;
  f.du3[1] = ops.first(1, kTransverse) * u3;
  f.E.c11 = ops.first(0, kTangential) * u1 + 0.5 * f.du3[0].cwiseAbs2();
  f.E.c12 = 0.5 * (ops.first(1, kTangential) * u1 + ops.first(0, kTangential) * u2) +
            0.5 * f.du3[0].cwiseProduct(f.du3[1]);
  f.E.c22 = ops.first(1, kTangential) * u2 + 0.5 * f.du3[1].cwiseAbs2();
  f.F.c11 = ops.second(0, 0, kTransverse) * u3;
  f.F.c12 = ops.second(0, 1, kTransverse) * u3;
  f.F.c22 = ops.second(1, 1, kTransverse) * u3;
  return f;
}

}  // namespace

SymmetricField membrane_strain(const DiscreteDisplacement& u) {
  return plate_fields(DifferenceOperators(u.grid()), u).E;
}

SymmetricField bending_strain(const DiscreteDisplacement& u) {
  return plate_fields(DifferenceOperators(u.grid()), u).F;
}

double energy(const Material& mat, const ForceDensity& force, const DiscreteDisplacement& u) {
  const DifferenceOperators ops(u.grid());
  const PlateFields f = plate_fields(ops, u);
  const ElasticityTensor A = plate_tensor(mat);
  const Eigen::VectorXd w = quadrature_weights(u.grid());
  const double eps = mat.eps();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    const Mat2 Ek = f.E.at(k), Fk = f.F.at(k);
    acc += 0.5 * w[k] * (eps * eps * eps / 3.0 * contract(A, Fk, Fk) + eps * contract(A, Ek, Ek));
  }
  for (int c = 0; c < 3; ++c) acc -= w.dot(force.component(c).cwiseProduct(u.component(c)));
  return acc;
}

DiscreteDisplacement gradient(const Material& mat, const ForceDensity& force, const DiscreteDisplacement& u) {
  const Grid& g = u.grid();
  const DifferenceOperators ops(g);
  const PlateFields f = plate_fields(ops, u);
  const ElasticityTensor A = plate_tensor(mat);
  const Eigen::VectorXd w = quadrature_weights(g);
  const double eps = mat.eps();
  const auto n = w.size();

  Eigen::VectorXd T11(n), T12(n), T22(n), M11(n), M12(n), M22(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Mat2 S = A.apply(f.E.at(k));
    const Mat2 Mo = A.apply(f.F.at(k));
    T11[k] = w[k] * eps * S(0, 0);
    T12[k] = w[k] * eps * S(0, 1);
    T22[k] = w[k] * eps * S(1, 1);
    M11[k] = w[k] * eps * eps * eps / 3.0 * Mo(0, 0);
    M12[k] = w[k] * eps * eps * eps / 3.0 * Mo(0, 1);
    M22[k] = w[k] * eps * eps * eps / 3.0 * Mo(1, 1);
  }
  DiscreteDisplacement grad(g);
  const SparseMatrix& D1 = ops.first(0, kTangential);
  const SparseMatrix& D2 = ops.first(1, kTangential);
  grad.component(0) = D1.transpose() * T11 + D2.transpose() * T12 - w.cwiseProduct(force.component(0));
  grad.component(1) = D1.transpose() * T12 + D2.transpose() * T22 - w.cwiseProduct(force.component(1));
  const Eigen::VectorXd q1 = T11.cwiseProduct(f.du3[0]) + T12.cwiseProduct(f.du3[1]);
  const Eigen::VectorXd q2 = T12.cwiseProduct(f.du3[0]) + T22.cwiseProduct(f.du3[1]);
  grad.component(2) = ops.first(0, kTransverse).transpose() * q1 + ops.first(1, kTransverse).transpose() * q2 +
                      ops.second(0, 0, kTransverse).transpose() * M11 +
                      2.0 * (ops.second(0, 1, kTransverse).transpose() * M12) +
                      ops.second(1, 1, kTransverse).transpose() * M22 - w.cwiseProduct(force.component(2));
  grad.clamp();
  return grad;
}

}  // namespace plate

}  // namespace flatshell
