#include "flatshell/minimizer.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

#include <Eigen/SparseCholesky>
#include <fmt/format.h>

namespace flatshell {

namespace {

using ColMatrix = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

constexpr double kMinStep = 1e-16;

void append(Triplets& out, const SparseMatrix& m, Eigen::Index row0, Eigen::Index col0, double scale = 1.0) {
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      out.emplace_back(static_cast<int>(row0 + it.row()), static_cast<int>(col0 + it.col()), scale * it.value());
    }
  }
}

void append_diagonal(Triplets& out, const Eigen::VectorXd& d, Eigen::Index row0, Eigen::Index col0,
                     double scale = 1.0) {
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    if (d[k] != 0.0) out.emplace_back(static_cast<int>(row0 + k), static_cast<int>(col0 + k), scale * d[k]);
  }
}

/// Selection of the interior degrees of freedom of a packed displacement.
ColMatrix interior_selection(const Grid& grid, int components) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Triplets t;
  int col = 0;
  for (int c = 0; c < components; ++c) {
    for (int j = 0; j < grid.n2(); ++j) {
      for (int i = 0; i < grid.n1(); ++i) {
        if (grid.on_boundary(i, j)) continue;
        t.emplace_back(static_cast<int>(c * n + static_cast<Eigen::Index>(grid.index(i, j))), col++, 1.0);
      }
    }
  }
  ColMatrix S(components * n, col);
  S.setFromTriplets(t.begin(), t.end());
  return S;
}

/// Exact Hessian of the energy at u = 0, restricted to interior unknowns.
class StiffnessPreconditioner {
 public:
  explicit StiffnessPreconditioner(const EnergyAssembly& e) : selection_(interior_selection(e.grid(), 3)) {
    const Grid& grid = e.grid();
    const DifferenceOperators& ops = e.operators();
    const auto n = static_cast<Eigen::Index>(grid.size());
    const BoundaryKind tan = BoundaryKind::h1_0;
    const BoundaryKind tra = BoundaryKind::h2_0;

    std::array<std::array<Eigen::VectorXd, 3>, 2> gamma;
    std::array<Eigen::VectorXd, 3> curv;
    for (auto& g : gamma)
      for (auto& v : g) v.resize(n);
    for (auto& v : curv) v.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const SurfacePoint& p = e.geometry()[static_cast<std::size_t>(k)];
      for (int s = 0; s < 2; ++s) {
        gamma[s][0][k] = p.gamma[s](0, 0);
        gamma[s][1][k] = p.gamma[s](0, 1);
        gamma[s][2][k] = p.gamma[s](1, 1);
      }
      curv[0][k] = p.curvature(0, 0);
      curv[1][k] = p.curvature(0, 1);
      curv[2][k] = p.curvature(1, 1);
    }

    // Rows [E11 | E22 | E12] of the linear membrane strain, and [F11 | F22 | F12].
    Triplets lm, lb;
    const std::array<int, 3> ab_of_row = {0, 2, 1};
    for (int r = 0; r < 3; ++r) {
      const int ab = ab_of_row[r];
      const Eigen::Index row0 = r * n;
      if (ab == 0) append(lm, ops.first(0, tan), row0, 0);
      if (ab == 2) append(lm, ops.first(1, tan), row0, n);
      if (ab == 1) {
        append(lm, ops.first(1, tan), row0, 0, 0.5);
        append(lm, ops.first(0, tan), row0, n, 0.5);
      }
      append_diagonal(lm, gamma[0][ab], row0, 0, -1.0);
      append_diagonal(lm, gamma[1][ab], row0, n, -1.0);
      append_diagonal(lm, curv[ab], row0, 2 * n, -1.0);

      const int a = ab == 2 ? 1 : 0;
      const int b = ab == 0 ? 0 : 1;
      append(lb, ops.second(a, b, tra), row0, 2 * n);
      for (int s = 0; s < 2; ++s) {
        const SparseMatrix scaled = (gamma[s][ab].asDiagonal() * ops.first(s, tra)).eval();
        append(lb, scaled, row0, 2 * n, -1.0);
      }
    }
    ColMatrix Lm(3 * n, 3 * n), Lb(3 * n, 3 * n);
    Lm.setFromTriplets(lm.begin(), lm.end());
    Lb.setFromTriplets(lb.begin(), lb.end());

    // Per-node 3x3 blocks of the quadratic form in (E11, E22, E12).
    const double eps = e.material().eps();
    Triplets dm, db;
    for (Eigen::Index k = 0; k < n; ++k) {
      const ElasticityTensor& A = e.tensors()[static_cast<std::size_t>(k)];
      Eigen::Matrix3d V;
      V << A(0, 0, 0, 0), A(0, 0, 1, 1), 2.0 * A(0, 0, 0, 1),  //
          A(1, 1, 0, 0), A(1, 1, 1, 1), 2.0 * A(1, 1, 0, 1),   //
          2.0 * A(0, 1, 0, 0), 2.0 * A(0, 1, 1, 1), 4.0 * A(0, 1, 0, 1);
      const double w = e.area_weights()[k];
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
          dm.emplace_back(static_cast<int>(r * n + k), static_cast<int>(c * n + k), w * eps * V(r, c));
          db.emplace_back(static_cast<int>(r * n + k), static_cast<int>(c * n + k),
                          w * eps * eps * eps / 3.0 * V(r, c));
        }
      }
    }
    ColMatrix Dm(3 * n, 3 * n), Db(3 * n, 3 * n);
    Dm.setFromTriplets(dm.begin(), dm.end());
    Db.setFromTriplets(db.begin(), db.end());

    const ColMatrix H = ColMatrix(Lm.transpose() * Dm * Lm) + ColMatrix(Lb.transpose() * Db * Lb);
    const ColMatrix P = selection_.transpose() * H * selection_;
    solver_.compute(P);
    ok_ = solver_.info() == Eigen::Success && (solver_.vectorD().array() > 0.0).all();
  }

  bool ok() const { return ok_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& g) const {
    const Eigen::VectorXd r = selection_.transpose() * g;
    return selection_ * solver_.solve(r);
  }

 private:
  ColMatrix selection_;
  Eigen::SimplicialLDLT<ColMatrix> solver_;
  bool ok_ = false;
};

struct Pair {
  Eigen::VectorXd s, y;
  double rho;
};

SolveResult run_single(const EnergyAssembly& e, DiscreteDisplacement u, const SolverConfig& cfg,
                       const StiffnessPreconditioner* pre) {
  const auto start = std::chrono::steady_clock::now();
  const double target = residual_target(e, cfg);
  SolveDiagnostics diag;
  u.clamp();

  DiscreteDisplacement g(e.grid());
  e.energy_and_gradient(u, g);
  std::deque<Pair> history;

  auto apply_h0 = [&](const Eigen::VectorXd& q) -> Eigen::VectorXd {
    if (pre != nullptr) return pre->apply(q);
    if (!history.empty()) {
      const Pair& last = history.back();
      return (last.s.dot(last.y) / last.y.squaredNorm()) * q;
    }
    const double gmax = q.lpNorm<Eigen::Infinity>();
    return gmax > 0.0 ? Eigen::VectorXd(q / gmax) : q;
  };

  auto finish = [&](bool converged) {
    diag.converged = converged;
    diag.final_energy = e.energy(u);
    diag.final_residual = e.residual_norm_of(g);
    diag.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return SolveResult{u, diag};
  };

  for (diag.iterations = 0;; ++diag.iterations) {
    if (e.residual_norm_of(g) <= target) return finish(true);
    if (diag.iterations >= cfg.max_iter) return finish(false);

    // Two-loop recursion.
    Eigen::VectorXd q = g.packed();
    std::vector<double> alpha(history.size());
    for (std::size_t m = history.size(); m-- > 0;) {
      alpha[m] = history[m].rho * history[m].s.dot(q);
      q -= alpha[m] * history[m].y;
    }
    Eigen::VectorXd d = apply_h0(q);
    for (std::size_t m = 0; m < history.size(); ++m) {
      const double beta = history[m].rho * history[m].y.dot(d);
      d += (alpha[m] - beta) * history[m].s;
    }
    d = -d;

    double slope = g.packed().dot(d);
    if (!(slope < 0.0)) {
      history.clear();
      d = -apply_h0(g.packed());
      slope = g.packed().dot(d);
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      double step = 1.0;
      while (step >= kMinStep) {
        DiscreteDisplacement du(e.grid(), step * d);
        if (e.energy_change(u, du) <= cfg.ls_c1 * step * slope) {
          DiscreteDisplacement g_new(e.grid());
          u += du;
          e.energy_and_gradient(u, g_new);
          const Eigen::VectorXd y = g_new.packed() - g.packed();
          const double sy = du.packed().dot(y);
          if (sy > 1e-14 * du.packed().norm() * y.norm()) {
            history.push_back({du.packed(), y, 1.0 / sy});
            if (static_cast<int>(history.size()) > cfg.memory) history.pop_front();
          }
          g = std::move(g_new);
          accepted = true;
          break;
        }
        step *= cfg.ls_shrink;
      }
      if (!accepted) {
        ++diag.line_search_failures;
        if (history.empty()) break;
        history.clear();
        d = -apply_h0(g.packed());
        slope = g.packed().dot(d);
      }
    }
    if (!accepted) {
      SolveResult stalled = finish(false);
      throw SolverStall(fmt::format("line search stalled after {} iterations (residual {:.3e}, target {:.3e})",
                                    diag.iterations, stalled.diag.final_residual, target),
                        stalled.diag);
    }
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (!(grad_tol > 0.0)) throw std::invalid_argument("solver: grad_tol must be positive");
  if (max_iter < 0) throw std::invalid_argument("solver: max_iter must be non-negative");
  if (memory < 1) throw std::invalid_argument("solver: memory must be >= 1");
  if (!(ls_shrink > 0.0 && ls_shrink < 1.0)) throw std::invalid_argument("solver: ls_shrink must lie in (0, 1)");
  if (!(ls_c1 > 0.0 && ls_c1 < 0.5)) throw std::invalid_argument("solver: ls_c1 must lie in (0, 0.5)");
  if (restarts < 1) throw std::invalid_argument("solver: restarts must be >= 1");
  if (!(restart_amplitude >= 0.0)) throw std::invalid_argument("solver: restart_amplitude must be >= 0");
}

double residual_target(const EnergyAssembly& asm_, const SolverConfig& cfg) {
  return cfg.grad_tol * (1.0 + asm_.load_norm());
}

SolveResult minimize(const EnergyAssembly& asm_, const DiscreteDisplacement& u0, const SolverConfig& cfg) {
  cfg.validate();
  if (!(u0.grid() == asm_.grid())) throw std::invalid_argument("minimize: start lives on another grid");

  std::optional<StiffnessPreconditioner> pre;
  if (cfg.precondition) {
    pre.emplace(asm_);
    if (!pre->ok()) pre.reset();
  }
  const StiffnessPreconditioner* p = pre ? &*pre : nullptr;

  std::optional<SolveResult> best;
  for (int r = 0; r < cfg.restarts; ++r) {
    DiscreteDisplacement start = u0;
    if (r > 0) {
      std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(r));
      std::normal_distribution<double> normal(0.0, cfg.restart_amplitude);
      for (Eigen::Index k = 0; k < start.packed().size(); ++k) start.packed()[k] += normal(rng);
      start.clamp();
    }
    SolveResult res = run_single(asm_, std::move(start), cfg, p);
    res.diag.restart_index = r;
    const bool better = !best || (res.diag.converged && !best->diag.converged) ||
                        (res.diag.converged == best->diag.converged &&
                         res.diag.final_energy < best->diag.final_energy);
    if (better) best = std::move(res);
  }
  return std::move(*best);
}

std::vector<HomotopyStep> homotopy_solve(const Immersion& family, const std::vector<double>& ts,
                                         const Grid& grid, const Material& mat, const ForceDensity& force,
                                         const SolverConfig& cfg) {
  if (ts.empty() || ts.back() != 0.0) throw std::invalid_argument("homotopy: parameter list must end at 0");
  for (std::size_t k = 1; k < ts.size(); ++k) {
    if (!(ts[k] < ts[k - 1])) throw std::invalid_argument("homotopy: parameters must be strictly decreasing");
  }
  const Immersion flat = Immersion::plate(family.L1(), family.L2());

  auto solve_at = [&](double t, const DiscreteDisplacement& start) {
    const Immersion imm = family.with_scale(t);
    try {
      const EnergyAssembly e(geometry_field(imm, grid), mat, force);
      SolveResult res = minimize(e, start, cfg);
      return HomotopyStep{t, c2_distance(imm, flat, grid), std::move(res.u), res.diag};
    } catch (const std::exception& ex) {
      throw HomotopyError(fmt::format("t = {}: {}", t, ex.what()), t);
    }
  };

  HomotopyStep plate_step = solve_at(0.0, DiscreteDisplacement(grid));
  std::vector<HomotopyStep> steps;
  steps.reserve(ts.size());
  const DiscreteDisplacement* previous = &plate_step.u;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    steps.push_back(solve_at(ts[k], *previous));
    previous = &steps.back().u;
  }
  steps.push_back(std::move(plate_step));
  return steps;
}

double boundedness_certificate(const std::vector<HomotopyStep>& steps) {
  double worst = 0.0;
  for (const HomotopyStep& s : steps) worst = std::max(worst, v_norm(s.u));
  return worst;
}

// ---------------------------------------------------------------------------
// Rigidity probe

namespace {

struct PlateMembrane {
  SymmetricField E;
  std::array<Eigen::VectorXd, 2> du3;
};

PlateMembrane plate_membrane(const DifferenceOperators& ops, const DiscreteDisplacement& u) {
  const Eigen::VectorXd u1 = u.component(0), u2 = u.component(1), u3 = u.component(2);
  const BoundaryKind tan = BoundaryKind::h1_0;
  PlateMembrane m;
  m.du3[0] = ops.first(0, BoundaryKind::h2_0) * u3;
  m.du3[1] = ops.first(1, BoundaryKind::h2_0) * u3;
  m.E.c11 = ops.first(0, tan) * u1 + 0.5 * m.du3[0].cwiseAbs2();
  m.E.c12 = 0.5 * (ops.first(1, tan) * u1 + ops.first(0, tan) * u2) + 0.5 * m.du3[0].cwiseProduct(m.du3[1]);
  m.E.c22 = ops.first(1, tan) * u2 + 0.5 * m.du3[1].cwiseAbs2();
  return m;
}

/// Gram matrices of the H1 (tangential) and H2 (transverse) inner products on interior nodes.
class SobolevMetric {
 public:
  explicit SobolevMetric(const DifferenceOperators& ops) : selection_(interior_selection(ops.grid(), 1)) {
    const Grid& g = ops.grid();
    const Eigen::VectorXd w = quadrature_weights(g);
    const auto W = w.asDiagonal();
    auto gram = [&](const SparseMatrix& D) { return ColMatrix(ColMatrix(D.transpose()) * W * ColMatrix(D)); };
    ColMatrix M(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
    M.setIdentity();
    M = ColMatrix(W * M);
    const BoundaryKind tan = BoundaryKind::h1_0, tra = BoundaryKind::h2_0;
    const ColMatrix Ht = M + gram(ops.first(0, tan)) + gram(ops.first(1, tan));
    const ColMatrix H3 = M + gram(ops.first(0, tra)) + gram(ops.first(1, tra)) + gram(ops.second(0, 0, tra)) +
                         2.0 * gram(ops.second(0, 1, tra)) + gram(ops.second(1, 1, tra));
    tangential_.compute(selection_.transpose() * Ht * selection_);
    transverse_.compute(selection_.transpose() * H3 * selection_);
  }

  /// Riesz representative of the (Euclidean) gradient in the Sobolev metric.
  DiscreteDisplacement apply(const DiscreteDisplacement& g) const {
    DiscreteDisplacement out(g.grid());
    for (int c = 0; c < 3; ++c) {
      const Eigen::VectorXd r = selection_.transpose() * g.component(c);
      const Eigen::VectorXd z = c == 2 ? transverse_.solve(r) : tangential_.solve(r);
      out.component(c) = selection_ * z;
    }
    return out;
  }

 private:
  ColMatrix selection_;
  Eigen::SimplicialLDLT<ColMatrix> tangential_;
  Eigen::SimplicialLDLT<ColMatrix> transverse_;
};

DiscreteDisplacement normalized(DiscreteDisplacement u, const DifferenceOperators& ops) {
  const double n = v_norm(u, ops);
  if (!(n > 0.0)) throw std::runtime_error("rigidity: cannot normalise the zero displacement");
  u *= 1.0 / n;
  return u;
}

struct Descent {
  double value;
  int iterations;
  bool converged;
  DiscreteDisplacement u;
};

Descent descend(const DifferenceOperators& ops, const SobolevMetric& metric, DiscreteDisplacement u,
                const RigidityConfig& cfg) {
  u = normalized(std::move(u), ops);
  DiscreteDisplacement g(ops.grid());
  double value = rigidity_functional(ops, u, g);
  double step = 1.0;
  int quiet = 0;
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    DiscreteDisplacement d = metric.apply(g);
    d *= -1.0;
    bool accepted = false;
    while (step >= 1e-14) {
      DiscreteDisplacement trial = normalized(u + step * d, ops);
      DiscreteDisplacement g_trial(ops.grid());
      const double v = rigidity_functional(ops, trial, g_trial);
      if (v < value) {
        const double rel = (value - v) / value;
        quiet = rel < cfg.rel_tol ? quiet + 1 : 0;
        u = std::move(trial);
        g = std::move(g_trial);
        value = v;
        step = std::min(2.0 * step, 1e6);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return {value, it, true, std::move(u)};  // no descent direction left at any step size
    if (quiet >= 5) return {value, it + 1, true, std::move(u)};
  }
  return {value, it, false, std::move(u)};
}

}  // namespace

double rigidity_functional(const DifferenceOperators& ops, const DiscreteDisplacement& u) {
  const PlateMembrane m = plate_membrane(ops, u);
  const Eigen::VectorXd w = quadrature_weights(ops.grid());
  return w.dot(m.E.c11.cwiseAbs2() + 2.0 * m.E.c12.cwiseAbs2() + m.E.c22.cwiseAbs2());
}

double rigidity_functional(const DifferenceOperators& ops, const DiscreteDisplacement& u,
                           DiscreteDisplacement& grad) {
  const PlateMembrane m = plate_membrane(ops, u);
  const Eigen::VectorXd w = quadrature_weights(ops.grid());
  const Eigen::VectorXd T11 = 2.0 * w.cwiseProduct(m.E.c11);
  const Eigen::VectorXd T12 = 2.0 * w.cwiseProduct(m.E.c12);
  const Eigen::VectorXd T22 = 2.0 * w.cwiseProduct(m.E.c22);
  const BoundaryKind tan = BoundaryKind::h1_0, tra = BoundaryKind::h2_0;
  grad = DiscreteDisplacement(ops.grid());
  grad.component(0) = ops.first(0, tan).transpose() * T11 + ops.first(1, tan).transpose() * T12;
  grad.component(1) = ops.first(0, tan).transpose() * T12 + ops.first(1, tan).transpose() * T22;
  const Eigen::VectorXd q1 = T11.cwiseProduct(m.du3[0]) + T12.cwiseProduct(m.du3[1]);
  const Eigen::VectorXd q2 = T12.cwiseProduct(m.du3[0]) + T22.cwiseProduct(m.du3[1]);
  grad.component(2) = ops.first(0, tra).transpose() * q1 + ops.first(1, tra).transpose() * q2;
  grad.clamp();
  return w.dot(m.E.c11.cwiseAbs2() + 2.0 * m.E.c12.cwiseAbs2() + m.E.c22.cwiseAbs2());
}

RigidityResult rigidity_gap(const Grid& grid, const RigidityConfig& cfg,
                            const std::optional<DiscreteDisplacement>& start) {
  if (cfg.starts < 0 || (cfg.starts == 0 && !start)) throw std::invalid_argument("rigidity: no starting points");
  const DifferenceOperators ops(grid);
  const SobolevMetric metric(ops);

  std::vector<DiscreteDisplacement> starts;
  if (start) starts.push_back(*start);
  for (int s = 0; s < cfg.starts; ++s) {
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(s));
    std::normal_distribution<double> normal(0.0, 1.0);
    DiscreteDisplacement u(grid);
    for (Eigen::Index k = 0; k < u.packed().size(); ++k) u.packed()[k] = normal(rng);
    u.clamp();
    starts.push_back(std::move(u));
  }

  RigidityResult result{std::numeric_limits<double>::infinity(), {}, {}, true, DiscreteDisplacement(grid)};
  for (DiscreteDisplacement& u : starts) {
    Descent d = descend(ops, metric, std::move(u), cfg);
    result.values.push_back(d.value);
    result.iterations.push_back(d.iterations);
    result.converged = result.converged && d.converged;
    if (d.value < result.gap) {
      result.gap = d.value;
      result.best = std::move(d.u);
    }
  }
  return result;
}

}  // namespace flatshell
