#include "flatshell/discrete_space.hpp"

#include <cmath>
#include <vector>

namespace flatshell {

namespace {

struct Tap {
  int index;
  double weight;
};
using Stencil = std::vector<Tap>;

int reflect(int i, int n) {
  if (i < 0) return -i;
  if (i > n - 1) return 2 * (n - 1) - i;
  return i;
}

Stencil identity_1d(int i) { return {{i, 1.0}}; }

Stencil first_1d(int i, int n, double h, bool ghost) {
  const double c = 0.5 / h;
  if (ghost) return {{reflect(i + 1, n), c}, {reflect(i - 1, n), -c}};
  if (i == 0) return {{0, -3.0 * c}, {1, 4.0 * c}, {2, -c}};
  if (i == n - 1) return {{n - 1, 3.0 * c}, {n - 2, -4.0 * c}, {n - 3, c}};
  return {{i + 1, c}, {i - 1, -c}};
}

Stencil second_1d(int i, int n, double h, bool ghost) {
  const double c = 1.0 / (h * h);
  if (ghost) return {{reflect(i + 1, n), c}, {i, -2.0 * c}, {reflect(i - 1, n), c}};
  if (i == 0) return {{0, 2.0 * c}, {1, -5.0 * c}, {2, 4.0 * c}, {3, -c}};
  if (i == n - 1) return {{n - 1, 2.0 * c}, {n - 2, -5.0 * c}, {n - 3, 4.0 * c}, {n - 4, -c}};
  return {{i + 1, c}, {i, -2.0 * c}, {i - 1, c}};
}

enum class Part { identity, first, second };

SparseMatrix tensor_operator(const Grid& g, Part along1, Part along2, bool ghost) {
  auto stencil = [ghost](Part part, int i, int n, double h) {
    switch (part) {
      case Part::first:
        return first_1d(i, n, h, ghost);
      case Part::second:
        return second_1d(i, n, h, ghost);
      case Part::identity:
        break;
    }
    return identity_1d(i);
  };
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(g.size() * 9);
  for (int j = 0; j < g.n2(); ++j) {
    const Stencil s2 = stencil(along2, j, g.n2(), g.h2());
    for (int i = 0; i < g.n1(); ++i) {
      const Stencil s1 = stencil(along1, i, g.n1(), g.h1());
      const auto row = static_cast<int>(g.index(i, j));
      for (const Tap& b : s2) {
        for (const Tap& a : s1) {
          triplets.emplace_back(row, static_cast<int>(g.index(a.index, b.index)), a.weight * b.weight);
        }
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(g.size());
  SparseMatrix op(n, n);
  op.setFromTriplets(triplets.begin(), triplets.end());
  op.prune(0.0);
  return op;
}

}  // namespace

DiscreteField::DiscreteField(const Grid& grid, BoundaryKind kind)
    : grid_(grid), kind_(kind), values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()))) {}

DiscreteField::DiscreteField(const Grid& grid, Eigen::VectorXd values, BoundaryKind kind)
    : grid_(grid), kind_(kind), values_(std::move(values)) {
  if (values_.size() != static_cast<Eigen::Index>(grid_.size())) {
    throw std::invalid_argument("discrete field: value count does not match grid");
  }
}

DiscreteField DiscreteField::sample(const Grid& grid, const std::function<double(double, double)>& f,
                                    BoundaryKind kind) {
  DiscreteField out(grid, kind);
  for (int j = 0; j < grid.n2(); ++j) {
    for (int i = 0; i < grid.n1(); ++i) {
      const bool pinned = kind != BoundaryKind::free && grid.on_boundary(i, j);
      out(i, j) = pinned ? 0.0 : f(grid.y1(i), grid.y2(j));
    }
  }
  return out;
}

DiscreteDisplacement::DiscreteDisplacement(const Grid& grid)
    : grid_(grid), data_(Eigen::VectorXd::Zero(3 * static_cast<Eigen::Index>(grid.size()))) {}

DiscreteDisplacement::DiscreteDisplacement(const Grid& grid, Eigen::VectorXd packed)
    : grid_(grid), data_(std::move(packed)) {
  if (data_.size() != 3 * n()) throw std::invalid_argument("displacement: packed size does not match grid");
}

DiscreteDisplacement::DiscreteDisplacement(const DiscreteField& u1, const DiscreteField& u2,
                                           const DiscreteField& u3)
    : DiscreteDisplacement(u1.grid()) {
  if (!(u2.grid() == grid_) || !(u3.grid() == grid_)) {
    throw std::invalid_argument("displacement: components live on different grids");
  }
  component(0) = u1.values();
  component(1) = u2.values();
  component(2) = u3.values();
}

DiscreteField DiscreteDisplacement::field(int c) const {
  return DiscreteField(grid_, component(c), c == 2 ? BoundaryKind::h2_0 : BoundaryKind::h1_0);
}

void DiscreteDisplacement::clamp() {
  const Eigen::VectorXd mask = interior_mask(grid_);
  for (int c = 0; c < 3; ++c) component(c) = component(c).cwiseProduct(mask);
}

bool DiscreteDisplacement::is_clamped() const {
  for (int c = 0; c < 3; ++c) {
    for (int j = 0; j < grid_.n2(); ++j) {
      for (int i = 0; i < grid_.n1(); ++i) {
        if (grid_.on_boundary(i, j) && component(c)[static_cast<Eigen::Index>(grid_.index(i, j))] != 0.0) {
          return false;
        }
      }
    }
  }
  return true;
}

DiscreteDisplacement& DiscreteDisplacement::operator+=(const DiscreteDisplacement& o) {
  if (!(o.grid_ == grid_)) throw std::invalid_argument("displacement: grid mismatch");
  data_ += o.data_;
  return *this;
}

DiscreteDisplacement& DiscreteDisplacement::operator-=(const DiscreteDisplacement& o) {
  if (!(o.grid_ == grid_)) throw std::invalid_argument("displacement: grid mismatch");
  data_ -= o.data_;
  return *this;
}

DiscreteDisplacement& DiscreteDisplacement::operator*=(double c) {
  data_ *= c;
  return *this;
}

DifferenceOperators::DifferenceOperators(const Grid& grid) : grid_(grid) {
  first_[0] = tensor_operator(grid, Part::first, Part::identity, false);
  first_[1] = tensor_operator(grid, Part::identity, Part::first, false);
  for (bool ghost : {false, true}) {
    auto& second = ghost ? second_ghost_ : second_onesided_;
    second[0] = tensor_operator(grid, Part::second, Part::identity, ghost);
    second[1] = tensor_operator(grid, Part::first, Part::first, ghost);
    second[2] = tensor_operator(grid, Part::identity, Part::second, ghost);
  }
}

Eigen::VectorXd quadrature_weights(const Grid& grid) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(grid.size()));
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) w[static_cast<Eigen::Index>(grid.index(i, j))] = grid.weight(i, j);
  return w;
}

Eigen::VectorXd interior_mask(const Grid& grid) {
  Eigen::VectorXd m(static_cast<Eigen::Index>(grid.size()));
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i)
      m[static_cast<Eigen::Index>(grid.index(i, j))] = grid.on_boundary(i, j) ? 0.0 : 1.0;
  return m;
}

DiscreteField d1(const DiscreteField& f, int alpha) {
  const DifferenceOperators ops(f.grid());
  return DiscreteField(f.grid(), ops.first(alpha, f.kind()) * f.values());
}

DiscreteField d2(const DiscreteField& f, int alpha, int beta) {
  const DifferenceOperators ops(f.grid());
  return DiscreteField(f.grid(), ops.second(alpha, beta, f.kind()) * f.values());
}

double integrate(const DiscreteField& f, const DiscreteField& weight) {
  if (!(f.grid() == weight.grid())) throw std::invalid_argument("integrate: grid mismatch");
  const Eigen::VectorXd w = quadrature_weights(f.grid());
  double acc = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) acc += w[k] * f.values()[k] * weight.values()[k];
  return acc;
}

double integrate(const DiscreteField& f) {
  const Eigen::VectorXd w = quadrature_weights(f.grid());
  double acc = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) acc += w[k] * f.values()[k];
  return acc;
}

Seminorms seminorms(const DiscreteDisplacement& u, const DifferenceOperators& ops) {
  const Eigen::VectorXd w = quadrature_weights(u.grid());
  auto sq = [&w](const Eigen::VectorXd& f) { return w.dot(f.cwiseAbs2()); };

  Seminorms s;
  for (int c = 0; c < 3; ++c) {
    const BoundaryKind kind = c == 2 ? BoundaryKind::h2_0 : BoundaryKind::h1_0;
    const Eigen::VectorXd f = u.component(c);
    s.l2[c] = std::sqrt(sq(f));
    s.h1[c] = std::sqrt(sq(ops.first(0, kind) * f) + sq(ops.first(1, kind) * f));
  }
  const Eigen::VectorXd u3 = u.component(2);
  s.h2 = std::sqrt(sq(ops.second(0, 0, BoundaryKind::h2_0) * u3) +
                   2.0 * sq(ops.second(0, 1, BoundaryKind::h2_0) * u3) +
                   sq(ops.second(1, 1, BoundaryKind::h2_0) * u3));
  return s;
}

Seminorms seminorms(const DiscreteDisplacement& u) { return seminorms(u, DifferenceOperators(u.grid())); }

double v_norm(const DiscreteDisplacement& u, const DifferenceOperators& ops) {
  const Seminorms s = seminorms(u, ops);
  auto hyp = [](std::initializer_list<double> xs) {
    double acc = 0.0;
    for (double x : xs) acc += x * x;
    return std::sqrt(acc);
  };
  return hyp({s.l2[0], s.h1[0]}) + hyp({s.l2[1], s.h1[1]}) + hyp({s.l2[2], s.h1[2], s.h2});
}

double v_norm(const DiscreteDisplacement& u) { return v_norm(u, DifferenceOperators(u.grid())); }

}  // namespace flatshell
