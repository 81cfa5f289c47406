#pragma once

#include <cstdint>
#include <random>

#include "flatshell/discrete_space.hpp"

namespace flatshell::testing {

inline DiscreteDisplacement random_displacement(const Grid& grid, std::uint64_t seed, double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  DiscreteDisplacement u(grid);
  for (Eigen::Index k = 0; k < u.packed().size(); ++k) u.packed()[k] = normal(rng);
  u.clamp();
  return u;
}

inline DiscreteField random_field(const Grid& grid, std::uint64_t seed, BoundaryKind kind) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = normal(rng);
  if (kind != BoundaryKind::free) {
    for (int j = 0; j < grid.n2(); ++j)
      for (int i = 0; i < grid.n1(); ++i)
        if (grid.on_boundary(i, j)) v[grid.index(i, j)] = 0.0;
  }
  return DiscreteField(grid, v, kind);
}

// Mirror image under y1 -> L1 - y1; u1 changes sign.
inline DiscreteDisplacement reflect_y1(const DiscreteDisplacement& u) {
  const Grid& g = u.grid();
  DiscreteDisplacement r(g);
  for (int j = 0; j < g.n2(); ++j) {
    for (int i = 0; i < g.n1(); ++i) {
      const auto from = static_cast<Eigen::Index>(g.index(g.n1() - 1 - i, j));
      const auto to = static_cast<Eigen::Index>(g.index(i, j));
      r.component(0)[to] = -u.component(0)[from];
      r.component(1)[to] = u.component(1)[from];
      r.component(2)[to] = u.component(2)[from];
    }
  }
  return r;
}

}  // namespace flatshell::testing
