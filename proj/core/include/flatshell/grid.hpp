#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flatshell {

/// Uniform tensor grid over the rectangle (0,L1) x (0,L2), boundary nodes included.
///
/// Nodes are numbered row-major in i (the y1 direction varies fastest):
/// index(i, j) = i + n1 * j.
class Grid {
 public:
  Grid(double L1, double L2, int n1, int n2) : L1_(L1), L2_(L2), n1_(n1), n2_(n2) {
    if (!(L1 > 0.0) || !(L2 > 0.0)) {
      throw std::invalid_argument("grid: side lengths must be positive");
    }
    if (n1 < 5 || n2 < 5) {
      throw std::invalid_argument("grid: need at least 5 nodes per side, got " + std::to_string(n1) +
                                  "x" + std::to_string(n2));
    }
  }

  double L1() const { return L1_; }
  double L2() const { return L2_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  double h1() const { return L1_ / (n1_ - 1); }
  double h2() const { return L2_ / (n2_ - 1); }
  std::size_t size() const { return static_cast<std::size_t>(n1_) * static_cast<std::size_t>(n2_); }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n1_) * static_cast<std::size_t>(j);
  }
  double y1(int i) const { return i == n1_ - 1 ? L1_ : i * h1(); }
  double y2(int j) const { return j == n2_ - 1 ? L2_ : j * h2(); }

  bool on_boundary(int i, int j) const { return i == 0 || j == 0 || i == n1_ - 1 || j == n2_ - 1; }

  /// Tensor-product trapezoidal weight of node (i, j).
  double weight(int i, int j) const {
    const double w1 = (i == 0 || i == n1_ - 1) ? 0.5 * h1() : h1();
    const double w2 = (j == 0 || j == n2_ - 1) ? 0.5 * h2() : h2();
    return w1 * w2;
  }

  bool operator==(const Grid&) const = default;

 private:
  double L1_;
  double L2_;
  int n1_;
  int n2_;
};

}  // namespace flatshell
