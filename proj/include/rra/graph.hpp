#pragma once

#include "rra/types.hpp"

namespace rra {

/// Weighted undirected communication graph on n agents. The adjacency matrix
/// must be symmetric with nonnegative weights and a zero diagonal.
struct CommGraph {
  int n = 0;
  Mat adjacency;  // n x n

  static CommGraph path(int n, double weight = 1.0);
  static CommGraph complete(int n, double weight = 1.0);

  bool connected() const;
};

/// Graph Laplacian L = D - A with D_ii = sum_k a_ik. For an undirected
/// connected graph L is symmetric positive semidefinite with L * 1 = 0.
class Laplacian {
 public:
  Laplacian() = default;
  explicit Laplacian(Mat L) : L_(std::move(L)) {}

  const Mat& matrix() const { return L_; }
  int n() const { return static_cast<int>(L_.rows()); }

  /// Applies the Kronecker lift L (x) I_b to a stacked vector of n blocks of
  /// size b. Equivalent to materializing the mnq x mnq matrix, without the
  /// memory traffic.
  Vec mix(const Vec& v, int block) const;

 private:
  Mat L_;
};

/// Validates the adjacency matrix (symmetry, nonnegativity, zero diagonal)
/// and returns L = D - A. Throws std::invalid_argument on malformed input.
Laplacian build_laplacian(const CommGraph& graph);

}  // namespace rra
