#include "rra/graph.hpp"

#include <vector>

namespace rra {

CommGraph CommGraph::path(int n, double weight) {
  CommGraph g;
  g.n = n;
  g.adjacency = Mat::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    g.adjacency(i, i + 1) = weight;
    g.adjacency(i + 1, i) = weight;
  }
  return g;
}

CommGraph CommGraph::complete(int n, double weight) {
  CommGraph g;
  g.n = n;
  g.adjacency = Mat::Constant(n, n, weight);
  g.adjacency.diagonal().setZero();
  return g;
}

bool CommGraph::connected() const {
  if (n <= 0) return false;
  if (n == 1) return true;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int k = 0; k < n; ++k) {
      if (!seen[k] && adjacency(v, k) > 0.0) {
        seen[k] = 1;
        ++count;
        stack.push_back(k);
      }
    }
  }
  return count == n;
}

Vec Laplacian::mix(const Vec& v, int block) const {
  const int n = this->n();
  if (v.size() != static_cast<Eigen::Index>(n) * block) {
    throw DimensionError("Laplacian::mix: vector size does not match n * block");
  }
  Vec out = Vec::Zero(v.size());
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const double c = L_(i, k);
      if (c != 0.0) {
        out.segment(i * block, block) += c * v.segment(k * block, block);
      }
    }
  }
  return out;
}

Laplacian build_laplacian(const CommGraph& graph) {
  const int n = graph.n;
  if (graph.adjacency.rows() != n || graph.adjacency.cols() != n) {
    throw std::invalid_argument("adjacency must be n x n");
  }
  for (int i = 0; i < n; ++i) {
    if (graph.adjacency(i, i) != 0.0) {
      throw std::invalid_argument("adjacency diagonal must be zero");
    }
    for (int k = 0; k < n; ++k) {
      if (graph.adjacency(i, k) < 0.0) {
        throw std::invalid_argument("adjacency weights must be nonnegative");
      }
      if (graph.adjacency(i, k) != graph.adjacency(k, i)) {
        throw std::invalid_argument("adjacency must be symmetric");
      }
    }
  }
  Mat L = -graph.adjacency;
  for (int i = 0; i < n; ++i) {
    L(i, i) = graph.adjacency.row(i).sum();
  }
  return Laplacian(std::move(L));
}

}  // namespace rra
