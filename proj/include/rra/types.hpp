#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rra {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Problem dimensions: n agents, m coupled resource constraints, q state
/// dimensions per agent.
struct Dims {
  int n = 0;
  int m = 0;
  int q = 0;

  int nq() const { return n * q; }
  int mq() const { return m * q; }
  int mnq() const { return n * m * q; }

  /// Flat index of component l of the (agent i, constraint j) block in a
  /// stacked mnq vector. Agent-major, then constraint, then component.
  int idx(int i, int j, int l) const { return (i * m + j) * q + l; }

  /// Flat index of component l of agent i in a stacked nq vector.
  int xidx(int i, int l) const { return i * q + l; }

  bool operator==(const Dims&) const = default;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace rra
