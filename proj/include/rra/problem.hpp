#pragma once

#include "rra/graph.hpp"
#include "rra/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rra {

/// Closed convex local constraint set of one agent.
struct LocalSet {
  enum class Kind { Ball, Box, Nonneg, WholeSpace };

  Kind kind = Kind::WholeSpace;
  Vec center;  // Ball
  double radius = 0.0;
  Vec lower, upper;  // Box

  static LocalSet ball(Vec center, double radius);
  static LocalSet box(Vec lower, Vec upper);
  static LocalSet nonneg(int dim);
  static LocalSet whole_space(int dim);

  int dim() const;
  /// A canonical interior point (ball center, box midpoint, origin).
  Vec interior_point() const;
};

/// Per-agent objective. The quadratic variants are strictly convex; the pure
/// l2 norm is convex only and is flagged by validation.
struct ObjectiveSpec {
  enum class Kind { Quadratic, QuadraticPlusL1, L2Norm };

  Kind kind = Kind::Quadratic;
  Vec p;  // anchor point

  static ObjectiveSpec quadratic(Vec p);
  static ObjectiveSpec quadratic_plus_l1(Vec p);
  static ObjectiveSpec l2norm(Vec p);
};

/// Data of the m coupled resource constraints under budget uncertainty:
/// nominal diagonal blocks A_ij, nonnegative deviation half-widths Ahat_ij,
/// per-agent shares b_ij and integer budgets gamma_j in [0, n].
struct UncertainConstraintData {
  int m = 0;
  int q = 0;
  // a[i][j], ahat[i][j], b[i][j] are q-vectors (diagonals / shares).
  std::vector<std::vector<Vec>> a;
  std::vector<std::vector<Vec>> ahat;
  std::vector<std::vector<Vec>> b;
  std::vector<int> gamma;
  // Optional aggregate b_j; when present validation checks sum_i b_ij == b_j.
  std::optional<std::vector<Vec>> b_aggregate;

  /// sum_i b_ij for constraint j.
  Vec aggregate_b(int j) const;
};

struct RobustAllocationProblem {
  CommGraph graph;
  UncertainConstraintData constraints;
  std::vector<LocalSet> sets;
  std::vector<ObjectiveSpec> objectives;

  Dims dims() const;
  int n() const { return graph.n; }
  int m() const { return constraints.m; }
  int q() const { return constraints.q; }
};

struct ValidationFinding {
  enum class Severity { Error, Warning, Info };
  Severity severity;
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;
  bool passed() const;
  std::string str() const;
};

/// Checks graph connectivity, set/objective convexity classes, Ahat >= 0,
/// budget ranges, dimension consistency and the optional aggregate-b split.
/// All findings are reported; nothing throws. A Slater point is not searched
/// for automatically; an informational finding records that.
ValidationReport validate_problem(const RobustAllocationProblem& problem);

/// The built-in four-agent demo instance (n=4, m=2, q=2, gamma=2, path
/// graph, ball sets of radius 30 around the initial positions, quadratic
/// plus l1 objectives).
RobustAllocationProblem demo_problem();

/// Initial agent positions of the built-in demo.
Mat demo_initial_positions();

}  // namespace rra
