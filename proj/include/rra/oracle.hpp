#pragma once

#include "rra/certify.hpp"
#include "rra/dynamics.hpp"
#include "rra/problem.hpp"
#include "rra/types.hpp"

#include <string>

namespace rra {

/// Centralized reference solution of the dual form with the consensus
/// variable eliminated (one shared z_j per constraint). Multipliers are
/// stored replicated per agent so the point can be certified directly.
struct OracleSolution {
  Vec x;           // nq
  Vec Z, W, U;     // mnq (Z consensual, W = 0, U = 0 by construction)
  Vec Lam1, Lam2;  // mnq (consensual)
  double objective_value = 0.0;
  long iterations = 0;
  double tol = 0.0;
  KktResiduals final_kkt;
};

struct OracleFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Solves the consensus-eliminated dual form centrally:
///   min f(x)  s.t.  x_i in Omega_i,
///   sum_i a_ij^l x_i^l + (gamma_j / n) * max(0, sum_i ahat_ij^l x_i^l) <= b_j^l
/// by a projected primal-dual subgradient phase (diminishing step c/sqrt(k),
/// c picked by a deterministic bracketing sweep) followed by an active-set
/// Newton polish. The returned point has passed kkt_residuals at tol;
/// otherwise OracleFailure is thrown (never a silent approximate answer).
/// Shares only the projection/subgradient primitives with the flow engine.
OracleSolution centralized_solve(const RobustAllocationProblem& problem,
                                 double tol = 1e-6, long max_iter = 200000);

struct CrossValidation {
  bool pass = false;
  double max_abs_gap = 0.0;     // worst |x_final - x_star| component
  int worst_component = -1;     // flat index into the stacked x
  double objective_gap = 0.0;   // f(x_final) - f(x_star)
  std::string str() const;
};

/// Componentwise comparison of a trajectory endpoint against the oracle.
CrossValidation cross_validate(const RobustAllocationProblem& problem,
                               const SwarmState& trajectory_final,
                               const OracleSolution& oracle, double tol);

/// Reconstructs a full flow equilibrium from an oracle solution: raw blocks
/// from the stationarity equations and consensus integrators from per-block
/// least squares against the graph Laplacian. At instances whose optimum
/// needs a non-extreme subgradient at an l1 kink, the selected-field flow has
/// no exact equilibrium and the reconstruction carries that residual.
SwarmState equilibrium_state(const RobustAllocationProblem& problem,
                             const Laplacian& laplacian,
                             const OracleSolution& solution);

}  // namespace rra
