#pragma once

#include "rra/dynamics.hpp"
#include "rra/problem.hpp"
#include "rra/robust.hpp"
#include "rra/types.hpp"

#include <array>
#include <string>

namespace rra {

/// One scalar per first-order optimality condition of the dual form.
/// r_a..r_c are projection fixed-point residuals of the stationarity
/// inclusions (r_a minimizes over the objective subdifferential at kinks),
/// r_d/r_e are positive parts of the aggregated constraint values, r_f is
/// the Z-consensus norm, and r_g/r_h are the complementary-slackness
/// products summed over agents per constraint (worst case over constraints).
struct KktResiduals {
  double r_a = 0, r_b = 0, r_c = 0, r_d = 0;
  double r_e = 0, r_f = 0, r_g = 0, r_h = 0;

  std::array<double, 8> as_array() const {
    return {r_a, r_b, r_c, r_d, r_e, r_f, r_g, r_h};
  }
  double max() const;
};

/// Candidate primal-dual point for the KKT check.
struct KktCandidate {
  Vec x;           // nq
  Vec Z, W, U;     // mnq
  Vec Lam1, Lam2;  // mnq
};

KktResiduals kkt_residuals(const RobustAllocationProblem& problem,
                           const Laplacian& laplacian,
                           const KktCandidate& candidate);

/// Norm of the stacked raw-block right-hand side at the state; identical by
/// construction to ||vector_field(state)|| (the formulas are evaluated
/// independently here as a drift guard between the two modules).
double equilibrium_residual(const RobustAllocationProblem& problem,
                            const Laplacian& laplacian,
                            const SwarmState& state);

/// (||L Z||, ||L Lam1||, ||L Lam2||) under the Kronecker lift; all zero iff
/// the respective variable agrees across agents blockwise.
struct ConsensusResiduals {
  double Z = 0, Lam1 = 0, Lam2 = 0;
};

ConsensusResiduals consensus_residuals(const Laplacian& laplacian,
                                       const Dims& dims,
                                       const SwarmState& state);

struct CertificationReport {
  KktResiduals kkt;
  double eq_residual = 0.0;
  ConsensusResiduals consensus;
  FeasibilityMargins feasibility;
  Mat robust_primal;  // m x q worst-case margins at the candidate x
};

/// Full report for a swarm state (outputs must be consistent projections).
CertificationReport certify_state(const RobustAllocationProblem& problem,
                                  const Laplacian& laplacian,
                                  const SwarmState& state);

/// Lyapunov candidate value of a state against a reference state, the sum of
/// the eight per-block terms; raw blocks paired with their projections for
/// x, Z, W, Lam1, Lam2 and plain squared distances for U, Y1, Y2.
struct LyapunovBreakdown {
  std::array<double, 8> components{};
  double total() const;
};

LyapunovBreakdown lyapunov_value(const RobustAllocationProblem& problem,
                                 const SwarmState& state,
                                 const SwarmState& reference);

/// Lower bound of the candidate: half the squared output distance to the
/// reference, summed over all blocks. lyapunov_value >= this bound holds for
/// every state pair by the projection inequality.
double lyapunov_lower_bound(const SwarmState& state,
                            const SwarmState& reference);

struct LyapunovSeries {
  std::vector<double> values;
  std::vector<LyapunovBreakdown> breakdown;
  bool reference_is_final = false;
};

/// Evaluates the candidate along a trajectory against a reference state and
/// writes the values into the trajectory monitors.
LyapunovSeries lyapunov_series(const RobustAllocationProblem& problem,
                               Trajectory& trajectory,
                               const SwarmState& reference,
                               bool reference_is_final = false);

}  // namespace rra
