#pragma once

#include "rra/problem.hpp"
#include "rra/robust.hpp"
#include "rra/types.hpp"

#include <optional>
#include <vector>

namespace rra {

/// Full stacked state of the multi-agent flow: eight raw blocks plus the
/// projected outputs, which are recomputed after every raw update so the
/// output equations hold exactly at all times.
struct SwarmState {
  // raw state
  Vec xbar;              // nq
  Vec Zbar, Wbar, U;     // mnq
  Vec Lam1bar, Lam2bar;  // mnq
  Vec Y1, Y2;            // mnq
  // projected outputs
  Vec x;          // nq,  x_i = P_{Omega_i}(xbar_i)
  Vec Z, W;       // mnq, orthant projections
  Vec Lam1, Lam2;  // mnq, orthant projections

  static SwarmState zero(const Dims& dims);
};

/// Recomputes the projected outputs from the raw blocks.
void refresh_outputs(const RobustAllocationProblem& problem, SwarmState& state);

/// Time derivative of the raw state (same block layout as SwarmState).
struct SwarmDeriv {
  Vec xbar;
  Vec Zbar, Wbar, U;
  Vec Lam1bar, Lam2bar;
  Vec Y1, Y2;

  double norm() const;
};

/// Evaluates the right-hand side of the flow at the given state, using the
/// deterministic subgradient selection. Each agent's blocks depend only on
/// the agent itself and its graph neighbors.
SwarmDeriv vector_field(const RobustAllocationProblem& problem,
                        const Laplacian& laplacian, const SwarmState& state);

/// Advances the state by one step of size dt using a sequential projected
/// Euler sweep: primal blocks (xbar, Zbar, Wbar) advance against the current
/// multipliers, the multiplier blocks against the refreshed primal outputs,
/// and the consensus integrators (U, Y1, Y2) last against the refreshed
/// outputs. The sweep keeps the undamped primal-dual oscillation modes
/// neutrally stable, which a simultaneous explicit update does not.
/// Throws on dt <= 0 and on non-finite values (divergence).
SwarmState step(const RobustAllocationProblem& problem,
                const Laplacian& laplacian, const SwarmState& state,
                double dt);

struct IntegratorConfig {
  double dt = 0.01;
  double t_end = 300.0;
  int record_every = 10;  // snapshot stride in steps
  std::optional<double> early_stop_tol;  // on the equilibrium residual
};

/// Per-snapshot monitor values.
struct MonitorRow {
  Mat G1, G2;            // m x q
  double eq_residual = 0.0;
  double consensus_Z = 0.0;
  double consensus_Lam1 = 0.0;
  double consensus_Lam2 = 0.0;
  double lyapunov = 0.0;  // filled in after the run, see lyapunov_series
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SwarmState> states;
  std::vector<MonitorRow> monitors;

  const SwarmState& final_state() const { return states.back(); }
};

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Integrates the flow from init to t_end (or until the equilibrium residual
/// drops below early_stop_tol), recording a snapshot every record_every
/// steps plus the final state. Deterministic for fixed inputs.
Trajectory simulate(const RobustAllocationProblem& problem,
                    const SwarmState& init, const IntegratorConfig& config);

/// State at t = 0: xbar_i at the configured initial position (the canonical
/// interior point of Omega_i; for the demo these are the initial positions),
/// every multiplier and auxiliary block zero.
SwarmState default_init(const RobustAllocationProblem& problem);

}  // namespace rra
