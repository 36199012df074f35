#include "rra/dynamics.hpp"

#include "rra/certify.hpp"
#include "rra/geometry.hpp"

#include <cmath>

namespace rra {

SwarmState SwarmState::zero(const Dims& dims) {
  SwarmState s;
  s.xbar = Vec::Zero(dims.nq());
  s.Zbar = s.Wbar = s.U = Vec::Zero(dims.mnq());
  s.Lam1bar = s.Lam2bar = Vec::Zero(dims.mnq());
  s.Y1 = s.Y2 = Vec::Zero(dims.mnq());
  s.x = s.xbar;
  s.Z = s.W = s.Lam1 = s.Lam2 = Vec::Zero(dims.mnq());
  return s;
}

void refresh_outputs(const RobustAllocationProblem& problem, SwarmState& state) {
  const Dims d = problem.dims();
  state.x.resize(d.nq());
  for (int i = 0; i < d.n; ++i) {
    state.x.segment(i * d.q, d.q) =
        project(problem.sets[i], state.xbar.segment(i * d.q, d.q));
  }
  state.Z = project_nonneg(state.Zbar);
  state.W = project_nonneg(state.Wbar);
  state.Lam1 = project_nonneg(state.Lam1bar);
  state.Lam2 = project_nonneg(state.Lam2bar);
}

double SwarmDeriv::norm() const {
  double s = xbar.squaredNorm() + Zbar.squaredNorm() + Wbar.squaredNorm() +
             U.squaredNorm() + Lam1bar.squaredNorm() + Lam2bar.squaredNorm() +
             Y1.squaredNorm() + Y2.squaredNorm();
  return std::sqrt(s);
}

namespace {

// Per-agent coupling sum_j A_ij lam_ij (and the Ahat analog) as an nq vector.
Vec multiplier_pressure(const RobustAllocationProblem& problem, const Vec& lam1,
                        const Vec& lam2) {
  const Dims d = problem.dims();
  Vec out = Vec::Zero(d.nq());
  for (int i = 0; i < d.n; ++i) {
    for (int j = 0; j < d.m; ++j) {
      for (int l = 0; l < d.q; ++l) {
        out[d.xidx(i, l)] +=
            problem.constraints.a[i][j][l] * lam1[d.idx(i, j, l)] +
            problem.constraints.ahat[i][j][l] * lam2[d.idx(i, j, l)];
      }
    }
  }
  return out;
}

Vec stacked_subgradient(const RobustAllocationProblem& problem, const Vec& x) {
  const Dims d = problem.dims();
  Vec fx(d.nq());
  for (int i = 0; i < d.n; ++i) {
    fx.segment(i * d.q, d.q) =
        subgradient(problem.objectives[i], x.segment(i * d.q, d.q));
  }
  return fx;
}

Vec gamma_scaled(const RobustAllocationProblem& problem, const Vec& v) {
  const Dims d = problem.dims();
  Vec out(d.mnq());
  for (int i = 0; i < d.n; ++i) {
    for (int j = 0; j < d.m; ++j) {
      const double g = static_cast<double>(problem.constraints.gamma[j]) / d.n;
      for (int l = 0; l < d.q; ++l) {
        const int t = d.idx(i, j, l);
        out[t] = g * v[t];
      }
    }
  }
  return out;
}

void check_finite(const Vec& v, const char* block, double t) {
  if (!v.allFinite()) {
    throw DivergenceError(std::string("non-finite value in block ") + block +
                          " at t = " + std::to_string(t));
  }
}

}  // namespace

SwarmDeriv vector_field(const RobustAllocationProblem& problem,
                        const Laplacian& laplacian, const SwarmState& state) {
  const Dims d = problem.dims();
  const int mq = d.mq();
  SwarmDeriv f;

  const Vec fx = stacked_subgradient(problem, state.x);
  f.xbar = -state.xbar + state.x - fx -
           multiplier_pressure(problem, state.Lam1, state.Lam2);

  f.Zbar = -state.Zbar + state.Z - gamma_scaled(problem, state.Lam1) +
           state.Lam2 - laplacian.mix(state.U, mq);
  f.Wbar = -state.Wbar + state.W - state.Lam1 + state.Lam2;
  f.U = laplacian.mix(state.Z, mq);

  Vec H1, H2;
  dual_blocks(problem, state.x, state.Z, state.W, H1, H2);
  f.Lam1bar = -state.Lam1bar + state.Lam1 + H1 + laplacian.mix(state.Y1, mq) -
              laplacian.mix(state.Lam1, mq);
  f.Lam2bar = -state.Lam2bar + state.Lam2 + H2 + laplacian.mix(state.Y2, mq) -
              laplacian.mix(state.Lam2, mq);

  f.Y1 = -laplacian.mix(state.Lam1, mq);
  f.Y2 = -laplacian.mix(state.Lam2, mq);
  return f;
}

SwarmState step(const RobustAllocationProblem& problem,
                const Laplacian& laplacian, const SwarmState& state,
                double dt) {
  if (dt <= 0.0) throw std::invalid_argument("step: dt must be > 0");
  const Dims d = problem.dims();
  const int mq = d.mq();
  SwarmState next = state;

  // Primal sweep against the current multipliers.
  const Vec fx = stacked_subgradient(problem, state.x);
  next.xbar += dt * (-state.xbar + state.x - fx -
                     multiplier_pressure(problem, state.Lam1, state.Lam2));
  next.Zbar += dt * (-state.Zbar + state.Z -
                     gamma_scaled(problem, state.Lam1) + state.Lam2 -
                     laplacian.mix(state.U, mq));
  next.Wbar += dt * (-state.Wbar + state.W - state.Lam1 + state.Lam2);
  refresh_outputs(problem, next);

  // Multiplier sweep against the refreshed primal outputs.
  Vec H1, H2;
  dual_blocks(problem, next.x, next.Z, next.W, H1, H2);
  next.Lam1bar += dt * (-state.Lam1bar + state.Lam1 + H1 +
                        laplacian.mix(state.Y1, mq) -
                        laplacian.mix(state.Lam1, mq));
  next.Lam2bar += dt * (-state.Lam2bar + state.Lam2 + H2 +
                        laplacian.mix(state.Y2, mq) -
                        laplacian.mix(state.Lam2, mq));
  refresh_outputs(problem, next);

  // Consensus integrators last, against the refreshed outputs.
  next.U += dt * laplacian.mix(next.Z, mq);
  next.Y1 += dt * (-laplacian.mix(next.Lam1, mq));
  next.Y2 += dt * (-laplacian.mix(next.Lam2, mq));
  return next;
}

Trajectory simulate(const RobustAllocationProblem& problem,
                    const SwarmState& init, const IntegratorConfig& config) {
  if (config.dt <= 0.0) throw std::invalid_argument("simulate: dt must be > 0");
  if (config.t_end < config.dt) {
    throw std::invalid_argument("simulate: t_end must be >= dt");
  }
  const Laplacian laplacian = build_laplacian(problem.graph);
  const int stride = std::max(config.record_every, 1);
  const long steps = std::lround(config.t_end / config.dt);

  Trajectory traj;
  SwarmState state = init;
  refresh_outputs(problem, state);

  auto record = [&](double t, const SwarmState& s) {
    MonitorRow row;
    const auto margins = dual_feasibility_eval(problem, laplacian, s.x, s.Z, s.W);
    row.G1 = margins.G1;
    row.G2 = margins.G2;
    row.eq_residual = equilibrium_residual(problem, laplacian, s);
    const auto cons = consensus_residuals(laplacian, problem.dims(), s);
    row.consensus_Z = cons.Z;
    row.consensus_Lam1 = cons.Lam1;
    row.consensus_Lam2 = cons.Lam2;
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.monitors.push_back(std::move(row));
  };

  record(0.0, state);
  for (long k = 1; k <= steps; ++k) {
    const double t = k * config.dt;
    state = step(problem, laplacian, state, config.dt);
    check_finite(state.xbar, "xbar", t);
    check_finite(state.Zbar, "Zbar", t);
    check_finite(state.Wbar, "Wbar", t);
    check_finite(state.U, "U", t);
    check_finite(state.Lam1bar, "Lam1bar", t);
    check_finite(state.Lam2bar, "Lam2bar", t);
    check_finite(state.Y1, "Y1", t);
    check_finite(state.Y2, "Y2", t);
    const bool last = (k == steps);
    if (k % stride == 0 || last) {
      record(t, state);
      if (config.early_stop_tol &&
          traj.monitors.back().eq_residual < *config.early_stop_tol) {
        break;
      }
    }
  }
  return traj;
}

SwarmState default_init(const RobustAllocationProblem& problem) {
  const Dims d = problem.dims();
  SwarmState s = SwarmState::zero(d);
  for (int i = 0; i < d.n; ++i) {
    s.xbar.segment(i * d.q, d.q) = problem.sets[i].interior_point();
  }
  refresh_outputs(problem, s);
  return s;
}

}  // namespace rra
