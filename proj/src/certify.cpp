#include "rra/certify.hpp"

#include "rra/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace rra {

double KktResiduals::max() const {
  double v = 0.0;
  for (double r : as_array()) v = std::max(v, r);
  return v;
}

KktResiduals kkt_residuals(const RobustAllocationProblem& problem,
                           const Laplacian& laplacian,
                           const KktCandidate& candidate) {
  const Dims d = problem.dims();
  if (candidate.x.size() != d.nq() || candidate.Z.size() != d.mnq() ||
      candidate.W.size() != d.mnq() || candidate.U.size() != d.mnq() ||
      candidate.Lam1.size() != d.mnq() || candidate.Lam2.size() != d.mnq()) {
    throw DimensionError("kkt_residuals: candidate dimensions do not match");
  }
  KktResiduals r;
  const int mq = d.mq();

  // Stationarity in x: -(df + sum_j A lam1 + sum_j Ahat lam2) normal at x_i,
  // minimized over the objective subdifferential at kinks.
  for (int i = 0; i < d.n; ++i) {
    Vec g_rest = Vec::Zero(d.q);
    for (int j = 0; j < d.m; ++j) {
      for (int l = 0; l < d.q; ++l) {
        g_rest[l] += problem.constraints.a[i][j][l] *
                         candidate.Lam1[d.idx(i, j, l)] +
                     problem.constraints.ahat[i][j][l] *
                         candidate.Lam2[d.idx(i, j, l)];
      }
    }
    const Vec xi = candidate.x.segment(i * d.q, d.q);
    r.r_a = std::max(r.r_a, stationarity_residual(problem.objectives[i],
                                                  problem.sets[i], xi, g_rest));
  }

  // Stationarity in z and w on the orthant.
  const Vec LU = d.mnq() > 0 ? laplacian.mix(candidate.U, mq) : Vec();
  for (int i = 0; i < d.n; ++i) {
    for (int j = 0; j < d.m; ++j) {
      const double gj = static_cast<double>(problem.constraints.gamma[j]);
      Vec vz(d.q), vw(d.q), zij(d.q), wij(d.q);
      for (int l = 0; l < d.q; ++l) {
        const int t = d.idx(i, j, l);
        vz[l] = -gj / d.n * candidate.Lam1[t] + candidate.Lam2[t] - LU[t];
        vw[l] = -candidate.Lam1[t] + candidate.Lam2[t];
        zij[l] = candidate.Z[t];
        wij[l] = candidate.W[t];
      }
      r.r_b = std::max(r.r_b, projection_variational_residual_nonneg(zij, vz));
      r.r_c = std::max(r.r_c, projection_variational_residual_nonneg(wij, vw));
    }
  }

  // Aggregated feasibility and complementary slackness.
  const auto margins = dual_feasibility_eval(problem, laplacian, candidate.x,
                                             candidate.Z, candidate.W);
  Vec H1, H2;
  dual_blocks(problem, candidate.x, candidate.Z, candidate.W, H1, H2);
  for (int j = 0; j < d.m; ++j) {
    double cs1 = 0.0, cs2 = 0.0;
    for (int i = 0; i < d.n; ++i) {
      for (int l = 0; l < d.q; ++l) {
        const int t = d.idx(i, j, l);
        cs1 += candidate.Lam1[t] * H1[t];
        cs2 += candidate.Lam2[t] * H2[t];
      }
    }
    r.r_g = std::max(r.r_g, std::abs(cs1));
    r.r_h = std::max(r.r_h, std::abs(cs2));
    for (int l = 0; l < d.q; ++l) {
      r.r_d = std::max(r.r_d, std::max(0.0, margins.G1(j, l)));
      r.r_e = std::max(r.r_e, std::max(0.0, margins.G2(j, l)));
    }
  }
  r.r_f = d.mnq() > 0 ? laplacian.mix(candidate.Z, mq).norm() : 0.0;
  return r;
}

double equilibrium_residual(const RobustAllocationProblem& problem,
                            const Laplacian& laplacian,
                            const SwarmState& state) {
  // Stacked right-hand side of the stationary-point equations, assembled
  // independently of the flow engine.
  const Dims d = problem.dims();
  const int mq = d.mq();

  Vec fx(d.nq());
  for (int i = 0; i < d.n; ++i) {
    fx.segment(i * d.q, d.q) =
        subgradient(problem.objectives[i], state.x.segment(i * d.q, d.q));
  }
  Vec press = Vec::Zero(d.nq());
  Vec gl1(d.mnq());
  for (int i = 0; i < d.n; ++i) {
    for (int j = 0; j < d.m; ++j) {
      const double gj = static_cast<double>(problem.constraints.gamma[j]);
      for (int l = 0; l < d.q; ++l) {
        const int t = d.idx(i, j, l);
        press[d.xidx(i, l)] += problem.constraints.a[i][j][l] * state.Lam1[t] +
                               problem.constraints.ahat[i][j][l] * state.Lam2[t];
        gl1[t] = gj / d.n * state.Lam1[t];
      }
    }
  }
  Vec H1, H2;
  dual_blocks(problem, state.x, state.Z, state.W, H1, H2);

  const Vec e1 = -state.xbar + state.x - fx - press;
  const Vec e2 = -state.Zbar + state.Z - gl1 + state.Lam2 -
                 laplacian.mix(state.U, mq);
  const Vec e3 = -state.Wbar + state.W - state.Lam1 + state.Lam2;
  const Vec e4 = laplacian.mix(state.Z, mq);
  const Vec e5 = -state.Lam1bar + state.Lam1 + H1 + laplacian.mix(state.Y1, mq) -
                 laplacian.mix(state.Lam1, mq);
  const Vec e6 = -state.Lam2bar + state.Lam2 + H2 + laplacian.mix(state.Y2, mq) -
                 laplacian.mix(state.Lam2, mq);
  const Vec e7a = laplacian.mix(state.Lam1, mq);
  const Vec e7b = laplacian.mix(state.Lam2, mq);

  return std::sqrt(e1.squaredNorm() + e2.squaredNorm() + e3.squaredNorm() +
                   e4.squaredNorm() + e5.squaredNorm() + e6.squaredNorm() +
                   e7a.squaredNorm() + e7b.squaredNorm());
}

ConsensusResiduals consensus_residuals(const Laplacian& laplacian,
                                       const Dims& dims,
                                       const SwarmState& state) {
  ConsensusResiduals c;
  if (dims.mnq() == 0) return c;
  const int mq = dims.mq();
  c.Z = laplacian.mix(state.Z, mq).norm();
  c.Lam1 = laplacian.mix(state.Lam1, mq).norm();
  c.Lam2 = laplacian.mix(state.Lam2, mq).norm();
  return c;
}

CertificationReport certify_state(const RobustAllocationProblem& problem,
                                  const Laplacian& laplacian,
                                  const SwarmState& state) {
  CertificationReport rep;
  rep.kkt = kkt_residuals(problem, laplacian,
                          {state.x, state.Z, state.W, state.U, state.Lam1,
                           state.Lam2});
  rep.eq_residual = equilibrium_residual(problem, laplacian, state);
  rep.consensus = consensus_residuals(laplacian, problem.dims(), state);
  rep.feasibility =
      dual_feasibility_eval(problem, laplacian, state.x, state.Z, state.W);
  rep.robust_primal = robust_primal_eval(problem, state.x);
  return rep;
}

double LyapunovBreakdown::total() const {
  double s = 0.0;
  for (double v : components) s += v;
  return s;
}

namespace {

double paired_term(const Vec& raw, const Vec& proj, const Vec& ref_proj) {
  return 0.5 * ((raw - ref_proj).squaredNorm() - (raw - proj).squaredNorm());
}

}  // namespace

LyapunovBreakdown lyapunov_value(const RobustAllocationProblem& problem,
                                 const SwarmState& state,
                                 const SwarmState& reference) {
  (void)problem;
  LyapunovBreakdown b;
  b.components[0] = paired_term(state.xbar, state.x, reference.x);
  b.components[1] = paired_term(state.Zbar, state.Z, reference.Z);
  b.components[2] = paired_term(state.Wbar, state.W, reference.W);
  b.components[3] = 0.5 * (state.U - reference.U).squaredNorm();
  b.components[4] = paired_term(state.Lam1bar, state.Lam1, reference.Lam1);
  b.components[5] = paired_term(state.Lam2bar, state.Lam2, reference.Lam2);
  b.components[6] = 0.5 * (state.Y1 - reference.Y1).squaredNorm();
  b.components[7] = 0.5 * (state.Y2 - reference.Y2).squaredNorm();
  return b;
}

double lyapunov_lower_bound(const SwarmState& state,
                            const SwarmState& reference) {
  return 0.5 * ((state.x - reference.x).squaredNorm() +
                (state.Z - reference.Z).squaredNorm() +
                (state.W - reference.W).squaredNorm() +
                (state.U - reference.U).squaredNorm() +
                (state.Lam1 - reference.Lam1).squaredNorm() +
                (state.Lam2 - reference.Lam2).squaredNorm() +
                (state.Y1 - reference.Y1).squaredNorm() +
                (state.Y2 - reference.Y2).squaredNorm());
}

LyapunovSeries lyapunov_series(const RobustAllocationProblem& problem,
                               Trajectory& trajectory,
                               const SwarmState& reference,
                               bool reference_is_final) {
  LyapunovSeries out;
  out.reference_is_final = reference_is_final;
  out.values.reserve(trajectory.states.size());
  for (size_t k = 0; k < trajectory.states.size(); ++k) {
    const auto b = lyapunov_value(problem, trajectory.states[k], reference);
    out.breakdown.push_back(b);
    out.values.push_back(b.total());
    trajectory.monitors[k].lyapunov = b.total();
  }
  return out;
}

}  // namespace rra
