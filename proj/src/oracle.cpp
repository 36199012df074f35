#include "rra/oracle.hpp"

#include "rra/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace rra {

namespace {

// The consensus-eliminated dual form reduces to constraints in x only:
//   g_jl(x) = sum_i a_ij^l x_i^l + (gamma_j/n) max(0, s_jl(x)) - b_j^l <= 0
//   s_jl(x) = sum_i ahat_ij^l x_i^l
struct Reduced {
  Dims dims;
  std::vector<Vec> a_col;     // per (j,l): n nominal coefficients
  std::vector<Vec> ahat_col;  // per (j,l): n deviation half-widths
  Vec b_agg;                  // per (j,l)
  Vec gamma_frac;             // gamma_j / n per (j,l)

  int rows() const { return static_cast<int>(b_agg.size()); }
  int ridx(int j, int l) const { return j * dims.q + l; }
};

Reduced reduce(const RobustAllocationProblem& problem) {
  Reduced r;
  r.dims = problem.dims();
  const int rows = r.dims.m * r.dims.q;
  r.a_col.resize(rows);
  r.ahat_col.resize(rows);
  r.b_agg.resize(rows);
  r.gamma_frac.resize(rows);
  for (int j = 0; j < r.dims.m; ++j) {
    const Vec bj = problem.constraints.aggregate_b(j);
    for (int l = 0; l < r.dims.q; ++l) {
      const int t = r.ridx(j, l);
      r.a_col[t].resize(r.dims.n);
      r.ahat_col[t].resize(r.dims.n);
      for (int i = 0; i < r.dims.n; ++i) {
        r.a_col[t][i] = problem.constraints.a[i][j][l];
        r.ahat_col[t][i] = problem.constraints.ahat[i][j][l];
      }
      r.b_agg[t] = bj[l];
      r.gamma_frac[t] =
          static_cast<double>(problem.constraints.gamma[j]) / r.dims.n;
    }
  }
  return r;
}

double s_of(const Reduced& r, int t, const Vec& x) {
  double s = 0.0;
  for (int i = 0; i < r.dims.n; ++i) s += r.ahat_col[t][i] * x[r.dims.xidx(i, t % r.dims.q)];
  return s;
}

double g_of(const Reduced& r, int t, const Vec& x) {
  double g = -r.b_agg[t];
  for (int i = 0; i < r.dims.n; ++i) g += r.a_col[t][i] * x[r.dims.xidx(i, t % r.dims.q)];
  const double s = s_of(r, t, x);
  if (s > 0.0) g += r.gamma_frac[t] * s;
  return g;
}

// d g_jl / d x_il with the positive-part slope sigma fixed.
double g_coeff(const Reduced& r, int t, int i, double sigma) {
  return r.a_col[t][i] + sigma * r.gamma_frac[t] * r.ahat_col[t][i];
}

double obj_value(const RobustAllocationProblem& problem, const Vec& x) {
  const Dims d = problem.dims();
  double f = 0.0;
  for (int i = 0; i < d.n; ++i) {
    f += objective_value(problem.objectives[i], x.segment(i * d.q, d.q));
  }
  return f;
}

// Cheap optimality merit used to track the best subgradient iterate.
double merit_of(const RobustAllocationProblem& problem, const Reduced& r,
                const Vec& x, const Vec& lam) {
  const Dims d = problem.dims();
  double merit = 0.0;
  for (int t = 0; t < r.rows(); ++t) {
    const double g = g_of(r, t, x);
    merit = std::max(merit, g);
    merit = std::max(merit, std::abs(lam[t] * g));
  }
  for (int i = 0; i < d.n; ++i) {
    Vec g_rest = Vec::Zero(d.q);
    for (int j = 0; j < d.m; ++j) {
      for (int l = 0; l < d.q; ++l) {
        const int t = r.ridx(j, l);
        const double sig = s_of(r, t, x) > 0.0 ? 1.0 : 0.0;
        g_rest[l] += lam[t] * g_coeff(r, t, i, sig);
      }
    }
    merit = std::max(merit,
                     stationarity_residual(problem.objectives[i],
                                           problem.sets[i],
                                           x.segment(i * d.q, d.q), g_rest));
  }
  return merit;
}

struct SubgradResult {
  Vec x, lam;
  double merit = 0.0;
  long iterations = 0;
};

// Projected primal-dual subgradient phase with diminishing step c / sqrt(k).
SubgradResult subgradient_phase(const RobustAllocationProblem& problem,
                                const Reduced& r, Vec x, Vec lam, double c,
                                long iters, long merit_every) {
  const Dims d = problem.dims();
  SubgradResult best{x, lam, merit_of(problem, r, x, lam), 0};
  for (long k = 1; k <= iters; ++k) {
    const double eta = c / std::sqrt(static_cast<double>(k));
    Vec dx(d.nq());
    for (int i = 0; i < d.n; ++i) {
      dx.segment(i * d.q, d.q) =
          subgradient(problem.objectives[i], x.segment(i * d.q, d.q));
    }
    Vec g(r.rows());
    for (int t = 0; t < r.rows(); ++t) {
      g[t] = g_of(r, t, x);
      const double sig = s_of(r, t, x) > 0.0 ? 1.0 : 0.0;
      if (lam[t] != 0.0) {
        for (int i = 0; i < d.n; ++i) {
          dx[d.xidx(i, t % d.q)] += lam[t] * g_coeff(r, t, i, sig);
        }
      }
    }
    Vec xn = x - eta * dx;
    for (int i = 0; i < d.n; ++i) {
      xn.segment(i * d.q, d.q) =
          project(problem.sets[i], xn.segment(i * d.q, d.q));
    }
    x = std::move(xn);
    lam = (lam + eta * g).cwiseMax(0.0);
    if (k % merit_every == 0 || k == iters) {
      const double merit = merit_of(problem, r, x, lam);
      if (merit < best.merit) {
        best.x = x;
        best.lam = lam;
        best.merit = merit;
      }
    }
  }
  best.iterations = iters;
  return best;
}

// ---------------------------------------------------------------------------
// Active-set Newton polish.
// ---------------------------------------------------------------------------

struct ActiveSet {
  std::vector<int> active_g;           // reduced-constraint rows
  std::vector<double> sigma;           // positive-part slope per row
  std::vector<int> active_ball;        // agents with the ball constraint tight
  std::vector<char> pinned;            // per x component: 1 = held fixed
  std::vector<double> pinned_value;    // value of each pinned component
  std::vector<char> l1_pin;            // pinned at an l1 kink (subgradient free)
  std::vector<char> at_lower, at_upper;

  bool operator==(const ActiveSet&) const = default;
};

ActiveSet detect_active(const RobustAllocationProblem& problem,
                        const Reduced& r, const Vec& x, const Vec& lam,
                        double tol) {
  const Dims d = problem.dims();
  ActiveSet as;
  as.sigma.resize(r.rows(), 0.0);
  for (int t = 0; t < r.rows(); ++t) {
    as.sigma[t] = s_of(r, t, x) > 0.0 ? 1.0 : 0.0;
    if (lam[t] > tol || g_of(r, t, x) > -tol) as.active_g.push_back(t);
  }
  as.pinned.assign(d.nq(), 0);
  as.pinned_value.assign(d.nq(), 0.0);
  as.l1_pin.assign(d.nq(), 0);
  as.at_lower.assign(d.nq(), 0);
  as.at_upper.assign(d.nq(), 0);
  for (int i = 0; i < d.n; ++i) {
    const auto& set = problem.sets[i];
    const Vec xi = x.segment(i * d.q, d.q);
    if (set.kind == LocalSet::Kind::Ball) {
      if ((xi - set.center).norm() > set.radius - tol) as.active_ball.push_back(i);
    }
    for (int l = 0; l < d.q; ++l) {
      const int t = d.xidx(i, l);
      if (set.kind == LocalSet::Kind::Box) {
        if (xi[l] < set.lower[l] + tol) {
          as.pinned[t] = as.at_lower[t] = 1;
          as.pinned_value[t] = set.lower[l];
          continue;
        }
        if (xi[l] > set.upper[l] - tol) {
          as.pinned[t] = as.at_upper[t] = 1;
          as.pinned_value[t] = set.upper[l];
          continue;
        }
      } else if (set.kind == LocalSet::Kind::Nonneg) {
        if (xi[l] < tol) {
          as.pinned[t] = as.at_lower[t] = 1;
          as.pinned_value[t] = 0.0;
          continue;
        }
      }
      if (problem.objectives[i].kind == ObjectiveSpec::Kind::QuadraticPlusL1 &&
          std::abs(xi[l]) < tol) {
        as.pinned[t] = as.l1_pin[t] = 1;
        as.pinned_value[t] = 0.0;
      }
    }
  }
  return as;
}

struct PolishResult {
  bool ok = false;
  Vec x, lam, tau;  // tau per agent (0 when the ball is inactive)
};

// Smooth objective gradient with the l1 sign pattern frozen to sign(x)
// for non-pinned components.
Vec frozen_gradient(const RobustAllocationProblem& problem, const Vec& x,
                    const std::vector<char>& l1_pin) {
  const Dims d = problem.dims();
  Vec g(d.nq());
  for (int i = 0; i < d.n; ++i) {
    const Vec xi = x.segment(i * d.q, d.q);
    const auto& obj = problem.objectives[i];
    Vec gi = 2.0 * (xi - obj.p);
    if (obj.kind == ObjectiveSpec::Kind::L2Norm) {
      const double nd = (xi - obj.p).norm();
      gi = nd > 0 ? Vec((xi - obj.p) / nd) : Vec(Vec::Zero(d.q));
    } else if (obj.kind == ObjectiveSpec::Kind::QuadraticPlusL1) {
      for (int l = 0; l < d.q; ++l) {
        const int t = d.xidx(i, l);
        if (!l1_pin[t]) gi[l] += xi[l] >= 0.0 ? 1.0 : -1.0;
      }
    }
    g.segment(i * d.q, d.q) = gi;
  }
  return g;
}

PolishResult newton_polish(const RobustAllocationProblem& problem,
                           const Reduced& r, const ActiveSet& as, Vec x,
                           Vec lam) {
  const Dims d = problem.dims();
  std::vector<int> free_idx;
  for (int t = 0; t < d.nq(); ++t) {
    if (!as.pinned[t]) free_idx.push_back(t);
  }
  const int nf = static_cast<int>(free_idx.size());
  const int ng = static_cast<int>(as.active_g.size());
  const int nb = static_cast<int>(as.active_ball.size());
  const int dim = nf + ng + nb;
  if (dim == 0) return {true, x, Vec::Zero(r.rows()), Vec::Zero(d.n)};

  Vec v(dim);
  for (int t = 0; t < nf; ++t) v[t] = x[free_idx[t]];
  for (int t = 0; t < ng; ++t) v[nf + t] = std::max(lam[as.active_g[t]], 0.0);
  for (int t = 0; t < nb; ++t) v[nf + ng + t] = 1.0;  // tau starting guess

  auto unpack = [&](const Vec& v, Vec& xf, Vec& lamf, Vec& tauf) {
    xf = x;
    for (int t = 0; t < d.nq(); ++t) {
      if (as.pinned[t]) xf[t] = as.pinned_value[t];
    }
    for (int t = 0; t < nf; ++t) xf[free_idx[t]] = v[t];
    lamf = Vec::Zero(r.rows());
    for (int t = 0; t < ng; ++t) lamf[as.active_g[t]] = v[nf + t];
    tauf = Vec::Zero(d.n);
    for (int t = 0; t < nb; ++t) tauf[as.active_ball[t]] = v[nf + ng + t];
  };

  auto residual = [&](const Vec& v) {
    Vec xf, lamf, tauf;
    unpack(v, xf, lamf, tauf);
    Vec grad = frozen_gradient(problem, xf, as.l1_pin);
    for (int t = 0; t < r.rows(); ++t) {
      if (lamf[t] == 0.0) continue;
      for (int i = 0; i < d.n; ++i) {
        grad[d.xidx(i, t % d.q)] += lamf[t] * g_coeff(r, t, i, as.sigma[t]);
      }
    }
    for (int i : as.active_ball) {
      const auto& set = problem.sets[i];
      grad.segment(i * d.q, d.q) +=
          tauf[i] * (xf.segment(i * d.q, d.q) - set.center);
    }
    Vec F(dim);
    for (int t = 0; t < nf; ++t) F[t] = grad[free_idx[t]];
    for (int t = 0; t < ng; ++t) F[nf + t] = g_of(r, as.active_g[t], xf);
    for (int t = 0; t < nb; ++t) {
      const int i = as.active_ball[t];
      const auto& set = problem.sets[i];
      F[nf + ng + t] = 0.5 * ((xf.segment(i * d.q, d.q) - set.center)
                                  .squaredNorm() -
                              set.radius * set.radius);
    }
    return F;
  };

  // Damped Newton with a forward-difference Jacobian; the system is tiny.
  Vec F = residual(v);
  for (int it = 0; it < 60 && F.norm() > 1e-12; ++it) {
    Mat J(dim, dim);
    for (int cidx = 0; cidx < dim; ++cidx) {
      const double h = 1e-7 * std::max(1.0, std::abs(v[cidx]));
      Vec vp = v;
      vp[cidx] += h;
      J.col(cidx) = (residual(vp) - F) / h;
    }
    const Vec dv = J.fullPivLu().solve(-F);
    if (!dv.allFinite()) return {false, x, lam, Vec::Zero(d.n)};
    double alpha = 1.0;
    const double f0 = F.norm();
    for (int ls = 0; ls < 30; ++ls) {
      Vec vn = v + alpha * dv;
      Vec Fn = residual(vn);
      if (Fn.norm() < f0 * (1.0 - 1e-4 * alpha) || Fn.norm() < 1e-12) {
        v = std::move(vn);
        F = std::move(Fn);
        break;
      }
      alpha *= 0.5;
      if (ls == 29) return {false, x, lam, Vec::Zero(d.n)};
    }
  }
  if (F.norm() > 1e-9) return {false, x, lam, Vec::Zero(d.n)};

  PolishResult res;
  unpack(v, res.x, res.lam, res.tau);
  res.ok = true;
  return res;
}

// Verifies signs and inactive margins of a polished point. Small negative
// multipliers are clipped to zero before the final certification.
bool verify_polish(const RobustAllocationProblem& problem, const Reduced& r,
                   const ActiveSet& as, PolishResult& pr, double tol) {
  const Dims d = problem.dims();
  if (!pr.ok) return false;
  for (int t = 0; t < r.rows(); ++t) {
    if (pr.lam[t] < -tol) return false;
    if (g_of(r, t, pr.x) > tol) return false;
    // positive-part slope must agree with the polished point
    const double s = s_of(r, t, pr.x);
    if (as.sigma[t] == 1.0 && s < -tol) return false;
    if (as.sigma[t] == 0.0 && s > tol) return false;
  }
  pr.lam = pr.lam.cwiseMax(0.0);
  for (int i = 0; i < d.n; ++i) {
    if (pr.tau[i] < -tol) return false;
    const auto& set = problem.sets[i];
    const Vec xi = pr.x.segment(i * d.q, d.q);
    if (set.kind == LocalSet::Kind::Ball &&
        (xi - set.center).norm() > set.radius + tol) {
      return false;
    }
    if (set.kind == LocalSet::Kind::Box) {
      for (int l = 0; l < d.q; ++l) {
        if (xi[l] < set.lower[l] - tol || xi[l] > set.upper[l] + tol)
          return false;
      }
    }
    if (set.kind == LocalSet::Kind::Nonneg && xi.minCoeff() < -tol) return false;
  }
  pr.tau = pr.tau.cwiseMax(0.0);
  // pinned components: the eliminated stationarity must admit a valid
  // multiplier / subgradient
  Vec grad = frozen_gradient(problem, pr.x, as.l1_pin);
  for (int t = 0; t < r.rows(); ++t) {
    if (pr.lam[t] == 0.0) continue;
    for (int i = 0; i < d.n; ++i) {
      grad[d.xidx(i, t % d.q)] += pr.lam[t] * g_coeff(r, t, i, as.sigma[t]);
    }
  }
  for (int i : as.active_ball) {
    grad.segment(i * d.q, d.q) +=
        pr.tau[i] * (pr.x.segment(i * d.q, d.q) - problem.sets[i].center);
  }
  for (int t = 0; t < d.nq(); ++t) {
    if (as.l1_pin[t] && std::abs(grad[t]) > 1.0 + tol) return false;
    if (as.at_lower[t] && grad[t] < -tol) return false;
    if (as.at_upper[t] && grad[t] > tol) return false;
  }
  return true;
}

}  // namespace

OracleSolution centralized_solve(const RobustAllocationProblem& problem,
                                 double tol, long max_iter) {
  const auto report = validate_problem(problem);
  if (!report.passed()) {
    throw OracleFailure("centralized_solve: problem failed validation:\n" +
                        report.str());
  }
  const Dims d = problem.dims();
  const Reduced r = reduce(problem);
  const Laplacian laplacian = build_laplacian(problem.graph);

  Vec x0(d.nq());
  for (int i = 0; i < d.n; ++i) {
    x0.segment(i * d.q, d.q) = problem.sets[i].interior_point();
  }
  Vec lam0 = Vec::Zero(r.rows());

  // Step-size bracketing: short pilot runs over a deterministic grid.
  const long pilot = std::min<long>(4000, std::max<long>(500, max_iter / 20));
  double best_c = 0.1;
  SubgradResult best{x0, lam0, merit_of(problem, r, x0, lam0), 0};
  long used = 0;
  for (double c : {0.003, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0}) {
    const auto res = subgradient_phase(problem, r, x0, lam0, c, pilot, 50);
    used += res.iterations;
    if (res.merit < best.merit) {
      best = res;
      best_c = c;
    }
  }
  // Main run with the bracketed step constant.
  const long main_iters = std::max<long>(0, max_iter - used);
  if (main_iters > 0) {
    const auto res =
        subgradient_phase(problem, r, best.x, best.lam, best_c, main_iters, 100);
    used += res.iterations;
    if (res.merit < best.merit) best = res;
  }

  // Active-set Newton polish with refinement rounds.
  PolishResult polished;
  polished.x = best.x;
  polished.lam = best.lam;
  Vec px = best.x, plam = best.lam;
  bool have = false;
  for (int round = 0; round < 10 && !have; ++round) {
    const ActiveSet as = detect_active(problem, r, px, plam, 1e-5);
    PolishResult pr = newton_polish(problem, r, as, px, plam);
    if (pr.ok && verify_polish(problem, r, as, pr, 1e-8)) {
      polished = pr;
      have = true;
      break;
    }
    if (pr.ok) {
      // actives were wrong; retry from the polished point
      px = pr.x;
      plam = pr.lam;
    } else {
      // fall back to a coarser activity threshold
      const ActiveSet as2 = detect_active(problem, r, px, plam, 1e-3);
      pr = newton_polish(problem, r, as2, px, plam);
      if (pr.ok && verify_polish(problem, r, as2, pr, 1e-8)) {
        polished = pr;
        have = true;
        break;
      }
      break;
    }
  }
  if (!have) {
    polished.x = best.x;
    polished.lam = best.lam;
  }

  // Assemble the full candidate: consensual Z from the positive part of the
  // deviation sums, W = 0, U = 0, multipliers replicated across agents.
  OracleSolution sol;
  sol.x = polished.x;
  sol.Z = Vec::Zero(d.mnq());
  sol.W = Vec::Zero(d.mnq());
  sol.U = Vec::Zero(d.mnq());
  sol.Lam1 = Vec::Zero(d.mnq());
  sol.Lam2 = Vec::Zero(d.mnq());
  for (int j = 0; j < d.m; ++j) {
    for (int l = 0; l < d.q; ++l) {
      const int t = r.ridx(j, l);
      const double s = s_of(r, t, sol.x);
      const double zbar = std::max(0.0, s) / d.n;
      const double lam1 = polished.lam[t];
      const double lam2 = s > 0.0 ? r.gamma_frac[t] * lam1 : 0.0;
      for (int i = 0; i < d.n; ++i) {
        sol.Z[d.idx(i, j, l)] = zbar;
        sol.Lam1[d.idx(i, j, l)] = lam1;
        sol.Lam2[d.idx(i, j, l)] = lam2;
      }
    }
  }
  sol.objective_value = obj_value(problem, sol.x);
  sol.iterations = used;
  sol.tol = tol;
  sol.final_kkt = kkt_residuals(
      problem, laplacian, {sol.x, sol.Z, sol.W, sol.U, sol.Lam1, sol.Lam2});
  if (sol.final_kkt.max() > tol) {
    std::ostringstream os;
    os << "centralized_solve: KKT self-check failed at tol " << tol
       << " (worst residual " << sol.final_kkt.max() << " after " << used
       << " iterations";
    if (!have) os << "; Newton polish did not verify";
    os << ")";
    throw OracleFailure(os.str());
  }
  return sol;
}

std::string CrossValidation::str() const {
  std::ostringstream os;
  os << (pass ? "PASS" : "FAIL") << ": max |x - x*| = " << max_abs_gap
     << " at component " << worst_component
     << ", objective gap = " << objective_gap;
  return os.str();
}

CrossValidation cross_validate(const RobustAllocationProblem& problem,
                               const SwarmState& trajectory_final,
                               const OracleSolution& oracle, double tol) {
  CrossValidation cv;
  const Vec diff = (trajectory_final.x - oracle.x).cwiseAbs();
  if (diff.size() > 0) {
    Eigen::Index wc = 0;
    cv.max_abs_gap = diff.maxCoeff(&wc);
    cv.worst_component = static_cast<int>(wc);
  }
  cv.objective_gap =
      obj_value(problem, trajectory_final.x) - oracle.objective_value;
  cv.pass = cv.max_abs_gap <= tol;
  return cv;
}

SwarmState equilibrium_state(const RobustAllocationProblem& problem,
                             const Laplacian& laplacian,
                             const OracleSolution& solution) {
  const Dims d = problem.dims();
  SwarmState s = SwarmState::zero(d);

  // xbar from the x stationarity equation with the residual-minimizing
  // subgradient selection.
  for (int i = 0; i < d.n; ++i) {
    Vec g_rest = Vec::Zero(d.q);
    for (int j = 0; j < d.m; ++j) {
      for (int l = 0; l < d.q; ++l) {
        g_rest[l] += problem.constraints.a[i][j][l] *
                         solution.Lam1[d.idx(i, j, l)] +
                     problem.constraints.ahat[i][j][l] *
                         solution.Lam2[d.idx(i, j, l)];
      }
    }
    const Vec xi = solution.x.segment(i * d.q, d.q);
    const Vec df =
        minimizing_subgradient(problem.objectives[i], problem.sets[i], xi, g_rest);
    s.xbar.segment(i * d.q, d.q) = xi - df - g_rest;
  }

  // Zbar / Wbar from their stationarity equations (U = 0 for oracle points).
  Vec H1, H2;
  dual_blocks(problem, solution.x, solution.Z, solution.W, H1, H2);
  for (int i = 0; i < d.n; ++i) {
    for (int j = 0; j < d.m; ++j) {
      const double gj = static_cast<double>(problem.constraints.gamma[j]);
      for (int l = 0; l < d.q; ++l) {
        const int t = d.idx(i, j, l);
        s.Zbar[t] = solution.Z[t] - gj / d.n * solution.Lam1[t] + solution.Lam2[t];
        s.Wbar[t] = solution.W[t] - solution.Lam1[t] + solution.Lam2[t];
      }
    }
  }
  s.U = solution.U;

  // Consensus integrators: per (j, l) solve L y = -(H - mean(H)) in the
  // least-squares sense so the multiplier equations close exactly where the
  // multipliers are positive.
  const Eigen::CompleteOrthogonalDecomposition<Mat> cod(laplacian.matrix());
  auto solve_y = [&](const Vec& H, Vec& Y) {
    Vec t(d.n), y(d.n);
    for (int j = 0; j < d.m; ++j) {
      for (int l = 0; l < d.q; ++l) {
        for (int i = 0; i < d.n; ++i) t[i] = -H[d.idx(i, j, l)];
        const double mean = t.mean();
        y = cod.solve((t.array() - mean).matrix());
        for (int i = 0; i < d.n; ++i) Y[d.idx(i, j, l)] = y[i];
      }
    }
  };
  solve_y(H1, s.Y1);
  solve_y(H2, s.Y2);

  s.Lam1bar = solution.Lam1 + H1 + laplacian.mix(s.Y1, d.mq());
  s.Lam2bar = solution.Lam2 + H2 + laplacian.mix(s.Y2, d.mq());

  refresh_outputs(problem, s);
  return s;
}

}  // namespace rra
