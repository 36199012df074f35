#include "rra/robust.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rra {

WorstCaseResult worst_case_greedy(const Vec& ahat_col, const Vec& x_col,
                                  int gamma) {
  const int n = static_cast<int>(ahat_col.size());
  if (x_col.size() != n) throw DimensionError("worst_case: size mismatch");
  if (gamma < 0 || gamma > n) {
    throw std::invalid_argument("worst_case: gamma outside [0, n]");
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double pa = ahat_col[a] * x_col[a];
    const double pb = ahat_col[b] * x_col[b];
    return pa > pb;  // stable: ties keep the lower agent index first
  });
  WorstCaseResult res;
  res.chosen.assign(order.begin(), order.begin() + gamma);
  std::sort(res.chosen.begin(), res.chosen.end());
  for (int i : res.chosen) res.value += ahat_col[i] * x_col[i];
  return res;
}

WorstCaseResult worst_case_bruteforce(const Vec& ahat_col, const Vec& x_col,
                                      int gamma) {
  const int n = static_cast<int>(ahat_col.size());
  if (x_col.size() != n) throw DimensionError("worst_case: size mismatch");
  if (gamma < 0 || gamma > n) {
    throw std::invalid_argument("worst_case: gamma outside [0, n]");
  }
  if (n > 20) throw std::invalid_argument("worst_case_bruteforce: n > 20");

  WorstCaseResult best;
  bool have = false;
  std::vector<int> subset(gamma);
  // first lexicographic subset
  std::iota(subset.begin(), subset.end(), 0);
  auto advance = [&]() {
    int t = gamma - 1;
    while (t >= 0 && subset[t] == n - gamma + t) --t;
    if (t < 0) return false;
    ++subset[t];
    for (int u = t + 1; u < gamma; ++u) subset[u] = subset[u - 1] + 1;
    return true;
  };
  do {
    double v = 0.0;
    for (int i : subset) v += ahat_col[i] * x_col[i];
    if (!have || v > best.value) {  // strict: keeps the lex-smallest maximizer
      best.value = v;
      best.chosen = subset;
      have = true;
    }
  } while (gamma > 0 && advance());
  if (gamma == 0) {
    best.value = 0.0;
    best.chosen.clear();
  }
  return best;
}

bool uncertainty_membership(const Vec& abar, const Vec& a, const Vec& ahat,
                            double gamma) {
  if (abar.size() != a.size() || a.size() != ahat.size()) {
    throw DimensionError("uncertainty_membership: size mismatch");
  }
  double budget = 0.0;
  for (Eigen::Index t = 0; t < a.size(); ++t) {
    const double dev = std::abs(abar[t] - a[t]);
    if (ahat[t] == 0.0) {
      if (dev > 0.0) return false;
      continue;
    }
    if (dev > ahat[t] + 1e-12) return false;
    budget += dev / ahat[t];
  }
  return budget <= gamma + 1e-12;
}

Mat robust_primal_eval(const RobustAllocationProblem& problem, const Vec& x) {
  const Dims d = problem.dims();
  if (x.size() != d.nq()) throw DimensionError("robust_primal_eval: x size");
  Mat out = Mat::Zero(d.m, d.q);
  Vec acol(d.n), xcol(d.n);
  for (int j = 0; j < d.m; ++j) {
    for (int l = 0; l < d.q; ++l) {
      double nominal = 0.0;
      for (int i = 0; i < d.n; ++i) {
        nominal += problem.constraints.a[i][j][l] * x[d.xidx(i, l)];
        acol[i] = problem.constraints.ahat[i][j][l];
        xcol[i] = x[d.xidx(i, l)];
      }
      const auto wc = worst_case_greedy(acol, xcol, problem.constraints.gamma[j]);
      out(j, l) = nominal + wc.value - problem.constraints.aggregate_b(j)[l];
    }
  }
  return out;
}

void dual_blocks(const RobustAllocationProblem& problem, const Vec& x,
                 const Vec& Z, const Vec& W, Vec& H1, Vec& H2) {
  const Dims d = problem.dims();
  H1.resize(d.mnq());
  H2.resize(d.mnq());
  for (int i = 0; i < d.n; ++i) {
    for (int j = 0; j < d.m; ++j) {
      const double gj = static_cast<double>(problem.constraints.gamma[j]);
      for (int l = 0; l < d.q; ++l) {
        const int t = d.idx(i, j, l);
        const double ax = problem.constraints.a[i][j][l] * x[d.xidx(i, l)];
        const double ahx = problem.constraints.ahat[i][j][l] * x[d.xidx(i, l)];
        H1[t] = ax + gj / d.n * Z[t] + W[t] - problem.constraints.b[i][j][l];
        H2[t] = ahx - Z[t] - W[t];
      }
    }
  }
}

FeasibilityMargins dual_feasibility_eval(const RobustAllocationProblem& problem,
                                         const Laplacian& laplacian,
                                         const Vec& x, const Vec& Z,
                                         const Vec& W) {
  const Dims d = problem.dims();
  if (x.size() != d.nq() || Z.size() != d.mnq() || W.size() != d.mnq()) {
    throw DimensionError("dual_feasibility_eval: size mismatch");
  }
  Vec H1, H2;
  dual_blocks(problem, x, Z, W, H1, H2);
  FeasibilityMargins out;
  out.G1 = Mat::Zero(d.m, d.q);
  out.G2 = Mat::Zero(d.m, d.q);
  for (int i = 0; i < d.n; ++i) {
    for (int j = 0; j < d.m; ++j) {
      for (int l = 0; l < d.q; ++l) {
        out.G1(j, l) += H1[d.idx(i, j, l)];
        out.G2(j, l) += H2[d.idx(i, j, l)];
      }
    }
  }
  out.consensus_Z = d.mnq() > 0 ? laplacian.mix(Z, d.mq()).norm() : 0.0;
  return out;
}

}  // namespace rra
