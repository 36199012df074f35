#include "rra/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rra {

Vec project(const LocalSet& set, const Vec& u) {
  if (u.size() != set.dim()) {
    throw DimensionError("project: vector does not match set dimension");
  }
  switch (set.kind) {
    case LocalSet::Kind::Ball: {
      const Vec d = u - set.center;
      const double dist = d.norm();
      if (dist <= set.radius) return u;
      return set.center + (set.radius / dist) * d;
    }
    case LocalSet::Kind::Box:
      return u.cwiseMax(set.lower).cwiseMin(set.upper);
    case LocalSet::Kind::Nonneg:
      return u.cwiseMax(0.0);
    case LocalSet::Kind::WholeSpace:
      return u;
  }
  return u;
}

Vec project_nonneg(const Vec& u) { return u.cwiseMax(0.0); }

double objective_value(const ObjectiveSpec& objective, const Vec& x) {
  const Vec d = x - objective.p;
  switch (objective.kind) {
    case ObjectiveSpec::Kind::Quadratic:
      return d.squaredNorm();
    case ObjectiveSpec::Kind::QuadraticPlusL1:
      return d.squaredNorm() + x.lpNorm<1>();
    case ObjectiveSpec::Kind::L2Norm:
      return d.norm();
  }
  return 0.0;
}

Vec subgradient(const ObjectiveSpec& objective, const Vec& x) {
  const Vec d = x - objective.p;
  switch (objective.kind) {
    case ObjectiveSpec::Kind::Quadratic:
      return 2.0 * d;
    case ObjectiveSpec::Kind::QuadraticPlusL1: {
      Vec g = 2.0 * d;
      for (Eigen::Index l = 0; l < x.size(); ++l) {
        if (x[l] > 0.0) g[l] += 1.0;
        else if (x[l] < 0.0) g[l] -= 1.0;
        // zero component: minimum-norm element, nothing added
      }
      return g;
    }
    case ObjectiveSpec::Kind::L2Norm: {
      const double nd = d.norm();
      if (nd == 0.0) return Vec::Zero(x.size());
      return d / nd;
    }
  }
  return Vec::Zero(x.size());
}

double projection_variational_residual(const LocalSet& set, const Vec& u,
                                       const Vec& v_candidate) {
  const Vec x = project(set, u);
  return (project(set, x + v_candidate) - x).norm();
}

double projection_variational_residual_nonneg(const Vec& u,
                                              const Vec& v_candidate) {
  const Vec x = project_nonneg(u);
  return (project_nonneg(x + v_candidate) - x).norm();
}

namespace {

double fixed_point_residual(const LocalSet& set, const Vec& x, const Vec& g) {
  return (project(set, x - g) - x).norm();
}

}  // namespace

Vec minimizing_subgradient(const ObjectiveSpec& objective, const LocalSet& set,
                           const Vec& x, const Vec& g_rest) {
  const Vec g0 = subgradient(objective, x);
  if (objective.kind == ObjectiveSpec::Kind::Quadratic) return g0;

  if (objective.kind == ObjectiveSpec::Kind::QuadraticPlusL1) {
    // At zero components the l1 subdifferential is the interval [-1, 1];
    // minimize the residual over the free coordinates by ternary search
    // (the residual is convex in the subgradient choice).
    std::vector<Eigen::Index> kinks;
    for (Eigen::Index l = 0; l < x.size(); ++l) {
      if (x[l] == 0.0) kinks.push_back(l);
    }
    if (kinks.empty()) return g0;

    Vec s = Vec::Zero(static_cast<Eigen::Index>(kinks.size()));
    auto eval = [&](const Vec& sv) {
      Vec gg = g0 + g_rest;
      for (size_t t = 0; t < kinks.size(); ++t) gg[kinks[t]] += sv[t];
      return fixed_point_residual(set, x, gg);
    };
    for (int sweep = 0; sweep < 8; ++sweep) {
      for (size_t t = 0; t < kinks.size(); ++t) {
        double lo = -1.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
          const double m1 = lo + (hi - lo) / 3.0;
          const double m2 = hi - (hi - lo) / 3.0;
          Vec s1 = s, s2 = s;
          s1[t] = m1;
          s2[t] = m2;
          if (eval(s1) <= eval(s2)) hi = m2;
          else lo = m1;
        }
        s[t] = 0.5 * (lo + hi);
      }
    }
    Vec g = g0;
    for (size_t t = 0; t < kinks.size(); ++t) g[kinks[t]] += s[t];
    return g;
  }

  // L2Norm: away from the anchor the gradient is unique; at the anchor the
  // subdifferential is the unit ball, searched toward the residual-minimizing
  // direction.
  if ((x - objective.p).norm() > 0.0) return g0;
  const double nr = g_rest.norm();
  Vec best = Vec::Zero(x.size());
  double best_r = fixed_point_residual(set, x, g_rest);
  if (nr > 0.0) {
    const Vec dir = -g_rest / nr;
    for (double t : {0.25, 0.5, 0.75, 1.0, std::min(nr, 1.0)}) {
      const double r = fixed_point_residual(set, x, g_rest + t * dir);
      if (r < best_r) {
        best_r = r;
        best = t * dir;
      }
    }
  }
  return best;
}

double stationarity_residual(const ObjectiveSpec& objective,
                             const LocalSet& set, const Vec& x,
                             const Vec& g_rest) {
  const Vec df = minimizing_subgradient(objective, set, x, g_rest);
  return fixed_point_residual(set, x, df + g_rest);
}

}  // namespace rra
