#pragma once

#include "rra/problem.hpp"
#include "rra/types.hpp"

namespace rra {

/// Euclidean projection onto a local set (closed form per variant).
Vec project(const LocalSet& set, const Vec& u);

/// Euclidean projection onto the nonnegative orthant.
Vec project_nonneg(const Vec& u);

/// Objective value f_i(x).
double objective_value(const ObjectiveSpec& objective, const Vec& x);

/// Deterministic subgradient selection: gradient where smooth, the
/// minimum-norm element of the subdifferential at kinks (0 for the l1 part
/// at zero components, 0 for the l2 norm at its anchor).
Vec subgradient(const ObjectiveSpec& objective, const Vec& x);

/// Normal-cone membership residual via the projection fixed point
/// x = P(x + v)  <=>  v in N(x), evaluated at x = P(u).
/// Returns ||P(x + v_candidate) - x||; zero iff v_candidate is normal at x.
double projection_variational_residual(const LocalSet& set, const Vec& u,
                                       const Vec& v_candidate);
double projection_variational_residual_nonneg(const Vec& u,
                                              const Vec& v_candidate);

/// Distance version of the stationarity test for condition "0 in
/// df(x) + g_rest + N(x)": minimizes ||P(x - df - g_rest) - x|| over the
/// subdifferential df of the objective at x. For smooth points this equals
/// the plain fixed-point residual with the gradient; at l1 kinks the
/// per-component interval [g-1, g+1] is searched, at the l2-norm anchor the
/// unit ball is searched.
double stationarity_residual(const ObjectiveSpec& objective,
                             const LocalSet& set, const Vec& x,
                             const Vec& g_rest);

/// The subdifferential element realizing stationarity_residual.
Vec minimizing_subgradient(const ObjectiveSpec& objective, const LocalSet& set,
                           const Vec& x, const Vec& g_rest);

}  // namespace rra
