#pragma once

#include "rra/problem.hpp"
#include "rra/types.hpp"

#include <vector>

namespace rra {

/// Result of the inner worst-case maximization over agent subsets of exact
/// size gamma for one (constraint, component) pair.
struct WorstCaseResult {
  double value = 0.0;
  std::vector<int> chosen;  // 0-based agent indices, ascending
};

/// Exact optimum of  max_{|S| = gamma} sum_{i in S} ahat_i * x_i  by sorting
/// the products descending (ties broken by lowest agent index). The sum is
/// accumulated in ascending agent order so it is bit-identical to the
/// brute-force oracle on the same subset.
WorstCaseResult worst_case_greedy(const Vec& ahat_col, const Vec& x_col,
                                  int gamma);

/// Enumerates all C(n, gamma) subsets (n <= 20). Test oracle for the greedy.
WorstCaseResult worst_case_bruteforce(const Vec& ahat_col, const Vec& x_col,
                                      int gamma);

/// Membership of a realized coefficient vector in the budget uncertainty
/// set: |abar - a| <= ahat componentwise and sum |abar - a| / ahat <= gamma,
/// entries with ahat = 0 requiring abar = a and contributing zero.
bool uncertainty_membership(const Vec& abar, const Vec& a, const Vec& ahat,
                            double gamma);

/// Worst-case constraint values of the robust counterpart, one scalar per
/// (j, l):  sum_i a_ij^l x_i^l + worst_case(ahat, x, gamma_j) - b_j^l.
/// Nonpositive entries mean robust feasibility in that coordinate.
Mat robust_primal_eval(const RobustAllocationProblem& problem, const Vec& x);

/// Aggregated dual-form constraint values and the Z-consensus marker.
struct FeasibilityMargins {
  Mat G1;  // m x q: sum_i [A_ij x_i + (gamma_j/n) z_ij + w_ij - b_ij]
  Mat G2;  // m x q: sum_i [Ahat_ij x_i - z_ij - w_ij]
  double consensus_Z = 0.0;  // || (L (x) I) Z ||
};

FeasibilityMargins dual_feasibility_eval(const RobustAllocationProblem& problem,
                                         const Laplacian& laplacian,
                                         const Vec& x, const Vec& Z,
                                         const Vec& W);

/// Per-agent dual constraint blocks H1_ij = A_ij x_i + (gamma_j/n) z_ij +
/// w_ij - b_ij and H2_ij = Ahat_ij x_i - z_ij - w_ij, stacked as mnq vectors.
void dual_blocks(const RobustAllocationProblem& problem, const Vec& x,
                 const Vec& Z, const Vec& W, Vec& H1, Vec& H2);

}  // namespace rra
