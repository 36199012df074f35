#pragma once

#include "rra/certify.hpp"
#include "rra/dynamics.hpp"
#include "rra/oracle.hpp"
#include "rra/problem.hpp"

#include <nlohmann/json_fwd.hpp>

#include <iosfwd>
#include <string>

namespace rra {

inline constexpr int kFormatVersion = 1;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Problem instances. Serialization is byte-stable: dump(parse(dump(p))) ==
// dump(p).
nlohmann::ordered_json problem_to_json(const RobustAllocationProblem& problem);
RobustAllocationProblem problem_from_json(const nlohmann::json& j);
std::string dump_problem(const RobustAllocationProblem& problem);
RobustAllocationProblem load_problem(const std::string& text);

// Full swarm states. Loading validates that the stored outputs equal the
// projections of the raw blocks and rejects tampered dumps.
nlohmann::ordered_json state_to_json(const Dims& dims, const SwarmState& state);
SwarmState state_from_json(const RobustAllocationProblem& problem,
                           const nlohmann::json& j);

// Oracle solutions and certification reports.
nlohmann::ordered_json oracle_to_json(const Dims& dims,
                                      const OracleSolution& solution);
nlohmann::ordered_json report_to_json(const CertificationReport& report);
std::string report_table(const CertificationReport& report);

/// Writes the trajectory time series:
/// t, x_<i>_<l>, G1_<j>_<l>, G2_<j>_<l>, V, eq_residual, cons_Z, cons_L1,
/// cons_L2 (indices 1-based, locale-independent formatting).
void write_trajectory_csv(std::ostream& os, const Dims& dims,
                          const Trajectory& trajectory);

}  // namespace rra
