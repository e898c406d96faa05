#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "l0scope/subproblem.hpp"

namespace l0scope {

struct LandscapeEntry {
  Vector x;
  /// The support whose subproblem produced x.
  Support omega_solved;
  /// The support actually realized by x; a subset of omega_solved.
  Support supp_actual;
  double f_value = 0.0;
  double kkt_residual = 0.0;
};

/// The complete set of local minimizers, one representative per distinct
/// solved-subproblem solution.
struct LandscapeReport {
  std::vector<LandscapeEntry> minimizers;
  std::size_t global_min = 0;
  long num_subproblems_solved = 0;
  long num_subproblems_total = 0;
  double dedup_tol = 1e-7;
  std::vector<std::string> warnings;
};

struct EnumerateOptions {
  SolverOptions solver;
  double dedup_tol = 1e-7;
  /// Refuse instances with more g components than this (2^M subproblems).
  int max_components = 24;
  double zero_tol = kDefaultZeroTol;
  double feas_tol = kDefaultFeasTol;
};

/// Solves every subproblem Q_omega, omega ⊆ {0..M-1}, and collects the union
/// of their solutions. Supports are visited in ascending bitmask order and
/// the reduction is order-deterministic, so reports are byte-stable.
LandscapeReport enumerate_landscape(const ProblemInstance& p,
                                    const EnumerateOptions& opts = {});

enum class SamplingVerdict { Refuted, NotRefuted };

struct SamplingResult {
  SamplingVerdict verdict = SamplingVerdict::NotRefuted;
  double f_center = 0.0;
  /// Filled when refuted: a feasible point in the ball with strictly lower f.
  Vector witness;
  double f_witness = 0.0;
  long samples_drawn = 0;
};

/// Monte-Carlo refutation of local minimality: samples the feasible ball
/// {x in X : ||x - xbar|| <= radius} and reports a witness with
/// f(x) < f(xbar) - 1e-10 if one is found.
SamplingResult verify_local_by_sampling(const ProblemInstance& p, const Vector& xbar,
                                        double radius, long samples,
                                        std::uint64_t rng_seed,
                                        double zero_tol = kDefaultZeroTol,
                                        double feas_tol = kDefaultFeasTol);

}  // namespace l0scope
