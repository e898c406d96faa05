#pragma once

#include <cstdint>

#include "l0scope/enumerate.hpp"
#include "l0scope/subproblem.hpp"

namespace l0scope {

enum class Verdict { Critical, NotCritical };

/// Witness of 0 ∈ ∇f1(xbar) + G_{omega^c}' λ + N_X(xbar), or its refutation.
/// The normal cone of a box at xbar is represented by the sign-constrained
/// vector nu; lambda carries the multipliers of the pinned g components,
/// ordered like omega_bar.complement().indices().
struct CriticalityCertificate {
  Vector xbar;
  Support omega_bar;
  Vector lambda;
  Vector nu;
  double residual = kInf;
  double grad_norm = 0.0;
  Verdict verdict = Verdict::NotCritical;
  bool feasible = true;
  long iterations = 0;
};

struct CertifyOptions {
  /// Critical iff residual <= crit_tol * (1 + ||grad f1(xbar)||).
  double crit_tol = 1e-8;
  /// Box face is treated active when within this distance of the bound.
  double active_tol = 1e-9;
  double zero_tol = kDefaultZeroTol;
  double feas_tol = kDefaultFeasTol;
  long max_iters = 500000;
};

/// Least-squares membership test for 0 ∈ ∂f(xbar). All-space constraint sets
/// reduce to a plain projection onto the row space of G_{omega^c}; boxes add
/// the sign-constrained nu, solved by projected gradient from zero.
CriticalityCertificate certify_critical(const ProblemInstance& p, const Vector& xbar,
                                        const CertifyOptions& opts = {});

struct TheoremCheckOptions {
  SolverOptions solver;
  /// Negative radius means: use min(0.9 * support_stability_radius, 0.1).
  double radius = -1.0;
  long samples = 1000;
  std::uint64_t rng_seed = 0;
  double f1_gap_tol = 1e-8;
  double zero_tol = kDefaultZeroTol;
  double feas_tol = kDefaultFeasTol;
};

/// Independent confirmation that a certified-critical point behaves like a
/// local minimizer: it must solve Q_{omega_bar} up to f1_gap_tol and survive
/// sampling refutation. A critical point failing either is flagged as a hard
/// inconsistency (it would contradict the certificate).
struct TheoremCheck {
  SubproblemStatus subproblem_status = SubproblemStatus::Solved;
  double f1_at_point = 0.0;
  double f1_star = 0.0;
  double f1_gap = 0.0;
  bool solves_subproblem = false;
  SamplingResult sampling;
  bool survives_sampling = false;
  double radius_used = 0.0;
  bool consistent = false;
};

TheoremCheck verify_theorem_crlo(const ProblemInstance& p, const Vector& xbar,
                                 const TheoremCheckOptions& opts = {});

/// min over i in supp of |g_i(xbar)| / ||G_i||: within this radius the support
/// of g can only grow, so the l0 term either stays put or jumps by a full
/// weight. +inf when the support is empty.
double support_stability_radius(const ProblemInstance& p, const Vector& xbar,
                                double zero_tol = kDefaultZeroTol);

}  // namespace l0scope
