#pragma once

#include <functional>

#include "l0scope/problem.hpp"

namespace l0scope {

/// Orthonormal basis Z of ker(G_{omega^c}); C_omega = { Z z : z in R^k }.
/// x0 is a particular point of C_omega (always the origin for linear g).
struct NullspaceBasis {
  Matrix Z;
  Vector x0;
};

/// Columns of Z orthonormal, spanning the kernel of the rows of G outside
/// omega. omega^c empty yields Z = I.
NullspaceBasis nullspace_of(const LinearMap& g, const Support& omega);

enum class SubproblemStatus { Solved, UnboundedBelow, Infeasible };

struct SubproblemSolution {
  Support omega;
  SubproblemStatus status = SubproblemStatus::Solved;
  Vector x_star;
  double f1_star = 0.0;
  /// f1_star + weight * ||g(x_star)||_0
  double f_star = 0.0;
  /// Reduced-gradient norm (all-space) or projected-gradient mapping norm (box).
  double kkt_residual = 0.0;
  long iterations = 0;
};

struct SolverOptions {
  double kkt_tol_eq = 1e-10;
  double kkt_tol_box = 1e-8;
  double feas_tol = 1e-9;
  double zero_tol = kDefaultZeroTol;
  long max_iters = 200000;
  /// Invoked as (iteration, x, f1(x)) after every projected-gradient step.
  std::function<void(long, const Vector&, double)> on_iterate;
};

/// Exact solve of Q_omega: minimize f1 over X intersected with C_omega.
///
/// All-space X reduces to the nullspace coordinates and returns the
/// minimum-norm solution of the reduced normal equations, or UnboundedBelow
/// when they are inconsistent. Box X runs projected gradient on the
/// intersection, with Infeasible reported when the box misses C_omega.
/// Throws NotConvergedError when the box iteration exhausts max_iters.
SubproblemSolution solve_subproblem(const ProblemInstance& p, const Support& omega,
                                    const SolverOptions& opts = {});

/// Euclidean projection onto box `X` intersected with range(Z) (Z orthonormal)
/// by Dykstra's alternating scheme. The result lies exactly in range(Z) and in
/// the box up to `tol`.
Vector project_box_subspace(const Vector& v, const Matrix& Z, const ConstraintSet& X,
                            double tol = 1e-13, long max_iters = 20000);

struct BoxQpResult {
  Vector x;
  double mapping_norm = 0.0;
  long iterations = 0;
  bool converged = false;
};

/// Projected gradient for min 0.5 x'Qx + c'x over a box, warm-started at
/// x_start (projected if outside). Descends monotonically; `converged` is
/// false when max_iters ran out before the unit-step gradient mapping norm
/// dropped below tol.
BoxQpResult solve_box_qp(const Matrix& Q, const Vector& c, const ConstraintSet& X,
                         const Vector& x_start, double tol, long max_iters);

}  // namespace l0scope
