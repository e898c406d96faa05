#pragma once

#include <vector>

#include "l0scope/errors.hpp"
#include "l0scope/subproblem.hpp"

namespace l0scope {

enum class StopReason { Tolerance, MaxIters, Stagnation };
enum class SolveMethod { Iht, Pd };

struct TracePoint {
  long k = 0;
  Vector x;
  double f = 0.0;
};

/// One half-step of the penalty alternation: the penalty objective
/// f1(x) + weight ||y||_0 + (rho/2)||Gx - y||^2 evaluated right after the
/// x-step (phase 0) or the y-step (phase 1).
struct PdHalfStep {
  double rho = 0.0;
  int phase = 0;
  double penalty_value = 0.0;
};

struct SolverTrace {
  std::vector<TracePoint> iterates;
  Vector final;
  bool converged = false;
  StopReason stop_reason = StopReason::MaxIters;
  SolveMethod method = SolveMethod::Iht;
  std::vector<PdHalfStep> pd_half_steps;
};

struct IhtOptions {
  /// Step size; nonpositive means 0.99 / lambda_max(Q). Must be <= 1/L.
  double eta = 0.0;
  double step_tol = 1e-10;
  /// Consecutive small steps with unchanged support required to stop.
  int patience = 5;
  long max_iters = 100000;
  double zero_tol = kDefaultZeroTol;
  double feas_tol = kDefaultFeasTol;
};

struct PdOptions {
  double rho0 = 1.0;
  double sigma = 4.0;
  double rho_max = 1e12;
  /// Outer stop: ||Gx - y||_inf below this.
  double pd_tol = 1e-6;
  long max_alternations = 100;
  SolverOptions qp;
  double zero_tol = kDefaultZeroTol;
  double feas_tol = kDefaultFeasTol;
};

/// Componentwise minimizer of (1/(2 eta))(x_i - v_i)^2 + weight [x_i != 0]
/// over [l_i, u_i]. Cost ties within 1e-12 resolve to 0 (smaller support).
Vector prox_l0(const Vector& v, double eta, double weight, const ConstraintSet& X);

/// Hard-thresholding proximal gradient for g = identity. Stops when the step
/// falls below step_tol with the support unchanged for `patience` iterations.
SolverTrace solve_iht(const ProblemInstance& p, const Vector& x0, const IhtOptions& opts = {});

/// Penalty decomposition for linear g: alternate the quadratic x-step and the
/// thresholding y-step while driving rho up, then polish by solving
/// Q_{supp(y)} exactly. Throws PdNotConvergedError past rho_max.
SolverTrace solve_pd(const ProblemInstance& p, const Vector& x0, const PdOptions& opts = {});

class PdNotConvergedError : public NotConvergedError {
 public:
  PdNotConvergedError(const std::string& message, Vector best, double residual,
                      long iterations, SolverTrace trace)
      : NotConvergedError(message, std::move(best), residual, iterations),
        trace_(std::move(trace)) {}
  const SolverTrace& trace() const { return trace_; }

 private:
  SolverTrace trace_;
};

}  // namespace l0scope
