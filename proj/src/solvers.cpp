#include "l0scope/solvers.hpp"

#include <cmath>

namespace l0scope {

namespace {

bool is_identity_map(const LinearMap& g) {
  if (g.kind() == LinearMap::Kind::Identity) return true;
  if (g.rows() != g.cols()) return false;
  return g.matrix().isIdentity(0.0);
}

// Minimum-norm unconstrained minimizer of 0.5 x'Qx + c'x, or empty when the
// objective is unbounded below.
bool unconstrained_min(const Matrix& Q, const Vector& c, Vector& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Q);
  const Vector& vals = eig.eigenvalues();
  const Matrix& vecs = eig.eigenvectors();
  const double cut = 1e-12 * std::max(vals.cwiseAbs().maxCoeff(), 1e-30);
  const Vector w = vecs.transpose() * c;
  double kernel_sq = 0.0;
  x = Vector::Zero(Q.rows());
  for (Index i = 0; i < vals.size(); ++i) {
    if (vals[i] > cut)
      x -= (w[i] / vals[i]) * vecs.col(i);
    else
      kernel_sq += w[i] * w[i];
  }
  return std::sqrt(kernel_sq) <= 1e-10 * (1.0 + c.norm());
}

}  // namespace

Vector prox_l0(const Vector& v, double eta, double weight, const ConstraintSet& X) {
  if (!(eta > 0)) throw ValidationError("prox step eta must be positive");
  if (X.dim() != v.size()) throw ValidationError("prox point does not match constraint set");
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double lo = X.lower()[i];
    const double hi = X.upper()[i];
    const double pi = std::min(std::max(v[i], lo), hi);
    const double cost_keep =
        (pi - v[i]) * (pi - v[i]) / (2.0 * eta) + (pi != 0.0 ? weight : 0.0);
    if (lo <= 0.0 && 0.0 <= hi) {
      const double cost_zero = v[i] * v[i] / (2.0 * eta);
      out[i] = cost_keep < cost_zero - 1e-12 ? pi : 0.0;
    } else {
      out[i] = pi;
    }
  }
  return out;
}

SolverTrace solve_iht(const ProblemInstance& p, const Vector& x0, const IhtOptions& opts) {
  if (!is_identity_map(p.g()))
    throw ValidationError("hard-thresholding gradient steps need g = identity");
  if (x0.size() != p.dim()) throw ValidationError("x0 has the wrong length");

  const double L = p.f1().gradient_lipschitz();
  double eta = opts.eta;
  if (eta <= 0) {
    if (L <= 1e-300) {
      if (p.f1().c().norm() > 0)
        throw ValidationError(
            "f1 has zero curvature and a nonzero linear term: objective "
            "unbounded below, no finite step size exists");
      eta = 1.0;
    } else {
      eta = 0.99 / L;
    }
  } else if (L > 0 && eta > (1.0 + 1e-12) / L) {
    throw ValidationError("step size exceeds 1/L; descent is not guaranteed");
  }

  SolverTrace trace;
  trace.method = SolveMethod::Iht;

  Vector x = p.X().project(x0);
  auto record = [&](long k, const Vector& xk) {
    trace.iterates.push_back({k, xk, evaluate(p, xk, opts.zero_tol, opts.feas_tol)});
  };
  record(0, x);

  int stable = 0;
  int flat = 0;
  Support supp = support_of(p, x, opts.zero_tol);
  for (long k = 1; k <= opts.max_iters; ++k) {
    const Vector v = x - eta * p.f1().gradient(x);
    Vector next = prox_l0(v, eta, p.weight(), p.X());
    const double step = (next - x).cwiseAbs().maxCoeff();
    const Support next_supp = support_of(p, next, opts.zero_tol);

    const double f_prev = trace.iterates.back().f;
    record(k, next);
    const double f_next = trace.iterates.back().f;

    if (step <= opts.step_tol && next_supp == supp)
      ++stable;
    else
      stable = 0;
    if (std::abs(f_next - f_prev) <= 1e-15 * (1.0 + std::abs(f_prev)) &&
        step > opts.step_tol)
      ++flat;
    else
      flat = 0;

    x = std::move(next);
    supp = next_supp;

    if (stable >= opts.patience) {
      trace.converged = true;
      trace.stop_reason = StopReason::Tolerance;
      break;
    }
    if (flat >= 50) {
      trace.stop_reason = StopReason::Stagnation;
      break;
    }
  }
  trace.final = x;
  return trace;
}

SolverTrace solve_pd(const ProblemInstance& p, const Vector& x0, const PdOptions& opts) {
  if (x0.size() != p.dim()) throw ValidationError("x0 has the wrong length");
  if (!(opts.sigma > 1)) throw ValidationError("rho growth factor sigma must exceed 1");
  if (!(opts.rho0 > 0)) throw ValidationError("rho0 must be positive");

  const Matrix& G = p.g().matrix();
  const Matrix GtG = G.transpose() * G;
  const Matrix& Q = p.f1().Q();
  const Vector& c = p.f1().c();
  const double weight = p.weight();

  SolverTrace trace;
  trace.method = SolveMethod::Pd;

  auto record = [&](long k, const Vector& xk) {
    trace.iterates.push_back({k, xk, evaluate(p, xk, opts.zero_tol, opts.feas_tol)});
  };

  auto penalty_value = [&](const Vector& x, const Vector& y, double rho) {
    long nnz = 0;
    for (Index i = 0; i < y.size(); ++i)
      if (y[i] != 0.0) ++nnz;
    return p.f1().value(x) + weight * nnz + 0.5 * rho * (G * x - y).squaredNorm();
  };

  // x-step: minimize f1(x) + (rho/2)||Gx - y||^2 over X, warm-started.
  auto x_step = [&](double rho, const Vector& y, const Vector& warm) -> Vector {
    const Matrix Qp = Q + rho * GtG;
    const Vector cp = c - rho * (G.transpose() * y);
    if (!p.X().is_box()) {
      Vector x;
      if (!unconstrained_min(Qp, cp, x))
        throw PdNotConvergedError("penalty x-step unbounded below", warm, kInf,
                                  static_cast<long>(trace.iterates.size()), trace);
      return x;
    }
    const double tol = opts.qp.kkt_tol_box * (1.0 + rho);
    return solve_box_qp(Qp, cp, p.X(), warm, tol, opts.qp.max_iters).x;
  };

  auto y_step = [&](const Vector& gx, double rho) {
    Vector y = Vector::Zero(gx.size());
    for (Index i = 0; i < gx.size(); ++i)
      if (0.5 * rho * gx[i] * gx[i] > weight) y[i] = gx[i];
    return y;
  };

  // Start from the unpenalized minimizer of f1 over X so the initial support
  // guess reflects the data rather than x0; fall back to x0 if f1 alone is
  // unbounded (the penalty term can still make later x-steps well-posed).
  Vector x;
  {
    SubproblemSolution base =
        solve_subproblem(p, Support::full(static_cast<int>(p.num_components())), opts.qp);
    x = base.status == SubproblemStatus::Solved ? base.x_star : p.X().project(x0);
  }
  double rho = opts.rho0;
  Vector y = y_step(G * x, rho);

  long k = 0;
  record(k++, x);

  bool met = false;
  while (true) {
    Vector y_prev = y;
    for (long inner = 0; inner < opts.max_alternations; ++inner) {
      const Vector x_prev = x;
      x = x_step(rho, y, x);
      trace.pd_half_steps.push_back({rho, 0, penalty_value(x, y, rho)});
      y = y_step(G * x, rho);
      trace.pd_half_steps.push_back({rho, 1, penalty_value(x, y, rho)});
      record(k++, x);
      const double move = (x - x_prev).cwiseAbs().maxCoeff();
      if (y == y_prev && move <= 1e-9 * (1.0 + x.cwiseAbs().maxCoeff())) break;
      y_prev = y;
    }
    if ((G * x - y).cwiseAbs().maxCoeff() <= opts.pd_tol) {
      met = true;
      break;
    }
    rho *= opts.sigma;
    if (rho > opts.rho_max) break;
  }

  if (!met) {
    trace.final = x;
    throw PdNotConvergedError("penalty decomposition hit rho_max before ||Gx - y|| met pd_tol",
                              x, (G * x - y).cwiseAbs().maxCoeff(), k, trace);
  }

  // Polish: solve Q_{supp(y)} exactly so the final is certifiable.
  std::vector<int> kept;
  for (Index i = 0; i < y.size(); ++i)
    if (y[i] != 0.0) kept.push_back(static_cast<int>(i));
  const Support omega_y(std::move(kept), static_cast<int>(p.num_components()));
  SubproblemSolution polish = solve_subproblem(p, omega_y, opts.qp);
  if (polish.status != SubproblemStatus::Solved) {
    trace.final = x;
    throw PdNotConvergedError("polish subproblem was not solvable", x,
                              (G * x - y).cwiseAbs().maxCoeff(), k, trace);
  }
  x = polish.x_star;
  record(k, x);
  trace.final = x;
  trace.converged = true;
  trace.stop_reason = StopReason::Tolerance;
  return trace;
}

}  // namespace l0scope
