#include "l0scope/certify.hpp"

#include <algorithm>
#include <cmath>

#include "l0scope/errors.hpp"

namespace l0scope {

namespace {

enum class NuSign { Fixed, NonNegative, NonPositive, Free };

Vector clamp_nu(const Vector& nu, const std::vector<NuSign>& signs) {
  Vector out = nu;
  for (Index i = 0; i < out.size(); ++i) {
    switch (signs[i]) {
      case NuSign::Fixed:
        out[i] = 0.0;
        break;
      case NuSign::NonNegative:
        out[i] = std::max(out[i], 0.0);
        break;
      case NuSign::NonPositive:
        out[i] = std::min(out[i], 0.0);
        break;
      case NuSign::Free:
        break;
    }
  }
  return out;
}

}  // namespace

CriticalityCertificate certify_critical(const ProblemInstance& p, const Vector& xbar,
                                        const CertifyOptions& opts) {
  CriticalityCertificate cert;
  cert.xbar = xbar;
  cert.omega_bar = support_of(p, xbar, opts.zero_tol);
  const Vector grad = gradient_f1(p, xbar);
  cert.grad_norm = grad.norm();
  cert.nu = Vector::Zero(p.dim());

  if (!p.X().contains(xbar, opts.feas_tol)) {
    cert.feasible = false;
    cert.verdict = Verdict::NotCritical;
    cert.residual = kInf;
    cert.lambda = Vector::Zero(cert.omega_bar.complement().size());
    return cert;
  }

  const Support comp = cert.omega_bar.complement();
  const Matrix Gc = p.g().rows_of(comp);
  const Index mc = Gc.rows();
  const Index n = p.dim();

  if (!p.X().is_box()) {
    // Plain least squares onto the row space of Gc.
    if (mc == 0) {
      cert.lambda = Vector(0);
      cert.residual = cert.grad_norm;
    } else {
      cert.lambda = Gc.transpose()
                        .colPivHouseholderQr()
                        .solve(-grad)
                        .eval();
      cert.residual = (grad + Gc.transpose() * cert.lambda).norm();
    }
    cert.verdict = cert.residual <= opts.crit_tol * (1.0 + cert.grad_norm)
                       ? Verdict::Critical
                       : Verdict::NotCritical;
    return cert;
  }

  // Box: the normal cone constrains the sign of nu on active faces.
  std::vector<NuSign> signs(n, NuSign::Fixed);
  for (Index i = 0; i < n; ++i) {
    const bool at_lower = xbar[i] <= p.X().lower()[i] + opts.active_tol;
    const bool at_upper = xbar[i] >= p.X().upper()[i] - opts.active_tol;
    if (at_lower && at_upper)
      signs[i] = NuSign::Free;
    else if (at_lower)
      signs[i] = NuSign::NonPositive;
    else if (at_upper)
      signs[i] = NuSign::NonNegative;
  }

  // minimize 0.5 || grad + Gc' lambda + nu ||^2 over the sign orthant,
  // projected gradient with step 1/L, zero start.
  Vector lambda = Vector::Zero(mc);
  Vector nu = Vector::Zero(n);

  double lip = 1.0;
  if (mc > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Gc * Gc.transpose(), Eigen::EigenvaluesOnly);
    // Hessian of the joint problem is [[Gc Gc', Gc],[Gc', I]]; bound its
    // spectrum by the sum of the block norms.
    lip = std::max(eig.eigenvalues().maxCoeff(), 0.0) + 2.0;
  }
  const double eta = 1.0 / lip;

  auto residual_vec = [&](const Vector& la, const Vector& nv) -> Vector {
    Vector r = grad + nv;
    if (mc > 0) r += Gc.transpose() * la;
    return r;
  };

  const double stop_tol = 1e-13 * (1.0 + cert.grad_norm);
  long k = 0;
  for (; k < opts.max_iters; ++k) {
    const Vector r = residual_vec(lambda, nu);
    Vector glambda = mc > 0 ? Vector(Gc * r) : Vector(0);
    const Vector next_lambda = lambda - eta * glambda;
    const Vector next_nu = clamp_nu(nu - eta * r, signs);
    const double move = std::max(mc > 0 ? (next_lambda - lambda).cwiseAbs().maxCoeff() : 0.0,
                                 (next_nu - nu).cwiseAbs().maxCoeff());
    lambda = next_lambda;
    nu = next_nu;
    if (move <= eta * stop_tol) break;
  }
  if (k >= opts.max_iters) {
    throw NotConvergedError("criticality least-squares did not converge",
                            residual_vec(lambda, nu), residual_vec(lambda, nu).norm(), k);
  }

  cert.lambda = lambda;
  cert.nu = nu;
  cert.residual = residual_vec(lambda, nu).norm();
  cert.iterations = k;
  cert.verdict = cert.residual <= opts.crit_tol * (1.0 + cert.grad_norm)
                     ? Verdict::Critical
                     : Verdict::NotCritical;
  return cert;
}

TheoremCheck verify_theorem_crlo(const ProblemInstance& p, const Vector& xbar,
                                 const TheoremCheckOptions& opts) {
  TheoremCheck check;
  const Support omega_bar = support_of(p, xbar, opts.zero_tol);
  SubproblemSolution sol = solve_subproblem(p, omega_bar, opts.solver);
  check.subproblem_status = sol.status;
  check.f1_at_point = p.f1().value(xbar);
  if (sol.status == SubproblemStatus::Solved) {
    check.f1_star = sol.f1_star;
    check.f1_gap = check.f1_at_point - sol.f1_star;
    check.solves_subproblem = check.f1_gap <= opts.f1_gap_tol;
  }

  double radius = opts.radius;
  if (radius <= 0) {
    radius = std::min(0.9 * support_stability_radius(p, xbar, opts.zero_tol), 0.1);
    if (!(radius > 0)) radius = 0.1;
  }
  check.radius_used = radius;
  check.sampling = verify_local_by_sampling(p, xbar, radius, opts.samples, opts.rng_seed,
                                            opts.zero_tol, opts.feas_tol);
  check.survives_sampling = check.sampling.verdict == SamplingVerdict::NotRefuted;
  check.consistent = check.solves_subproblem && check.survives_sampling;
  return check;
}

double support_stability_radius(const ProblemInstance& p, const Vector& xbar,
                                double zero_tol) {
  const Support supp = support_of(p, xbar, zero_tol);
  if (supp.empty()) return kInf;
  const Vector gx = p.g().apply(xbar);
  double r = kInf;
  for (int i : supp.indices()) {
    const double row_norm = p.g().matrix().row(i).norm();
    r = std::min(r, std::abs(gx[i]) / row_norm);
  }
  return r;
}

}  // namespace l0scope
