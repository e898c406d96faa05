#include "l0scope/subproblem.hpp"

#include <Eigen/SVD>

#include <cmath>

#include "l0scope/errors.hpp"

namespace l0scope {

namespace {

// Eigendecomposition-based minimum-norm solve of H z = -b for PSD H.
// Returns false when the equations are inconsistent (objective unbounded).
bool min_norm_psd_solve(const Matrix& H, const Vector& b, Vector& z) {
  if (H.rows() == 0) {
    z.resize(0);
    return true;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(H);
  const Vector& vals = eig.eigenvalues();
  const Matrix& vecs = eig.eigenvectors();
  const double cut = 1e-12 * std::max(vals.cwiseAbs().maxCoeff(), 1e-30);
  const Vector w = vecs.transpose() * b;
  double kernel_residual_sq = 0.0;
  z = Vector::Zero(H.rows());
  for (Index i = 0; i < vals.size(); ++i) {
    if (vals[i] > cut) {
      z -= (w[i] / vals[i]) * vecs.col(i);
    } else {
      kernel_residual_sq += w[i] * w[i];
    }
  }
  return std::sqrt(kernel_residual_sq) <= 1e-10 * (1.0 + b.norm());
}

// True when every listed row of G has at most one nonzero entry, i.e. the
// constraints g_i(x) = 0 just pin coordinates to zero. `pinned` collects the
// affected coordinates.
bool rows_pin_coordinates(const Matrix& Gc, std::vector<Index>& pinned) {
  std::vector<bool> seen(Gc.cols(), false);
  for (Index r = 0; r < Gc.rows(); ++r) {
    Index nnz = 0, where = -1;
    for (Index j = 0; j < Gc.cols(); ++j) {
      if (Gc(r, j) != 0.0) {
        ++nnz;
        where = j;
      }
    }
    if (nnz > 1) return false;
    if (nnz == 1 && !seen[where]) {
      seen[where] = true;
      pinned.push_back(where);
    }
  }
  return true;
}

double box_gradient_mapping_norm(const Vector& x, const Vector& grad,
                                 const ConstraintSet& X) {
  return (x - X.project(x - grad)).norm();
}

// Projected gradient over a plain box. Used for the pinned-coordinate fast
// path (with pinned coords removed beforehand) and for feasibility probing.
BoxQpResult box_projected_gradient(const Matrix& Q, const Vector& c, const ConstraintSet& X,
                                   Vector x, double lipschitz, double tol, long max_iters,
                                   const std::function<void(long, const Vector&)>& on_iterate = {}) {
  BoxQpResult res;
  const double eta = 1.0 / std::max(lipschitz, 1e-12);
  x = X.project(x);
  Vector grad = Q * x + c;
  for (long k = 0; k < max_iters; ++k) {
    const double r = box_gradient_mapping_norm(x, grad, X);
    if (r <= tol) {
      res.x = x;
      res.mapping_norm = r;
      res.iterations = k;
      res.converged = true;
      return res;
    }
    x = X.project(x - eta * grad);
    grad = Q * x + c;
    if (on_iterate) on_iterate(k + 1, x);
    if (x.cwiseAbs().maxCoeff() > 1e13)
      throw NotConvergedError("projected gradient diverged (objective unbounded on the box?)",
                              x, box_gradient_mapping_norm(x, grad, X), k);
  }
  res.x = x;
  res.mapping_norm = box_gradient_mapping_norm(x, grad, X);
  res.iterations = max_iters;
  res.converged = res.mapping_norm <= tol;
  return res;
}

}  // namespace

BoxQpResult solve_box_qp(const Matrix& Q, const Vector& c, const ConstraintSet& X,
                         const Vector& x_start, double tol, long max_iters) {
  double lip = 0.0;
  if (Q.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Q, Eigen::EigenvaluesOnly);
    lip = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  }
  return box_projected_gradient(Q, c, X, x_start, lip, tol, max_iters);
}

NullspaceBasis nullspace_of(const LinearMap& g, const Support& omega) {
  const Index n = g.cols();
  NullspaceBasis basis;
  basis.x0 = Vector::Zero(n);
  const Support comp = omega.complement();
  if (comp.empty()) {
    basis.Z = Matrix::Identity(n, n);
    return basis;
  }
  const Matrix Gc = g.rows_of(comp);
  Eigen::JacobiSVD<Matrix> svd(Gc, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-12 * smax) ++rank;
  basis.Z = svd.matrixV().rightCols(n - rank);
  return basis;
}

Vector project_box_subspace(const Vector& v, const Matrix& Z, const ConstraintSet& X,
                            double tol, long max_iters) {
  if (!X.is_box()) return Z * (Z.transpose() * v);
  const double scale = 1.0 + v.cwiseAbs().maxCoeff();
  Vector x = v;
  Vector p = Vector::Zero(v.size());
  Vector q = Vector::Zero(v.size());
  Vector y = x;
  double best_viol = kInf;
  Vector best = y;
  for (long k = 0; k < max_iters; ++k) {
    y = Z * (Z.transpose() * (x + p));
    p = x + p - y;
    const Vector xb = X.project(y + q);
    q = y + q - xb;
    x = xb;
    const double viol = (y - X.project(y)).cwiseAbs().maxCoeff();
    if (viol < best_viol) {
      best_viol = viol;
      best = y;
    }
    if (viol <= tol * scale) return y;
  }
  return best;
}

SubproblemSolution solve_subproblem(const ProblemInstance& p, const Support& omega,
                                    const SolverOptions& opts) {
  if (omega.ground_size() != p.num_components())
    throw ValidationError("support ground size does not match the number of g components");

  const Index n = p.dim();
  const Matrix& Q = p.f1().Q();
  const Vector& c = p.f1().c();
  const Support comp = omega.complement();
  const Matrix Gc = p.g().rows_of(comp);

  SubproblemSolution sol;
  sol.omega = omega;

  auto finish = [&](Vector x, double kkt_residual, long iterations) {
    sol.x_star = std::move(x);
    sol.f1_star = p.f1().value(sol.x_star);
    sol.f_star = sol.f1_star +
                 p.weight() * support_of(p.g(), sol.x_star, opts.zero_tol).size();
    sol.kkt_residual = kkt_residual;
    sol.iterations = iterations;
    sol.status = SubproblemStatus::Solved;
    return sol;
  };

  if (!p.X().is_box()) {
    const NullspaceBasis basis = nullspace_of(p.g(), omega);
    const Matrix& Z = basis.Z;
    if (Z.cols() == 0) return finish(Vector::Zero(n), 0.0, 0);
    const Matrix H = Z.transpose() * Q * Z;
    const Vector b = Z.transpose() * c;
    Vector z;
    if (!min_norm_psd_solve(H, b, z)) {
      sol.status = SubproblemStatus::UnboundedBelow;
      return sol;
    }
    Vector x = Z * z;
    const double res = (Z.transpose() * (Q * x + c)).norm();
    return finish(std::move(x), res, 0);
  }

  // Box-constrained branch.
  const ConstraintSet& X = p.X();

  std::vector<Index> pinned;
  if (rows_pin_coordinates(Gc, pinned)) {
    // The constraints just fix coordinates to zero: reduce to a box QP over
    // the free coordinates.
    for (Index j : pinned)
      if (X.lower()[j] > opts.feas_tol || X.upper()[j] < -opts.feas_tol) {
        sol.status = SubproblemStatus::Infeasible;
        return sol;
      }
    std::vector<bool> is_pinned(n, false);
    for (Index j : pinned) is_pinned[j] = true;
    std::vector<Index> free;
    for (Index j = 0; j < n; ++j)
      if (!is_pinned[j]) free.push_back(j);

    const Index m = static_cast<Index>(free.size());
    Matrix Qf(m, m);
    Vector cf(m), lof(m), upf(m);
    for (Index a = 0; a < m; ++a) {
      cf[a] = c[free[a]];
      lof[a] = X.lower()[free[a]];
      upf[a] = X.upper()[free[a]];
      for (Index b2 = 0; b2 < m; ++b2) Qf(a, b2) = Q(free[a], free[b2]);
    }
    if (m == 0) return finish(Vector::Zero(n), 0.0, 0);
    const ConstraintSet Xf = ConstraintSet::box(lof, upf);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Qf, Eigen::EigenvaluesOnly);
    const double lip = std::max(eig.eigenvalues().maxCoeff(), 0.0);
    std::function<void(long, const Vector&)> observer;
    if (opts.on_iterate) {
      observer = [&](long k, const Vector& xr) {
        Vector xf = Vector::Zero(n);
        for (Index a = 0; a < m; ++a) xf[free[a]] = xr[a];
        opts.on_iterate(k, xf, p.f1().value(xf));
      };
    }
    BoxQpResult r = box_projected_gradient(Qf, cf, Xf, Vector::Zero(m), lip,
                                           opts.kkt_tol_box, opts.max_iters, observer);
    Vector x = Vector::Zero(n);
    for (Index a = 0; a < m; ++a) x[free[a]] = r.x[a];
    if (!r.converged)
      throw NotConvergedError("box subproblem did not reach kkt_tol", x,
                              r.mapping_norm, r.iterations);
    return finish(std::move(x), r.mapping_norm, r.iterations);
  }

  // General subspace: project onto box ∩ C_omega with Dykstra inside
  // projected gradient.
  const NullspaceBasis basis = nullspace_of(p.g(), omega);
  const Matrix& Z = basis.Z;

  if (Z.cols() == 0) {
    if (!X.contains(Vector::Zero(n), opts.feas_tol)) {
      sol.status = SubproblemStatus::Infeasible;
      return sol;
    }
    return finish(Vector::Zero(n), 0.0, 0);
  }

  Vector x0 = Vector::Zero(n);
  if (!X.contains(x0, opts.feas_tol)) {
    // Probe feasibility: minimize 0.5||Gc x||^2 over the box alone.
    const Matrix P = Gc.transpose() * Gc;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(P, Eigen::EigenvaluesOnly);
    const double lip = std::max(eig.eigenvalues().maxCoeff(), 0.0);
    BoxQpResult probe = box_projected_gradient(P, Vector::Zero(n), X, X.project(x0), lip,
                                               1e-11, opts.max_iters);
    if ((Gc * probe.x).cwiseAbs().maxCoeff() > opts.feas_tol) {
      sol.status = SubproblemStatus::Infeasible;
      return sol;
    }
    x0 = project_box_subspace(probe.x, Z, X);
  }

  const Matrix H = Z.transpose() * Q * Z;
  double lip = 0.0;
  if (H.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(H, Eigen::EigenvaluesOnly);
    lip = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  }
  const double eta = 1.0 / std::max(lip, 1e-12);

  auto intersection_mapping_norm = [&](const Vector& x, const Vector& grad) {
    return (x - project_box_subspace(x - grad, Z, X)).norm();
  };

  Vector x = x0;
  Vector grad = Q * x + c;
  double res = intersection_mapping_norm(x, grad);
  long k = 0;
  for (; k < opts.max_iters && res > opts.kkt_tol_box; ++k) {
    x = project_box_subspace(x - eta * grad, Z, X);
    grad = Q * x + c;
    if (opts.on_iterate) opts.on_iterate(k + 1, x, p.f1().value(x));
    // The mapping norm costs a Dykstra run; refresh it sparsely.
    if (k % 8 == 7 || k + 1 == opts.max_iters) res = intersection_mapping_norm(x, grad);
    if (x.cwiseAbs().maxCoeff() > 1e13)
      throw NotConvergedError("projected gradient diverged on box ∩ C_omega", x, res, k);
  }
  res = intersection_mapping_norm(x, grad);
  if (res > opts.kkt_tol_box)
    throw NotConvergedError("subproblem projected gradient did not reach kkt_tol", x, res, k);
  return finish(std::move(x), res, k);
}

}  // namespace l0scope
