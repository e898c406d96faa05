// Independent reference computations the tests check the library against.
// Everything here is deliberately brute force and shares no code path with
// the implementations under test.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "l0scope/problem.hpp"
#include "l0scope/random.hpp"

namespace oracles {

using l0scope::ConstraintSet;
using l0scope::Index;
using l0scope::LinearMap;
using l0scope::Matrix;
using l0scope::ProblemInstance;
using l0scope::QuadraticTerm;
using l0scope::Rng;
using l0scope::Support;
using l0scope::Vector;

// Central finite differences of a scalar function.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                          double h = 1e-6) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    Vector hi = x, lo = x;
    hi[i] += h;
    lo[i] -= h;
    g[i] = (f(hi) - f(lo)) / (2.0 * h);
  }
  return g;
}

// Dense grid minimization of f1 over a finite box with the coordinates listed
// in `pinned` held at zero. Returns the best value found.
inline double grid_min_f1(const QuadraticTerm& f1, const ConstraintSet& X,
                          const std::vector<Index>& pinned, double pitch) {
  const Index n = f1.dim();
  std::vector<bool> is_pinned(n, false);
  for (Index j : pinned) is_pinned[j] = true;

  std::vector<std::vector<double>> axes(n);
  for (Index j = 0; j < n; ++j) {
    if (is_pinned[j]) {
      axes[j] = {0.0};
      continue;
    }
    const double lo = X.lower()[j];
    const double hi = X.upper()[j];
    for (double v = lo; v <= hi + 1e-12; v += pitch) axes[j].push_back(std::min(v, hi));
  }

  double best = l0scope::kInf;
  Vector x(n);
  std::function<void(Index)> walk = [&](Index j) {
    if (j == n) {
      best = std::min(best, f1.value(x));
      return;
    }
    for (double v : axes[j]) {
      x[j] = v;
      walk(j + 1);
    }
  };
  walk(0);
  return best;
}

// Worst-case gradient norm of f1 over the corners of a finite box: a Lipschitz
// constant for f1 on the box.
inline double f1_lipschitz_on_box(const QuadraticTerm& f1, const ConstraintSet& X) {
  const Index n = f1.dim();
  double best = 0.0;
  Vector x(n);
  std::function<void(Index)> walk = [&](Index j) {
    if (j == n) {
      best = std::max(best, f1.gradient(x).norm());
      return;
    }
    x[j] = X.lower()[j];
    walk(j + 1);
    x[j] = X.upper()[j];
    walk(j + 1);
  };
  walk(0);
  return best;
}

// Per-coordinate brute-force minimizer of the scaled prox cost
// (1/(2 eta))(t - v)^2 + weight [t != 0] over [lo, hi] by grid search.
inline double grid_prox_cost_1d(double v, double eta, double weight, double lo, double hi,
                                double pitch) {
  auto cost = [&](double t) {
    return (t - v) * (t - v) / (2.0 * eta) + (t != 0.0 ? weight : 0.0);
  };
  const double a = std::max(lo, std::min(v, 0.0) - 1.0);
  const double b = std::min(hi, std::max(v, 0.0) + 1.0);
  double best = l0scope::kInf;
  for (double t = a; t <= b + 1e-12; t += pitch) best = std::min(best, cost(std::min(t, b)));
  if (lo <= 0.0 && 0.0 <= hi) best = std::min(best, cost(0.0));
  best = std::min(best, cost(std::max(lo, std::min(v, hi))));
  return best;
}

// All grid points of a finite 2-D box whose f value is minimal within their
// 8-neighborhood (out-of-box neighbors ignored).
inline std::vector<Vector> grid_local_minima_2d(const ProblemInstance& p, double pitch) {
  const double lx = p.X().lower()[0], ux = p.X().upper()[0];
  const double ly = p.X().lower()[1], uy = p.X().upper()[1];
  const int nx = static_cast<int>(std::round((ux - lx) / pitch)) + 1;
  const int ny = static_cast<int>(std::round((uy - ly) / pitch)) + 1;

  std::vector<double> f(static_cast<std::size_t>(nx) * ny);
  auto at = [&](int i, int j) -> double& { return f[static_cast<std::size_t>(i) * ny + j]; };
  Vector x(2);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      x[0] = lx + i * pitch;
      x[1] = ly + j * pitch;
      at(i, j) = l0scope::evaluate(p, x);
    }

  std::vector<Vector> minima;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1 && is_min; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int ii = i + di, jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) continue;
          if (at(ii, jj) < at(i, j)) is_min = false;
        }
      if (is_min) {
        Vector pt(2);
        pt[0] = lx + i * pitch;
        pt[1] = ly + j * pitch;
        minima.push_back(pt);
      }
    }
  return minima;
}

// ----- random instance generation ------------------------------------------

inline QuadraticTerm random_least_squares(Rng& rng, Index n, Index rows) {
  Matrix A = rng.normal_matrix(rows, n);
  Vector b = rng.normal_vector(rows);
  return QuadraticTerm::least_squares(A, b, 1.0);
}

// Positive definite quadratic with eigenvalues in [1, 2] and minimizer at a
// given target. A fixed-pitch grid oracle can only resolve basins of
// moderately conditioned objectives, so grid-comparison tests use this
// instead of raw Gaussian least squares.
inline QuadraticTerm well_conditioned_quadratic(Rng& rng, Index n, const Vector& target) {
  const Matrix gauss = rng.normal_matrix(n, n);
  const Matrix R = Eigen::HouseholderQR<Matrix>(gauss).householderQ();
  Vector eigs(n);
  for (Index i = 0; i < n; ++i) eigs[i] = rng.uniform(1.0, 2.0);
  Matrix Q = R * eigs.asDiagonal() * R.transpose();
  Q = 0.5 * (Q + Q.transpose());
  return QuadraticTerm(Q, Vector(-Q * target), 0.0);
}

// kind 0: identity, 1: forward difference, 2: random 0/±1 rows.
inline LinearMap random_linear_map(Rng& rng, Index n, int kind, Index m_rows) {
  if (kind == 0) return LinearMap::identity(n);
  if (kind == 1) return LinearMap::forward_difference(n);
  Matrix G(m_rows, n);
  while (true) {
    for (Index r = 0; r < m_rows; ++r)
      for (Index c = 0; c < n; ++c) {
        const double u = rng.uniform01();
        G(r, c) = u < 0.25 ? -1.0 : (u < 0.5 ? 1.0 : 0.0);
      }
    bool ok = true;
    for (Index r = 0; r < m_rows; ++r)
      if (G.row(r).cwiseAbs().sum() == 0.0) ok = false;
    if (ok) break;
  }
  return LinearMap::custom(G);
}

// A finite box with 0 strictly inside.
inline ConstraintSet random_box_around_zero(Rng& rng, Index n) {
  Vector lo(n), hi(n);
  for (Index i = 0; i < n; ++i) {
    lo[i] = -rng.uniform(0.2, 2.0);
    hi[i] = rng.uniform(0.2, 2.0);
  }
  return ConstraintSet::box(lo, hi);
}

// ----- rank-side oracles ----------------------------------------------------

// Random M x N matrix of exact rank r, built from orthonormal factors.
inline Matrix random_fixed_rank(Rng& rng, Index m, Index n, Index r) {
  const Matrix gu = rng.normal_matrix(m, r);
  const Matrix gv = rng.normal_matrix(n, r);
  const Matrix qu = Eigen::HouseholderQR<Matrix>(gu).householderQ() * Matrix::Identity(m, r);
  const Matrix qv = Eigen::HouseholderQR<Matrix>(gv).householderQ() * Matrix::Identity(n, r);
  Vector sv(r);
  for (Index i = 0; i < r; ++i) sv[i] = rng.uniform(0.5, 3.0);
  return qu * sv.asDiagonal() * qv.transpose();
}

// Direct two-sided membership conditions for W in U⊥⊗V⊥, independent of the
// projector form used by the implementation.
inline double membership_residual(const Matrix& W, const Matrix& U_r, const Matrix& V_r) {
  const double a = U_r.cols() > 0 ? (U_r.transpose() * W).cwiseAbs().maxCoeff() : 0.0;
  const double b = V_r.cols() > 0 ? (W * V_r).cwiseAbs().maxCoeff() : 0.0;
  return std::max(a, b);
}

}  // namespace oracles
