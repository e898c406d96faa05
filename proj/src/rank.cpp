#include "l0scope/rank.hpp"

#include <Eigen/SVD>

#include <cmath>

#include "l0scope/errors.hpp"
#include "l0scope/random.hpp"

namespace l0scope {

namespace {

int numerical_rank_of(const Vector& sv, double sv_tol) {
  if (sv.size() == 0) return 0;
  const double smax = sv[0];
  if (smax <= 0.0) return 0;
  int r = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv[i] > sv_tol * smax) ++r;
  return r;
}

}  // namespace

RankPointAnalysis certify_critical_rank(const RankProblem& rp, const Matrix& A,
                                        const RankOptions& opts) {
  if (A.rows() != rp.B.rows() || A.cols() != rp.B.cols())
    throw ValidationError("candidate matrix shape does not match the target");

  RankPointAnalysis out;
  out.A = A;

  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.singular_values = svd.singularValues();
  out.numerical_rank = numerical_rank_of(out.singular_values, opts.sv_tol);
  out.U_r = svd.matrixU().leftCols(out.numerical_rank);
  out.V_r = svd.matrixV().leftCols(out.numerical_rank);

  const Matrix grad = rank_smooth_gradient(rp, A);
  // -grad must lie in U⊥⊗V⊥, i.e. survive the two-sided projection onto the
  // complements of the column and row spaces.
  const Matrix pu_grad = grad - out.U_r * (out.U_r.transpose() * grad);
  const Matrix projected = pu_grad - (pu_grad * out.V_r) * out.V_r.transpose();
  out.criticality_residual = (grad - projected).norm();
  out.critical = out.criticality_residual <= opts.crit_tol * (1.0 + grad.norm());
  return out;
}

std::optional<Matrix> det_preserving_curve_2x2(const Matrix& A, double eps) {
  if (A.rows() != 2 || A.cols() != 2) return std::nullopt;
  const double a = A(0, 0);
  if (std::abs(a + eps) < 1e-12 || std::abs(a) < 1e-12) return std::nullopt;
  Matrix out = A;
  out(0, 0) = a + eps;
  // rank-1 input: a * d = b * c, so the update keeps det = 0 exactly.
  out(1, 1) = A(0, 1) * A(1, 0) / (a + eps);
  return out;
}

std::optional<RankRefutation> refute_local_min_rank(const RankProblem& rp, const Matrix& A,
                                                    const RankPointAnalysis& analysis,
                                                    const RankOptions& opts) {
  if (!analysis.critical || analysis.numerical_rank < 1) return std::nullopt;

  const double f_base = rank_smooth_value(rp, A);
  const int r = analysis.numerical_rank;

  std::vector<double> eps_grid;
  for (int k = 1; k <= 6; ++k) {
    eps_grid.push_back(std::pow(10.0, -k));
    eps_grid.push_back(-std::pow(10.0, -k));
  }

  auto accept = [&](const Matrix& cand, double eps, const std::string& kind,
                    long pair_index) -> std::optional<RankRefutation> {
    Eigen::JacobiSVD<Matrix> svd(cand);
    if (numerical_rank_of(svd.singularValues(), opts.sv_tol) != r) return std::nullopt;
    const double f_cand = rank_smooth_value(rp, cand);
    if (f_cand >= f_base - opts.decrease_tol) return std::nullopt;
    RankRefutation ref;
    ref.kind = kind;
    ref.a_eps = cand;
    ref.epsilon = eps;
    ref.f_decrease = f_cand - f_base;
    ref.pair_index = pair_index;
    return ref;
  };

  if (A.rows() == 2 && A.cols() == 2 && r == 1) {
    for (double eps : eps_grid) {
      const auto cand = det_preserving_curve_2x2(A, eps);
      if (!cand) continue;
      if (auto ref = accept(*cand, eps, "det-curve", -1)) return ref;
    }
  }

  // Multiplicative perturbations (I + eps E) A (I + eps F) keep the rank for
  // small eps; first success by (pair, eps) index is the deterministic answer.
  Rng rng(opts.rng_seed);
  for (long pair = 0; pair < opts.num_pairs; ++pair) {
    const Matrix E = rng.normal_matrix(A.rows(), A.rows());
    const Matrix F = rng.normal_matrix(A.cols(), A.cols());
    for (double eps : eps_grid) {
      const Matrix left = Matrix::Identity(A.rows(), A.rows()) + eps * E;
      const Matrix right = Matrix::Identity(A.cols(), A.cols()) + eps * F;
      if (auto ref = accept(left * A * right, eps, "multiplicative", pair)) return ref;
    }
  }
  return std::nullopt;
}

ContrastReport contrast_report(const RankProblem& rp, const Matrix& A,
                               const RankOptions& opts) {
  ContrastReport report;
  report.matrix_side = certify_critical_rank(rp, A, opts);
  if (report.matrix_side.critical) {
    report.matrix_side.refutation =
        refute_local_min_rank(rp, A, report.matrix_side, opts);
    report.matrix_refuted = report.matrix_side.refutation.has_value();
  }
  report.matrix_implication_held =
      !(report.matrix_side.critical && report.matrix_refuted);

  // Vector analogue on the singular values: the l0 counterpart of the same
  // data, where criticality provably implies local minimality.
  Eigen::JacobiSVD<Matrix> svd_b(rp.B);
  const Vector s_b = svd_b.singularValues();
  const Index m = s_b.size();
  Vector s_a = Vector::Zero(m);
  const Vector& sv_a = report.matrix_side.singular_values;
  for (Index i = 0; i < std::min(m, sv_a.size()); ++i)
    s_a[i] = i < report.matrix_side.numerical_rank ? sv_a[i] : 0.0;

  ProblemInstance vec_problem(
      QuadraticTerm::least_squares(Matrix::Identity(m, m), s_b, 2.0),
      LinearMap::identity(m), ConstraintSet::all_space(m), 1.0);
  report.vector_certificate = certify_critical(vec_problem, s_a);
  if (report.vector_certificate.verdict == Verdict::Critical)
    report.vector_check = verify_theorem_crlo(vec_problem, s_a);
  return report;
}

}  // namespace l0scope
