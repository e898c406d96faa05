#include <doctest.h>

#include <cmath>

#include "l0scope/rank.hpp"
#include "oracles.hpp"

using namespace l0scope;

namespace {

RankProblem demo_problem() {
  Matrix B(2, 2);
  B << 2.0, 1.0, 1.0, 2.0;
  return RankProblem{B};
}

Matrix demo_point() {
  Matrix A(2, 2);
  A << 0.5, -0.5, -0.5, 0.5;
  return A;
}

double curve_decrease_formula(double eps) {
  return eps * eps * (eps * eps - 2.0 * eps - 1.0) / ((0.5 + eps) * (0.5 + eps));
}

}  // namespace

TEST_CASE("the symmetric rank-1 saddle certifies critical") {
  const RankProblem rp = demo_problem();
  const Matrix A = demo_point();

  Matrix expected_neg_grad(2, 2);
  expected_neg_grad << 3.0, 3.0, 3.0, 3.0;
  CHECK((-rank_smooth_gradient(rp, A) - expected_neg_grad).cwiseAbs().maxCoeff() <= 1e-14);

  const RankPointAnalysis pa = certify_critical_rank(rp, A);
  CHECK(pa.numerical_rank == 1);
  CHECK(pa.critical);
  CHECK(pa.criticality_residual <= 1e-12);
}

TEST_CASE("zero gradient is critical at any rank") {
  const RankProblem rp = demo_problem();
  const RankPointAnalysis pa = certify_critical_rank(rp, rp.B);
  CHECK(pa.critical);
  CHECK(pa.criticality_residual <= 1e-14);
  CHECK(pa.numerical_rank == 2);
}

TEST_CASE("a gradient with a column-space component is not critical") {
  Matrix B(2, 2), A(2, 2);
  B << 2.0, 0.0, 0.0, 0.0;
  A << 1.0, 0.0, 0.0, 0.0;
  const RankPointAnalysis pa = certify_critical_rank(RankProblem{B}, A);
  CHECK(pa.numerical_rank == 1);
  CHECK(!pa.critical);
  CHECK(pa.criticality_residual >= 1.0);
}

TEST_CASE("explicit determinant-preserving curve matches the closed form") {
  const RankProblem rp = demo_problem();
  const Matrix A = demo_point();
  const double f_base = rank_smooth_value(rp, A);
  CHECK(f_base == doctest::Approx(9.0).epsilon(1e-14));

  for (double eps : {0.1, 0.05, 0.01, 0.3, 0.7}) {
    const auto a_eps = det_preserving_curve_2x2(A, eps);
    REQUIRE(a_eps.has_value());
    // Stays on the rank-1 manifold.
    CHECK(std::abs(a_eps->determinant()) <= 1e-12);
    const double decrease = rank_smooth_value(rp, *a_eps) - f_base;
    CHECK(decrease == doctest::Approx(curve_decrease_formula(eps)).epsilon(1e-11));
    CHECK(decrease < 0.0);
  }

  // Frozen spot value at eps = 0.1: 0.01 * (0.01 - 0.2 - 1) / 0.36.
  const auto a01 = det_preserving_curve_2x2(A, 0.1);
  CHECK(rank_smooth_value(rp, *a01) - f_base ==
        doctest::Approx(-0.033055555555555555).epsilon(1e-12));
}

TEST_CASE("decrease formula is strictly negative on (0,1)") {
  for (double eps = 0.01; eps < 1.0; eps += 0.01) CHECK(curve_decrease_formula(eps) < 0.0);
}

TEST_CASE("refutation finds the descent curve for the saddle") {
  const RankProblem rp = demo_problem();
  const Matrix A = demo_point();
  RankPointAnalysis pa = certify_critical_rank(rp, A);
  REQUIRE(pa.critical);
  const auto ref = refute_local_min_rank(rp, A, pa);
  REQUIRE(ref.has_value());
  CHECK(ref->kind == "det-curve");
  CHECK(ref->f_decrease < -1e-10);

  Eigen::JacobiSVD<Matrix> svd(ref->a_eps);
  int r = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-10 * svd.singularValues()[0]) ++r;
  CHECK(r == 1);
}

TEST_CASE("no refutation at the global minimizer of the smooth part") {
  const RankProblem rp = demo_problem();
  RankOptions opts;
  opts.num_pairs = 50;
  const RankPointAnalysis pa = certify_critical_rank(rp, rp.B, opts);
  REQUIRE(pa.critical);
  CHECK(!refute_local_min_rank(rp, rp.B, pa, opts).has_value());
}

TEST_CASE("best rank-1 approximation of a diagonal survives refutation attempts") {
  Matrix B(2, 2), A(2, 2);
  B << 3.0, 0.0, 0.0, 1.0;
  A << 3.0, 0.0, 0.0, 0.0;
  const RankProblem rp{B};
  RankOptions opts;
  opts.num_pairs = 50;
  const RankPointAnalysis pa = certify_critical_rank(rp, A, opts);
  REQUIRE(pa.critical);
  REQUIRE(pa.numerical_rank == 1);
  CHECK(!refute_local_min_rank(rp, A, pa, opts).has_value());

  // Brute-force confirmation: rank-1 matrices u v' near A never do better.
  Rng rng(7);
  const double f_base = rank_smooth_value(rp, A);
  Vector u0(2), v0(2);
  u0 << 3.0, 0.0;
  v0 << 1.0, 0.0;
  for (int s = 0; s < 2000; ++s) {
    const Vector u = u0 + rng.uniform_in_ball(2, 0.05);
    const Vector v = v0 + rng.uniform_in_ball(2, 0.05);
    const Matrix cand = u * v.transpose();
    CHECK(rank_smooth_value(rp, cand) >= f_base - 1e-10);
  }
}

TEST_CASE("normal-space membership via the projector identity") {
  Rng rng(19);
  for (int t = 0; t < 30; ++t) {
    const Index m = 2 + t % 3;
    const Index n = 2 + (t / 2) % 3;
    const Index r = 1 + t % std::min(m, n);
    const Matrix A = oracles::random_fixed_rank(rng, m, n, r);

    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Matrix U_r = svd.matrixU().leftCols(r);
    const Matrix V_r = svd.matrixV().leftCols(r);
    const Matrix U_perp = svd.matrixU().rightCols(m - r);
    const Matrix V_perp = svd.matrixV().rightCols(n - r);

    if (U_perp.cols() == 0 || V_perp.cols() == 0) continue;
    const Matrix W =
        U_perp * rng.normal_matrix(U_perp.cols(), V_perp.cols()) * V_perp.transpose();
    // Membership holds by both the oracle conditions and the projector form.
    CHECK(oracles::membership_residual(W, U_r, V_r) <= 1e-10);
    const Matrix pw = W - U_r * (U_r.transpose() * W);
    const Matrix pwp = pw - (pw * V_r) * V_r.transpose();
    CHECK((W - pwp).cwiseAbs().maxCoeff() <= 1e-10);

    // Adding a column-space component breaks membership.
    const Matrix spoiled =
        W + 0.1 * U_r * rng.normal_matrix(r, n);
    CHECK(oracles::membership_residual(spoiled, U_r, V_r) > 1e-6);
  }
}

TEST_CASE("criticality of a random truncated SVD against the certifier") {
  Rng rng(23);
  for (int t = 0; t < 10; ++t) {
    const Index m = 3, n = 3;
    const Matrix B = rng.normal_matrix(m, n);
    Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const int r = 1 + static_cast<int>(rng.raw() % 2);
    Vector sv = svd.singularValues();
    for (Index i = r; i < sv.size(); ++i) sv[i] = 0.0;
    const Matrix A = svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
    const RankPointAnalysis pa = certify_critical_rank(RankProblem{B}, A);
    CHECK(pa.numerical_rank == r);
    CHECK(pa.critical);
  }
}

TEST_CASE("contrast report tells the two stories apart") {
  // The saddle: matrix-side critical yet refuted, vector analogue not even
  // critical (so the l0 implication is never at risk).
  RankOptions opts;
  opts.num_pairs = 50;
  ContrastReport report = contrast_report(demo_problem(), demo_point(), opts);
  CHECK(report.matrix_side.critical);
  CHECK(report.matrix_refuted);
  CHECK(!report.matrix_implication_held);
  CHECK(report.vector_certificate.verdict == Verdict::NotCritical);

  // A = B: both sides critical, nothing refuted, implication intact.
  report = contrast_report(demo_problem(), demo_problem().B, opts);
  CHECK(report.matrix_side.critical);
  CHECK(!report.matrix_refuted);
  CHECK(report.matrix_implication_held);
  CHECK(report.vector_certificate.verdict == Verdict::Critical);
  REQUIRE(report.vector_check.has_value());
  CHECK(report.vector_check->consistent);

  // Truncated SVD of a diagonal with distinct singular values: critical and
  // locally minimal on both sides.
  Matrix B(2, 2), A(2, 2);
  B << 3.0, 0.0, 0.0, 1.0;
  A << 3.0, 0.0, 0.0, 0.0;
  report = contrast_report(RankProblem{B}, A, opts);
  CHECK(report.matrix_side.critical);
  CHECK(!report.matrix_refuted);
  CHECK(report.matrix_implication_held);
  CHECK(report.vector_certificate.verdict == Verdict::Critical);
  REQUIRE(report.vector_check.has_value());
  CHECK(report.vector_check->consistent);
}
