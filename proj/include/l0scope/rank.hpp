#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "l0scope/certify.hpp"
#include "l0scope/types.hpp"

namespace l0scope {

/// F(A) = ||A - B||_F^2 + rank(A) over all real matrices of B's shape.
struct RankProblem {
  Matrix B;
};

inline double rank_smooth_value(const RankProblem& rp, const Matrix& A) {
  return (A - rp.B).squaredNorm();
}

inline Matrix rank_smooth_gradient(const RankProblem& rp, const Matrix& A) {
  return 2.0 * (A - rp.B);
}

/// A rank-preserving curve along which the smooth part strictly decreases,
/// disproving local minimality at the analyzed point.
struct RankRefutation {
  /// "det-curve" for the explicit 2x2 family, "multiplicative" for the
  /// random (I + eps E) A (I + eps F) search.
  std::string kind;
  Matrix a_eps;
  double epsilon = 0.0;
  double f_decrease = 0.0;
  long pair_index = -1;
};

struct RankPointAnalysis {
  Matrix A;
  int numerical_rank = 0;
  Vector singular_values;
  Matrix U_r;
  Matrix V_r;
  bool critical = false;
  double criticality_residual = 0.0;
  std::optional<RankRefutation> refutation;
};

struct RankOptions {
  /// Singular values above sv_tol * sigma_max count toward the rank.
  double sv_tol = 1e-10;
  /// Critical iff residual <= crit_tol * (1 + ||grad||_F).
  double crit_tol = 1e-10;
  long num_pairs = 200;
  std::uint64_t rng_seed = 0;
  /// A curve must beat F(A) by more than this to count as a refutation.
  double decrease_tol = 1e-10;
};

/// Criticality test on the fixed-rank manifold: 0 ∈ ∇F1(A) + U⊥⊗V⊥, checked
/// through the projector identity W = P_{U⊥} W P_{V⊥}.
RankPointAnalysis certify_critical_rank(const RankProblem& rp, const Matrix& A,
                                        const RankOptions& opts = {});

/// Searches for a rank-preserving descent curve: the explicit 2x2
/// determinant-preserving family first, then random multiplicative
/// perturbations, epsilon swept over {±10^-1 .. ±10^-6}. First hit in
/// (pair, epsilon) index order wins; nullopt when the budget finds nothing.
std::optional<RankRefutation> refute_local_min_rank(const RankProblem& rp, const Matrix& A,
                                                    const RankPointAnalysis& analysis,
                                                    const RankOptions& opts = {});

/// For 2x2 rank-1 A with A(0,0) + eps != 0: bump A(0,0) by eps and restore
/// det = 0 through the bottom-right entry, staying on the rank-1 manifold.
std::optional<Matrix> det_preserving_curve_2x2(const Matrix& A, double eps);

/// Matrix-side criticality + refutation bundled with the vector-side analogue
/// (an l0 problem on the singular values), contrasting where "critical implies
/// local minimizer" holds and where it fails.
struct ContrastReport {
  RankPointAnalysis matrix_side;
  bool matrix_refuted = false;
  /// Vector problem: f1(x) = ||x - sv(B)||^2, g = identity, weight 1,
  /// certified at x = sv(A) (padded to length min(M,N)).
  CriticalityCertificate vector_certificate;
  std::optional<TheoremCheck> vector_check;
  bool matrix_implication_held = true;
};

ContrastReport contrast_report(const RankProblem& rp, const Matrix& A,
                               const RankOptions& opts = {});

}  // namespace l0scope
