#pragma once

#include <cstdint>
#include <vector>

#include "l0scope/errors.hpp"
#include "l0scope/types.hpp"

namespace l0scope {

/// Convex quadratic f1(x) = 0.5 x'Qx + c'x + d with Q symmetric PSD.
class QuadraticTerm {
 public:
  /// Validates symmetry (1e-12 relative) and positive semidefiniteness
  /// (eigenvalues >= -1e-10 * ||Q||). Throws ValidationError otherwise.
  QuadraticTerm(Matrix Q, Vector c, double d);

  /// f1(x) = (alpha/2) ||Ax - b||^2, i.e. Q = alpha A'A, c = -alpha A'b,
  /// d = (alpha/2) ||b||^2.
  static QuadraticTerm least_squares(const Matrix& A, const Vector& b, double alpha);

  Index dim() const { return c_.size(); }
  const Matrix& Q() const { return Q_; }
  const Vector& c() const { return c_; }
  double d() const { return d_; }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const { return Q_ * x + c_; }

  /// Largest eigenvalue of Q: the Lipschitz constant of the gradient.
  double gradient_lipschitz() const { return lambda_max_; }

 private:
  Matrix Q_;
  Vector c_;
  double d_;
  double lambda_max_;
};

class Support;

/// Linear map g(x) = Gx whose component kernels are the hyperplanes
/// ker g_i; the kind tag remembers how G was built.
class LinearMap {
 public:
  enum class Kind { Identity, ForwardDifference, Custom };

  static LinearMap identity(Index n);
  /// M = n-1 rows, row i is e_{i+1} - e_i.
  static LinearMap forward_difference(Index n);
  static LinearMap custom(Matrix G);

  Kind kind() const { return kind_; }
  const Matrix& matrix() const { return G_; }
  Index rows() const { return G_.rows(); }
  Index cols() const { return G_.cols(); }

  Vector apply(const Vector& x) const { return G_ * x; }

  /// Submatrix of the rows listed in s (in s's index order).
  Matrix rows_of(const Support& s) const;

 private:
  LinearMap(Matrix G, Kind kind) : G_(std::move(G)), kind_(kind) {}
  Matrix G_;
  Kind kind_;
};

/// Closed convex feasible set: the whole space or a (possibly unbounded) box.
class ConstraintSet {
 public:
  static ConstraintSet all_space(Index n);
  /// Entries of lower may be -inf, entries of upper +inf. Requires a nonempty
  /// box (lower <= upper componentwise).
  static ConstraintSet box(Vector lower, Vector upper);

  bool is_box() const { return is_box_; }
  Index dim() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  bool contains(const Vector& x, double tol = kDefaultFeasTol) const;
  /// Euclidean projection (componentwise clamp). Idempotent.
  Vector project(const Vector& v) const;
  /// True when every bound is finite.
  bool bounded() const;

 private:
  ConstraintSet(Vector lower, Vector upper, bool is_box)
      : lower_(std::move(lower)), upper_(std::move(upper)), is_box_(is_box) {}
  Vector lower_;
  Vector upper_;
  bool is_box_;
};

/// A sorted, duplicate-free subset of {0 .. m-1} indexing the components of
/// g allowed to be nonzero. Indices are 0-based throughout.
class Support {
 public:
  Support() = default;
  Support(std::vector<int> indices, int ground_size);

  static Support empty_set(int ground_size) { return Support({}, ground_size); }
  static Support full(int ground_size);
  /// Bit i of mask selects index i; requires ground_size <= 32.
  static Support from_mask(std::uint32_t mask, int ground_size);

  const std::vector<int>& indices() const { return indices_; }
  int ground_size() const { return ground_size_; }
  int size() const { return static_cast<int>(indices_.size()); }
  bool empty() const { return indices_.empty(); }
  bool contains(int i) const;
  Support complement() const;
  std::uint32_t mask() const;

  bool operator==(const Support& other) const = default;
  /// Lexicographic order on the sorted index sequences.
  bool operator<(const Support& other) const { return indices_ < other.indices_; }

 private:
  std::vector<int> indices_;
  int ground_size_ = 0;
};

/// The full objective f(x) = f1(x) + weight * ||g(x)||_0 + delta_X(x).
class ProblemInstance {
 public:
  /// Validates dimensional consistency and weight > 0.
  ProblemInstance(QuadraticTerm f1, LinearMap g, ConstraintSet X, double weight = 1.0);

  const QuadraticTerm& f1() const { return f1_; }
  const LinearMap& g() const { return g_; }
  const ConstraintSet& X() const { return X_; }
  double weight() const { return weight_; }

  Index dim() const { return f1_.dim(); }
  Index num_components() const { return g_.rows(); }

 private:
  QuadraticTerm f1_;
  LinearMap g_;
  ConstraintSet X_;
  double weight_;
};

/// f(x) if x is feasible within feas_tol, +inf otherwise.
double evaluate(const ProblemInstance& p, const Vector& x,
                double zero_tol = kDefaultZeroTol, double feas_tol = kDefaultFeasTol);

/// Indices i with |g_i(x)| > zero_tol.
Support support_of(const LinearMap& g, const Vector& x, double zero_tol = kDefaultZeroTol);
Support support_of(const ProblemInstance& p, const Vector& x,
                   double zero_tol = kDefaultZeroTol);

Vector gradient_f1(const ProblemInstance& p, const Vector& x);

}  // namespace l0scope
