#include "l0scope/problem.hpp"

#include <algorithm>
#include <cmath>

namespace l0scope {

namespace {

void check_dim(bool ok, const std::string& message, const std::string& where = {}) {
  if (!ok) throw ValidationError(message, where);
}

}  // namespace

QuadraticTerm::QuadraticTerm(Matrix Q, Vector c, double d)
    : Q_(std::move(Q)), c_(std::move(c)), d_(d) {
  check_dim(Q_.rows() == Q_.cols(), "Q must be square", "f1.Q");
  check_dim(Q_.rows() == c_.size(), "Q and c dimensions differ", "f1");

  const double scale = Q_.cwiseAbs().maxCoeff();
  const double asym = (Q_ - Q_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1.0))
    throw ValidationError("Q is not symmetric", "f1.Q");
  Q_ = 0.5 * (Q_ + Q_.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(Q_, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  lambda_max_ = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  if (lo < -1e-10 * std::max(lambda_max_, 1.0))
    throw ValidationError("Q has a negative eigenvalue; f1 must be convex", "f1.Q");
}

QuadraticTerm QuadraticTerm::least_squares(const Matrix& A, const Vector& b, double alpha) {
  check_dim(A.rows() == b.size(), "A and b dimensions differ", "f1");
  if (!(alpha > 0)) throw ValidationError("alpha must be positive", "f1.alpha");
  Matrix Q = alpha * (A.transpose() * A);
  Vector c = -alpha * (A.transpose() * b);
  return QuadraticTerm(std::move(Q), std::move(c), 0.5 * alpha * b.squaredNorm());
}

double QuadraticTerm::value(const Vector& x) const {
  return 0.5 * x.dot(Q_ * x) + c_.dot(x) + d_;
}

LinearMap LinearMap::identity(Index n) {
  return LinearMap(Matrix::Identity(n, n), Kind::Identity);
}

LinearMap LinearMap::forward_difference(Index n) {
  check_dim(n >= 2, "forward-difference needs dimension >= 2", "g");
  Matrix G = Matrix::Zero(n - 1, n);
  for (Index i = 0; i < n - 1; ++i) {
    G(i, i) = -1.0;
    G(i, i + 1) = 1.0;
  }
  return LinearMap(std::move(G), Kind::ForwardDifference);
}

LinearMap LinearMap::custom(Matrix G) {
  check_dim(G.rows() >= 1 && G.cols() >= 1, "G must be nonempty", "g.G");
  return LinearMap(std::move(G), Kind::Custom);
}

Matrix LinearMap::rows_of(const Support& s) const {
  Matrix out(s.size(), G_.cols());
  Index r = 0;
  for (int i : s.indices()) out.row(r++) = G_.row(i);
  return out;
}

ConstraintSet ConstraintSet::all_space(Index n) {
  return ConstraintSet(Vector::Constant(n, -kInf), Vector::Constant(n, kInf), false);
}

ConstraintSet ConstraintSet::box(Vector lower, Vector upper) {
  check_dim(lower.size() == upper.size(), "lower and upper lengths differ", "X");
  for (Index i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]))
      throw ValidationError("bounds must not be NaN", "X");
    if (lower[i] == kInf || upper[i] == -kInf || lower[i] > upper[i])
      throw ValidationError("empty box: lower > upper at index " + std::to_string(i), "X");
  }
  return ConstraintSet(std::move(lower), std::move(upper), true);
}

bool ConstraintSet::contains(const Vector& x, double tol) const {
  if (!is_box_) return true;
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
  }
  return true;
}

Vector ConstraintSet::project(const Vector& v) const {
  if (!is_box_) return v;
  return v.cwiseMax(lower_).cwiseMin(upper_);
}

bool ConstraintSet::bounded() const {
  if (!is_box_) return lower_.size() == 0;
  return lower_.allFinite() && upper_.allFinite();
}

Support::Support(std::vector<int> indices, int ground_size)
    : indices_(std::move(indices)), ground_size_(ground_size) {
  check_dim(ground_size_ >= 0, "support ground size must be nonnegative");
  std::sort(indices_.begin(), indices_.end());
  check_dim(std::adjacent_find(indices_.begin(), indices_.end()) == indices_.end(),
            "support indices must be duplicate-free");
  if (!indices_.empty())
    check_dim(indices_.front() >= 0 && indices_.back() < ground_size_,
              "support index out of range");
}

Support Support::full(int ground_size) {
  std::vector<int> all(ground_size);
  for (int i = 0; i < ground_size; ++i) all[i] = i;
  return Support(std::move(all), ground_size);
}

Support Support::from_mask(std::uint32_t mask, int ground_size) {
  check_dim(ground_size <= 32, "mask supports at most 32 components");
  std::vector<int> idx;
  for (int i = 0; i < ground_size; ++i)
    if (mask & (std::uint32_t{1} << i)) idx.push_back(i);
  return Support(std::move(idx), ground_size);
}

bool Support::contains(int i) const {
  return std::binary_search(indices_.begin(), indices_.end(), i);
}

Support Support::complement() const {
  std::vector<int> rest;
  rest.reserve(ground_size_ - indices_.size());
  auto it = indices_.begin();
  for (int i = 0; i < ground_size_; ++i) {
    if (it != indices_.end() && *it == i) {
      ++it;
    } else {
      rest.push_back(i);
    }
  }
  return Support(std::move(rest), ground_size_);
}

std::uint32_t Support::mask() const {
  check_dim(ground_size_ <= 32, "mask supports at most 32 components");
  std::uint32_t m = 0;
  for (int i : indices_) m |= std::uint32_t{1} << i;
  return m;
}

ProblemInstance::ProblemInstance(QuadraticTerm f1, LinearMap g, ConstraintSet X, double weight)
    : f1_(std::move(f1)), g_(std::move(g)), X_(std::move(X)), weight_(weight) {
  check_dim(g_.cols() == f1_.dim(), "g column count must match the dimension of f1", "g.G");
  check_dim(X_.dim() == f1_.dim(), "constraint bounds must match the dimension of f1", "X");
  if (!(weight_ > 0)) throw ValidationError("weight must be positive", "weight");
}

double evaluate(const ProblemInstance& p, const Vector& x, double zero_tol, double feas_tol) {
  if (x.size() != p.dim())
    throw ValidationError("point has length " + std::to_string(x.size()) +
                          ", problem dimension is " + std::to_string(p.dim()));
  if (!p.X().contains(x, feas_tol)) return kInf;
  const Vector gx = p.g().apply(x);
  Index nonzeros = 0;
  for (Index i = 0; i < gx.size(); ++i)
    if (std::abs(gx[i]) > zero_tol) ++nonzeros;
  return p.f1().value(x) + p.weight() * static_cast<double>(nonzeros);
}

Support support_of(const LinearMap& g, const Vector& x, double zero_tol) {
  if (x.size() != g.cols())
    throw ValidationError("point has length " + std::to_string(x.size()) +
                          ", map expects " + std::to_string(g.cols()));
  if (zero_tol < 0) throw ValidationError("zero_tol must be nonnegative");
  const Vector gx = g.apply(x);
  std::vector<int> idx;
  for (Index i = 0; i < gx.size(); ++i)
    if (std::abs(gx[i]) > zero_tol) idx.push_back(static_cast<int>(i));
  return Support(std::move(idx), static_cast<int>(g.rows()));
}

Support support_of(const ProblemInstance& p, const Vector& x, double zero_tol) {
  return support_of(p.g(), x, zero_tol);
}

Vector gradient_f1(const ProblemInstance& p, const Vector& x) {
  if (x.size() != p.dim())
    throw ValidationError("point has length " + std::to_string(x.size()) +
                          ", problem dimension is " + std::to_string(p.dim()));
  return p.f1().gradient(x);
}

}  // namespace l0scope
