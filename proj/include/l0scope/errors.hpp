#pragma once

#include <stdexcept>
#include <string>

#include "l0scope/types.hpp"

namespace l0scope {

/// Malformed input: dimension mismatch, bad field value, unparsable file.
/// `where` carries a field path (e.g. "f1.Q") or a file:line location when known.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& message, std::string where = {})
      : std::runtime_error(where.empty() ? message : where + ": " + message),
        where_(std::move(where)) {}

  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/// An iterative solve ran out of budget before reaching its tolerance.
/// Carries the best iterate seen so the caller can inspect or resume.
class NotConvergedError : public std::runtime_error {
 public:
  NotConvergedError(const std::string& message, Vector best, double residual,
                    long iterations)
      : std::runtime_error(message),
        best_(std::move(best)),
        residual_(residual),
        iterations_(iterations) {}

  const Vector& best() const { return best_; }
  double residual() const { return residual_; }
  long iterations() const { return iterations_; }

 private:
  Vector best_;
  double residual_;
  long iterations_;
};

}  // namespace l0scope
