#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace opreg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument or an instance was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A function/gradient/prox evaluation produced a non-finite value.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, Eigen::VectorXd point)
      : Error(what), point_(std::move(point)) {}

  const Eigen::VectorXd& point() const noexcept { return point_; }

 private:
  Eigen::VectorXd point_;
};

/// The input is outside the domain where the operation is defined
/// (e.g. projecting the origin onto the unit sphere).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// An iterative method exhausted its budget before meeting its tolerance.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, Eigen::VectorXd last_iterate,
                 std::vector<double> violations = {})
      : Error(what),
        last_iterate_(std::move(last_iterate)),
        violations_(std::move(violations)) {}

  const Eigen::VectorXd& last_iterate() const noexcept { return last_iterate_; }
  /// Method-specific residuals at the last iterate (per ball, per constraint...).
  const std::vector<double>& violations() const noexcept { return violations_; }

 private:
  Eigen::VectorXd last_iterate_;
  std::vector<double> violations_;
};

}  // namespace opreg
