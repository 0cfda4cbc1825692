#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "opreg/errors.hpp"

namespace opreg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Curvature moduli of the smooth part: 0 <= mu < L.
struct CurvatureBounds {
  double mu = 0.0;
  double L = 1.0;

  /// Throws InvalidArgument unless 0 <= mu < L and both are finite.
  void validate() const;
  /// Contraction factor of x -> x - alpha grad f for f in S_{mu,L}.
  double gradient_step_contraction(double alpha) const;
};

/// f with value and gradient. For nonsmooth costs `gradient` returns a subgradient.
struct SmoothPart {
  Index dimension = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

/// g, given through its value (may be +inf) and prox_{alpha g}.
struct NonsmoothPart {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&, double)> prox;
};

/// F = f + g.
struct CompositeProblem {
  SmoothPart smooth;
  NonsmoothPart nonsmooth;
  CurvatureBounds curvature;

  Index dimension() const { return smooth.dimension; }
  double value(const Vector& x) const;
};

/// Thread-safe monotone tally shared between copies of an OperatorHandle.
class CallCounter {
 public:
  void increment() noexcept { count_.fetch_add(1, std::memory_order_relaxed); }
  std::uint64_t value() const noexcept { return count_.load(std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> count_{0};
};

/// Callable map R^n -> R^n that counts its evaluations.
class OperatorHandle {
 public:
  using Map = std::function<Vector(const Vector&)>;

  OperatorHandle() = default;
  explicit OperatorHandle(Map map);
  OperatorHandle(Map map, std::shared_ptr<CallCounter> counter);

  /// Evaluates the map; increments the call counter by exactly one.
  Vector apply(const Vector& x) const;
  Vector operator()(const Vector& x) const { return apply(x); }

  std::uint64_t calls() const { return counter_ ? counter_->value() : 0; }
  const std::shared_ptr<CallCounter>& counter() const { return counter_; }
  explicit operator bool() const { return static_cast<bool>(map_); }

 private:
  Map map_;
  std::shared_ptr<CallCounter> counter_;
};

/// The gradient-step operator x -> x - alpha grad f(x). The prox of g is not
/// part of it. Non-finite gradients raise EvaluationError carrying the point.
OperatorHandle forward_backward_map(const CompositeProblem& problem, double alpha);

/// x / ||x||. Throws DegenerateInput when ||x|| < 1e-30.
Vector sphere_project(const Vector& x);

/// Componentwise sign(y) max(|y| - kappa, 0), i.e. prox of kappa ||.||_1.
Vector soft_threshold(const Vector& y, double kappa);

// Building blocks for problems.

/// f(x) = 1/2 x^T H x - c^T x (H symmetric).
SmoothPart quadratic(Matrix hessian, Vector linear);
/// f(x) = 1/2 ||A x - b||^2.
SmoothPart least_squares(std::shared_ptr<const Matrix> A, Vector b);
/// f(x) = constant.
SmoothPart constant_function(Index n, double value = 0.0);
/// g = 0 (prox is the identity).
NonsmoothPart zero_function();
/// g = w ||x||_1.
NonsmoothPart l1_norm(double weight);
/// g = indicator of the unit sphere (prox is sphere_project).
NonsmoothPart sphere_indicator();

/// A clocked sequence of composite problems with a ground-truth signal.
class ProblemStream {
 public:
  virtual ~ProblemStream() = default;

  virtual Index dimension() const = 0;
  /// Number of online steps K; steps are indexed 1..K (k = 0 is the initial time).
  virtual std::size_t horizon() const = 0;
  /// Seconds between consecutive problem changes.
  virtual double period() const = 0;
  virtual std::uint64_t seed() const = 0;
  virtual std::string name() const = 0;

  virtual Vector ground_truth(std::size_t k) const = 0;
  virtual CompositeProblem problem_at(std::size_t k) const = 0;

  /// The operator T_k the online algorithm iterates before its prox step.
  /// Default: the gradient step of problem_at(k).
  virtual OperatorHandle algorithmic_operator(std::size_t k, double alpha) const;
  /// Distance of x from the signal at time k.
  virtual double tracking_error(const Vector& x, std::size_t k) const;
  /// Initial condition x_0 shared by every solver.
  virtual Vector initial_point() const = 0;
};

/// Throws EvaluationError if any entry of v is not finite.
void require_finite(const Vector& v, const Vector& at, const char* what);

}  // namespace opreg
