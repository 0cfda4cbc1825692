#include "opreg/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace opreg {

void CurvatureBounds::validate() const {
  if (!std::isfinite(mu) || !std::isfinite(L) || mu < 0.0 || !(L > mu)) {
    std::ostringstream msg;
    msg << "curvature bounds need 0 <= mu < L, got mu=" << mu << " L=" << L;
    throw InvalidArgument(msg.str());
  }
}

double CurvatureBounds::gradient_step_contraction(double alpha) const {
  return std::max(std::abs(1.0 - alpha * mu), std::abs(1.0 - alpha * L));
}

double CompositeProblem::value(const Vector& x) const {
  return smooth.value(x) + nonsmooth.value(x);
}

OperatorHandle::OperatorHandle(Map map)
    : OperatorHandle(std::move(map), std::make_shared<CallCounter>()) {}

OperatorHandle::OperatorHandle(Map map, std::shared_ptr<CallCounter> counter)
    : map_(std::move(map)), counter_(std::move(counter)) {
  if (!counter_) counter_ = std::make_shared<CallCounter>();
}

Vector OperatorHandle::apply(const Vector& x) const {
  if (!map_) throw InvalidArgument("empty operator handle");
  counter_->increment();
  return map_(x);
}

void require_finite(const Vector& v, const Vector& at, const char* what) {
  if (!v.allFinite()) {
    throw EvaluationError(std::string("non-finite ") + what, at);
  }
}

OperatorHandle forward_backward_map(const CompositeProblem& problem, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("forward_backward_map: alpha must be positive");
  }
  auto gradient = problem.smooth.gradient;
  return OperatorHandle([gradient = std::move(gradient), alpha](const Vector& x) {
    Vector g = gradient(x);
    require_finite(g, x, "gradient");
    return Vector(x - alpha * g);
  });
}

Vector sphere_project(const Vector& x) {
  const double norm = x.norm();
  if (!(norm >= 1e-30)) {
    throw DegenerateInput("sphere_project: projection of (near) zero vector is undefined");
  }
  return x / norm;
}

Vector soft_threshold(const Vector& y, double kappa) {
  if (!(kappa >= 0.0)) throw InvalidArgument("soft_threshold: kappa must be >= 0");
  return y.unaryExpr([kappa](double v) {
    const double mag = std::abs(v) - kappa;
    return mag > 0.0 ? std::copysign(mag, v) : 0.0;
  });
}

SmoothPart quadratic(Matrix hessian, Vector linear) {
  if (hessian.rows() != hessian.cols() || hessian.rows() != linear.size()) {
    throw InvalidArgument("quadratic: dimension mismatch");
  }
  auto H = std::make_shared<const Matrix>(std::move(hessian));
  auto c = std::make_shared<const Vector>(std::move(linear));
  SmoothPart f;
  f.dimension = H->rows();
  f.value = [H, c](const Vector& x) { return 0.5 * x.dot(*H * x) - c->dot(x); };
  f.gradient = [H, c](const Vector& x) { return Vector(*H * x - *c); };
  return f;
}

SmoothPart least_squares(std::shared_ptr<const Matrix> A, Vector b) {
  if (!A || A->rows() != b.size()) throw InvalidArgument("least_squares: dimension mismatch");
  auto rhs = std::make_shared<const Vector>(std::move(b));
  SmoothPart f;
  f.dimension = A->cols();
  f.value = [A, rhs](const Vector& x) { return 0.5 * (*A * x - *rhs).squaredNorm(); };
  f.gradient = [A, rhs](const Vector& x) {
    return Vector(A->transpose() * (*A * x - *rhs));
  };
  return f;
}

SmoothPart constant_function(Index n, double value) {
  SmoothPart f;
  f.dimension = n;
  f.value = [value](const Vector&) { return value; };
  f.gradient = [](const Vector& x) { return Vector(Vector::Zero(x.size())); };
  return f;
}

NonsmoothPart zero_function() {
  return {[](const Vector&) { return 0.0; }, [](const Vector& y, double) { return y; }};
}

NonsmoothPart l1_norm(double weight) {
  if (!(weight >= 0.0)) throw InvalidArgument("l1_norm: weight must be >= 0");
  return {[weight](const Vector& x) { return weight * x.lpNorm<1>(); },
          [weight](const Vector& y, double alpha) { return soft_threshold(y, alpha * weight); }};
}

NonsmoothPart sphere_indicator() {
  return {[](const Vector& x) {
            return std::abs(x.norm() - 1.0) <= 1e-9 ? 0.0
                                                    : std::numeric_limits<double>::infinity();
          },
          [](const Vector& y, double) { return sphere_project(y); }};
}

OperatorHandle ProblemStream::algorithmic_operator(std::size_t k, double alpha) const {
  return forward_backward_map(problem_at(k), alpha);
}

double ProblemStream::tracking_error(const Vector& x, std::size_t k) const {
  return (x - ground_truth(k)).norm();
}

}  // namespace opreg
