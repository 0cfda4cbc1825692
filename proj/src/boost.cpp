#include "opreg/boost.hpp"

#include <chrono>
#include <cmath>
#include <random>

namespace opreg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_iterate(const Vector& x_prev, const ProblemStream& stream) {
  if (x_prev.size() != stream.dimension()) throw InvalidArgument("boost: iterate dimension");
  if (!x_prev.allFinite()) throw InvalidArgument("boost: non-finite iterate");
}

Vector prox_step(const ProblemStream& stream, std::size_t k, const Vector& t, double alpha) {
  Vector x = stream.problem_at(k).nonsmooth.prox(t, alpha);
  require_finite(x, t, "prox");
  return x;
}

}  // namespace

void BoostConfig::validate() const {
  if (ell < 2) throw InvalidArgument("boost: ell must be >= 2");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("boost: alpha must be > 0");
  if (!(zeta > 0.0 && zeta < 1.0)) throw InvalidArgument("boost: zeta must lie in (0, 1)");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidArgument("boost: rho must be > 0");
  if (!(sample_sigma > 0.0) || !std::isfinite(sample_sigma)) {
    throw InvalidArgument("boost: sample_sigma must be > 0");
  }
  if (tau < 1) throw InvalidArgument("boost: tau must be >= 1");
  stop.validate();
}

Matrix sample_anchors(const Vector& x_prev, const BoostConfig& config, std::size_t k) {
  std::seed_seq seq{static_cast<std::uint32_t>(config.rng_seed),
                    static_cast<std::uint32_t>(config.rng_seed >> 32),
                    static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix anchors(x_prev.size(), config.ell);
  anchors.col(0) = x_prev;
  for (Index p = 1; p < config.ell; ++p) {
    for (Index r = 0; r < x_prev.size(); ++r) {
      anchors(r, p) = x_prev[r] + config.sample_sigma * normal(rng);
    }
  }
  return anchors;
}

BoostStep opreg_boost_step(const ProblemStream& stream, std::size_t k, const Vector& x_prev,
                           const BoostConfig& config, PrsState* warm, OpRegResult* fit,
                           Matrix* anchors) {
  config.validate();
  check_iterate(x_prev, stream);

  RegressionDataset data;
  data.points = sample_anchors(x_prev, config, k);
  data.evaluations.resize(data.points.rows(), data.points.cols());
  data.distinguished_index = 0;
  const OperatorHandle T = stream.algorithmic_operator(k, config.alpha);
  const auto calls_before = T.calls();
  for (Index i = 0; i < config.ell; ++i) {
    Vector y = T(data.points.col(i));
    require_finite(y, data.points.col(i), "operator value");
    data.evaluations.col(i) = std::move(y);
  }

  BoostStep step;
  step.stats.operator_calls = T.calls() - calls_before;
  step.stats.refreshed = true;
  const auto start = Clock::now();
  OpRegResult result = opreg_fit(data, config.zeta, config.rho, config.stop, warm, config.prs);
  step.stats.solver_seconds = seconds_since(start);
  step.stats.inner_iterations = result.diagnostics.iterations;
  step.stats.inner_residual = result.diagnostics.residual;
  step.stats.max_violation = result.fit.max_violation;

  step.x = prox_step(stream, k, extract_boosted_value(result.fit, data), config.alpha);
  if (fit) *fit = std::move(result);
  if (anchors) *anchors = std::move(data.points);
  return step;
}

BoostStep cvxreg_boost_step(const ProblemStream& stream, std::size_t k, const Vector& x_prev,
                            const BoostConfig& config, const CurvatureBounds& bounds,
                            PrsState* warm) {
  config.validate();
  bounds.validate();
  check_iterate(x_prev, stream);

  const CompositeProblem problem = stream.problem_at(k);
  CvxRegDataset data;
  data.points = sample_anchors(x_prev, config, k);
  data.values.resize(config.ell);
  data.gradients.resize(data.points.rows(), config.ell);
  for (Index i = 0; i < config.ell; ++i) {
    const Vector xi = data.points.col(i);
    data.values[i] = problem.smooth.value(xi);
    Vector g = problem.smooth.gradient(xi);
    require_finite(g, xi, "gradient");
    if (!std::isfinite(data.values[i])) {
      throw EvaluationError("cvxreg_boost_step: non-finite function value", xi);
    }
    data.gradients.col(i) = std::move(g);
  }

  BoostStep step;
  step.stats.gradient_calls = static_cast<std::uint64_t>(config.ell);
  step.stats.refreshed = true;
  const auto start = Clock::now();
  const CvxRegResult result = cvxreg_fit(data, bounds, config.rho, config.stop, warm, config.prs);
  step.stats.solver_seconds = seconds_since(start);
  step.stats.inner_iterations = result.diagnostics.iterations;
  step.stats.inner_residual = result.diagnostics.residual;
  step.stats.max_violation = result.fit.max_violation;

  const Vector z = extract_regularized_gradient(result.fit, 0);
  Vector t = x_prev - config.alpha * z;
  step.x = problem.nonsmooth.prox(t, config.alpha);
  require_finite(step.x, t, "prox");
  return step;
}

void InterpolationCache::append(const Vector& point, const Vector& value) {
  const Index c = anchors.cols();
  anchors.conservativeResize(point.size(), c + 1);
  anchors.col(c) = point;
  fit.values.conservativeResize(value.size(), c + 1);
  fit.values.col(c) = value;
}

BoostStep opreg_boost_interpolated_step(const ProblemStream& stream, std::size_t k,
                                        const Vector& x_prev, const BoostConfig& config,
                                        InterpolationCache& cache, PrsState* warm) {
  config.validate();
  check_iterate(x_prev, stream);

  if (cache.empty() || k % static_cast<std::size_t>(config.tau) == 0) {
    OpRegResult fit;
    Matrix anchors;
    BoostStep step = opreg_boost_step(stream, k, x_prev, config, warm, &fit, &anchors);
    cache.anchors = std::move(anchors);
    cache.fit = std::move(fit.fit);
    return step;
  }
  if (cache.anchors.rows() != x_prev.size()) throw InvalidArgument("boost: cache dimension");

  const OperatorHandle T = stream.algorithmic_operator(k, config.alpha);
  const auto calls_before = T.calls();
  const Vector t = T(x_prev);
  require_finite(t, x_prev, "operator value");

  BoostStep step;
  step.stats.operator_calls = T.calls() - calls_before;
  interp::MapOptions options = config.map;
  options.start = t;
  const auto start = Clock::now();
  const interp::MapResult extended = interp::interpolate(cache.fit, cache.anchors, x_prev, options);
  step.stats.solver_seconds = seconds_since(start);
  step.stats.inner_iterations = extended.sweeps;
  step.stats.inner_residual = extended.step;
  step.stats.max_violation = extended.max_violation;

  // An anchor query returns the cached value and adds nothing new.
  bool known = false;
  for (Index i = 0; i < cache.anchors.cols() && !known; ++i) {
    known = (cache.anchors.col(i) - x_prev).norm() <= 1e-12;
  }
  if (!known) cache.append(x_prev, extended.value);

  step.x = prox_step(stream, k, extended.value, config.alpha);
  return step;
}

}  // namespace opreg
