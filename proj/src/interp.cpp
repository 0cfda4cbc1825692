#include "opreg/interp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace opreg::interp {

BallSystem BallSystem::for_query(const ContractiveEvaluations& fitted, const Matrix& anchors,
                                 const Vector& query) {
  if (fitted.values.cols() != anchors.cols() || fitted.values.rows() != anchors.rows() ||
      query.size() != anchors.rows()) {
    throw InvalidArgument("ball system: fitted values, anchors and query disagree in shape");
  }
  BallSystem balls;
  balls.centers = fitted.values;
  balls.radii.resize(anchors.cols());
  for (Index i = 0; i < anchors.cols(); ++i) {
    balls.radii[i] = fitted.zeta * (query - anchors.col(i)).norm();
  }
  return balls;
}

Vector BallSystem::violations(const Vector& p) const {
  Vector out(radii.size());
  for (Index i = 0; i < radii.size(); ++i) {
    const double dist = (p - centers.col(i)).norm();
    const double excess = std::max(0.0, dist - radii[i]);
    out[i] = std::max(excess, excess * (dist + radii[i]));
  }
  return out;
}

Vector project_onto_ball(const Vector& u, const Vector& center, double radius) {
  const double dist = (u - center).norm();
  if (dist <= radius) return u;
  return center + (radius / dist) * (u - center);
}

MapResult alternating_projections(const BallSystem& balls, const Vector& start,
                                  const MapOptions& options) {
  const Index ell = balls.radii.size();
  if (ell == 0) throw InvalidArgument("alternating projections: empty ball system");
  MapResult result;
  result.value = start;
  const double tolerance = options.acceptance_tolerance();
  Vector previous(start.size());
  Vector excess = balls.violations(result.value);
  bool settled = false;
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    previous = result.value;
    for (Index i = 0; i < ell; ++i) {
      result.value = project_onto_ball(result.value, balls.centers.col(i), balls.radii[i]);
    }
    result.sweeps = sweep + 1;
    result.step = (result.value - previous).norm();
    // In thin intersections the sweeps crawl; a small step alone does not
    // mean the iterate has reached every ball.
    if (result.step <= options.theta) {
      excess = balls.violations(result.value);
      if (excess.maxCoeff() <= tolerance) {
        settled = true;
        break;
      }
    }
  }
  if (!settled) excess = balls.violations(result.value);
  result.max_violation = excess.maxCoeff();
  if (!settled) {
    throw NonConvergence("alternating projections did not reach the ball intersection",
                         result.value, std::vector<double>(excess.begin(), excess.end()));
  }
  return result;
}

MapResult interpolate(const ContractiveEvaluations& fitted, const Matrix& anchors,
                      const Vector& query, const MapOptions& options) {
  if (anchors.cols() < 1) throw InvalidArgument("interpolate: no anchors");
  if (!(options.theta > 0.0)) throw InvalidArgument("interpolate: theta must be > 0");
  if (options.max_sweeps < 1) throw InvalidArgument("interpolate: max_sweeps must be >= 1");

  const BallSystem balls = BallSystem::for_query(fitted, anchors, query);

  Index nearest = 0;
  double nearest_dist = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < anchors.cols(); ++i) {
    const double dist = (query - anchors.col(i)).norm();
    if (dist < nearest_dist) {
      nearest_dist = dist;
      nearest = i;
    }
  }
  if (nearest_dist <= 1e-12) {
    MapResult at_anchor;
    at_anchor.value = fitted.values.col(nearest);
    return at_anchor;
  }

  const Vector start = options.start ? *options.start : Vector(fitted.values.col(nearest));
  if (start.size() != query.size()) throw InvalidArgument("interpolate: start has wrong size");
  return alternating_projections(balls, start, options);
}

}  // namespace opreg::interp
