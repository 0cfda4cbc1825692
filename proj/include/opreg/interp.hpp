#pragma once

#include <optional>

#include "opreg/core.hpp"
#include "opreg/opreg.hpp"

namespace opreg::interp {

/// Balls B(c_i, r_i) whose intersection holds every zeta-Lipschitz extension
/// value at a query point: c_i = t_i, r_i = zeta ||x - x_i||.
struct BallSystem {
  Matrix centers;  ///< n x ell
  Vector radii;    ///< ell, >= 0

  static BallSystem for_query(const ContractiveEvaluations& fitted, const Matrix& anchors,
                              const Vector& query);
  /// Per-ball excess: the larger of (||p - c_i|| - r_i)_+ and
  /// (||p - c_i||^2 - r_i^2)_+, so one tolerance covers both constraint forms.
  Vector violations(const Vector& p) const;
};

/// Exact Euclidean projection onto B(center, radius).
Vector project_onto_ball(const Vector& u, const Vector& center, double radius);

struct MapOptions {
  double theta = 1e-9;   ///< stop when a full sweep moves the iterate by <= theta
  int max_sweeps = 500;
  /// Starting point; defaults to the fitted value at the anchor nearest to the query.
  std::optional<Vector> start;

  double acceptance_tolerance() const { return std::max(theta * 10.0, 1e-8); }
};

struct MapResult {
  Vector value;
  int sweeps = 0;
  double step = 0.0;           ///< movement of the last sweep
  double max_violation = 0.0;  ///< largest ball excess of `value`
};

/// Alternating projections onto the balls in ascending index order. Stops
/// once a sweep moves the iterate by <= theta and the iterate lies in every
/// ball within the acceptance tolerance. Throws NonConvergence (last iterate,
/// per-ball excess) when max_sweeps runs out first.
MapResult alternating_projections(const BallSystem& balls, const Vector& start,
                                  const MapOptions& options);

/// Valentine-style extension of a fitted contractive operator to `query`.
/// A query equal to an anchor (within 1e-12) returns that anchor's fit.
MapResult interpolate(const ContractiveEvaluations& fitted, const Matrix& anchors,
                      const Vector& query, const MapOptions& options = {});

}  // namespace opreg::interp
