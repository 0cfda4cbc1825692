#pragma once

#include <utility>

#include "opreg/core.hpp"

// Closed-form solvers for the two small QCQPs solved on every edge of the
// consensus splittings:
//
//   one constraint:  min 1/2 ||(t_i,t_j) - (w_i,w_j)||^2  s.t. 1/2 ||t_i - t_j||^2 <= b
//   two constraints: min 1/2 ||t - w||^2  s.t. 1/2 t'Pt + <t,q_k> + r <= 0, k = 1,2
//
// where t = (phi_i, phi_j, delta_i, delta_j) in R^{2(n+1)} and P, q_1, q_2, r encode
// the pairwise S_{mu,L} interpolation inequalities of a convex-regression edge.

namespace opreg::qcqp {

using VectorRef = Eigen::Ref<Vector>;
using ConstVectorRef = Eigen::Ref<const Vector>;

struct OneConstraintInstance {
  Vector w_i;
  Vector w_j;
  double b = 0.0;  ///< constraint level, > 0

  void validate() const;
};

struct OneConstraintSolution {
  Vector t_i;
  Vector t_j;
  double lambda = 0.0;
};

OneConstraintSolution solve_one_constraint(const OneConstraintInstance& inst);

/// Allocation-free kernel behind solve_one_constraint, parametrized by the
/// radius sqrt(2b) of the constraint ||t_i - t_j|| <= radius. A zero radius
/// (coincident anchors) yields the midpoint t_i = t_j = (w_i + w_j)/2 and an
/// infinite multiplier. Outputs may alias nothing else. Returns lambda.
double project_pair(ConstVectorRef w_i, ConstVectorRef w_j, double radius, VectorRef t_i,
                    VectorRef t_j);

/// Which inequality constraints carry a positive multiplier.
enum class ActiveSet { kNone, kFirst, kSecond, kBoth };

struct TwoConstraintInstance {
  Vector w;    ///< stacked (phi_i, phi_j, delta_i, delta_j), size 2(n+1)
  Vector x_i;  ///< anchor points, size n, x_i != x_j
  Vector x_j;
  CurvatureBounds bounds;  ///< needs L > mu > 0

  Index dimension() const { return x_i.size(); }
  void validate() const;
};

struct TwoConstraintSolution {
  Vector t;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  ActiveSet active = ActiveSet::kNone;
};

TwoConstraintSolution solve_two_constraint(const TwoConstraintInstance& inst);

struct TwoConstraintMultipliers {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  ActiveSet active = ActiveSet::kNone;
};

/// Kernel behind solve_two_constraint. `diff` is x_i - x_j; w and t use the
/// stacked layout and may not alias. No validation.
TwoConstraintMultipliers project_two_constraint(ConstVectorRef w, ConstVectorRef diff,
                                                double mu, double L, VectorRef t);

/// Values (c_1(t), c_2(t)) of the two constraint functions; feasible iff both <= 0.
std::pair<double, double> two_constraint_values(ConstVectorRef t, ConstVectorRef x_i,
                                                ConstVectorRef x_j, const CurvatureBounds& bounds);

/// Magnitude of the largest term entering c_1, c_2 at t (at least 1); used to
/// express constraint residuals relative to the arithmetic scale they are formed at.
double two_constraint_scale(ConstVectorRef t, ConstVectorRef x_i, ConstVectorRef x_j,
                            const CurvatureBounds& bounds);

}  // namespace opreg::qcqp
