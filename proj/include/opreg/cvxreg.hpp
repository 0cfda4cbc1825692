#pragma once

#include "opreg/core.hpp"
#include "opreg/prs.hpp"

namespace opreg {

/// Samples of a function and its gradient, one column per point.
struct CvxRegDataset {
  Matrix points;     ///< n x ell
  Vector values;     ///< ell function samples
  Matrix gradients;  ///< n x ell gradient samples

  Index size() const { return points.cols(); }
  Index dimension() const { return points.rows(); }
  /// ell >= 2, matching shapes, finite data, pairwise distinct points.
  void validate() const;
};

struct CvxRegSolution {
  Vector values;     ///< fitted phi_i
  Matrix gradients;  ///< fitted delta_i, n x ell
  double max_violation = 0.0;  ///< over all ordered pairs i != j
};

struct CvxRegResult {
  CvxRegSolution fit;
  PrsDiagnostics diagnostics;
};

/// Least-squares projection of (values, gradients) onto data interpolable by a
/// function of S_{mu,L}. Same splitting, warm start and extraction conventions
/// as opreg_fit; the node block is (phi_i, delta_i).
CvxRegResult cvxreg_fit(const CvxRegDataset& data, const CurvatureBounds& bounds, double rho,
                        const StopRule& stop = {}, PrsState* warm = nullptr,
                        const PrsOptions& options = {});

/// Fitted gradient at point `index`.
Vector extract_regularized_gradient(const CvxRegSolution& fit, Index index);

/// Largest positive residual of the S_{mu,L} interpolation inequalities
///   phi_i - phi_j - <delta_j, x_i - x_j> >= 1/(2(1 - mu/L)) (||delta_i - delta_j||^2 / L
///       + mu ||x_i - x_j||^2 - 2 mu/L <delta_i - delta_j, x_i - x_j>)
/// over ordered pairs i != j.
double interpolation_violation(const Vector& values, const Matrix& gradients,
                               const Matrix& points, const CurvatureBounds& bounds);

/// 1/2 sum_i (phi_i - y_i)^2 + ||delta_i - z_i||^2.
double cvxreg_objective(const CvxRegSolution& fit, const CvxRegDataset& data);

}  // namespace opreg
