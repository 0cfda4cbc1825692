#pragma once

#include "opreg/core.hpp"
#include "opreg/prs.hpp"

namespace opreg {

/// Anchor points and the operator evaluations to regularize, one column per point.
struct RegressionDataset {
  Matrix points;       ///< n x ell, column i is x_i
  Matrix evaluations;  ///< n x ell, column i is y_i = T(x_i)
  Index distinguished_index = 0;  ///< the column holding x_{k-1}

  Index size() const { return points.cols(); }
  Index dimension() const { return points.rows(); }
  /// ell >= 2, matching shapes, finite data, valid distinguished index.
  void validate() const;
};

/// Fitted operator values t_i, certified against the pairwise contraction
/// constraints ||t_i - t_j||^2 <= zeta^2 ||x_i - x_j||^2.
struct ContractiveEvaluations {
  Matrix values;  ///< n x ell
  double zeta = 0.0;
  double max_violation = 0.0;
};

struct OpRegResult {
  ContractiveEvaluations fit;
  PrsDiagnostics diagnostics;
};

/// Absolute tolerance on the squared-norm contraction constraints.
inline constexpr double kFeasibilityTolerance = 1e-6;

/// Projects the evaluations onto zeta-contractive interpolable data with the
/// edge-decomposed splitting; the fit is the consensus average at the last sweep.
/// `warm` (optional) supplies starting duals and receives the final ones.
OpRegResult opreg_fit(const RegressionDataset& data, double zeta, double rho,
                      const StopRule& stop = {}, PrsState* warm = nullptr,
                      const PrsOptions& options = {});

/// The fitted value at the distinguished anchor.
Vector extract_boosted_value(const ContractiveEvaluations& fit, const RegressionDataset& data);

/// max over i < j of (||t_i - t_j||^2 - zeta^2 ||x_i - x_j||^2)_+.
double contraction_violation(const Matrix& values, const Matrix& points, double zeta);

/// 1/2 sum_i ||t_i - y_i||^2.
double regression_objective(const Matrix& values, const Matrix& evaluations);

}  // namespace opreg
