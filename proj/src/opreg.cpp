#include "opreg/opreg.hpp"

#include <cmath>
#include <sstream>

#include "opreg/detail/consensus_prs.hpp"
#include "opreg/qcqp.hpp"

namespace opreg {

void StopRule::validate() const {
  if (max_iterations < 1) throw InvalidArgument("stop rule: max_iterations must be >= 1");
  if (!(tolerance >= 0.0)) throw InvalidArgument("stop rule: tolerance must be >= 0");
}

EdgeSet EdgeSet::complete(Index ell) {
  EdgeSet edges;
  if (ell > 1) edges.pairs.reserve(static_cast<std::size_t>(ell * (ell - 1) / 2));
  for (Index i = 0; i < ell; ++i) {
    for (Index j = i + 1; j < ell; ++j) edges.pairs.emplace_back(i, j);
  }
  return edges;
}

void RegressionDataset::validate() const {
  if (size() < 2) throw InvalidArgument("regression dataset needs at least 2 points");
  if (evaluations.rows() != points.rows() || evaluations.cols() != points.cols()) {
    throw InvalidArgument("regression dataset: points and evaluations differ in shape");
  }
  if (!points.allFinite() || !evaluations.allFinite()) {
    throw InvalidArgument("regression dataset: non-finite data");
  }
  if (distinguished_index < 0 || distinguished_index >= size()) {
    throw InvalidArgument("regression dataset: distinguished index out of range");
  }
}

double contraction_violation(const Matrix& values, const Matrix& points, double zeta) {
  double worst = 0.0;
  for (Index i = 0; i < values.cols(); ++i) {
    for (Index j = i + 1; j < values.cols(); ++j) {
      const double excess = (values.col(i) - values.col(j)).squaredNorm() -
                            zeta * zeta * (points.col(i) - points.col(j)).squaredNorm();
      worst = std::max(worst, excess);
    }
  }
  return worst;
}

double regression_objective(const Matrix& values, const Matrix& evaluations) {
  return 0.5 * (values - evaluations).squaredNorm();
}

OpRegResult opreg_fit(const RegressionDataset& data, double zeta, double rho,
                      const StopRule& stop, PrsState* warm, const PrsOptions& options) {
  data.validate();
  stop.validate();
  if (!(zeta > 0.0 && zeta < 1.0)) throw InvalidArgument("opreg_fit: zeta must lie in (0, 1)");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidArgument("opreg_fit: rho must be > 0");

  const Index n = data.dimension();
  const EdgeSet edges = EdgeSet::complete(data.size());
  std::vector<double> radius(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges.pairs[e];
    radius[e] = zeta * (data.points.col(i) - data.points.col(j)).norm();
  }

  auto local = [&](Index e, const Vector& w, Eigen::Ref<Vector> t) {
    qcqp::project_pair(w.head(n), w.tail(n), radius[static_cast<std::size_t>(e)], t.head(n),
                       t.tail(n));
  };

  PrsState cold;
  PrsState& state = warm ? *warm : cold;
  OpRegResult result;
  detail::consensus_prs(data.evaluations, edges, rho, stop, options, local, state,
                        result.fit.values, result.diagnostics);
  if (!result.fit.values.allFinite()) {
    throw EvaluationError("opreg_fit: splitting diverged",
                          result.fit.values.col(data.distinguished_index));
  }

  result.fit.zeta = zeta;
  result.fit.max_violation = contraction_violation(result.fit.values, data.points, zeta);
  result.diagnostics.max_violation = result.fit.max_violation;
  result.diagnostics.objective = regression_objective(result.fit.values, data.evaluations);
  return result;
}

Vector extract_boosted_value(const ContractiveEvaluations& fit, const RegressionDataset& data) {
  if (data.distinguished_index < 0 || data.distinguished_index >= fit.values.cols()) {
    throw InvalidArgument("extract_boosted_value: distinguished index out of range");
  }
  return fit.values.col(data.distinguished_index);
}

}  // namespace opreg
