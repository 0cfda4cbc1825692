#include "opreg/cvxreg.hpp"

#include <cmath>

#include "opreg/detail/consensus_prs.hpp"
#include "opreg/qcqp.hpp"

namespace opreg {

void CvxRegDataset::validate() const {
  if (size() < 2) throw InvalidArgument("convex-regression dataset needs at least 2 points");
  if (values.size() != size() || gradients.rows() != dimension() || gradients.cols() != size()) {
    throw InvalidArgument("convex-regression dataset: inconsistent shapes");
  }
  if (!points.allFinite() || !values.allFinite() || !gradients.allFinite()) {
    throw InvalidArgument("convex-regression dataset: non-finite data");
  }
  for (Index i = 0; i < size(); ++i) {
    for (Index j = i + 1; j < size(); ++j) {
      if ((points.col(i) - points.col(j)).norm() == 0.0) {
        throw InvalidArgument("convex-regression dataset: coincident points");
      }
    }
  }
}

double interpolation_violation(const Vector& values, const Matrix& gradients,
                               const Matrix& points, const CurvatureBounds& bounds) {
  const double mu = bounds.mu;
  const double L = bounds.L;
  const double factor = 1.0 / (2.0 * (1.0 - mu / L));
  double worst = 0.0;
  for (Index i = 0; i < points.cols(); ++i) {
    for (Index j = 0; j < points.cols(); ++j) {
      if (i == j) continue;
      const Vector dx = points.col(i) - points.col(j);
      const Vector dg = gradients.col(i) - gradients.col(j);
      const double lhs = values[i] - values[j] - gradients.col(j).dot(dx);
      const double rhs =
          factor * (dg.squaredNorm() / L + mu * dx.squaredNorm() - 2.0 * mu / L * dg.dot(dx));
      worst = std::max(worst, rhs - lhs);
    }
  }
  return worst;
}

double cvxreg_objective(const CvxRegSolution& fit, const CvxRegDataset& data) {
  return 0.5 * ((fit.values - data.values).squaredNorm() +
                (fit.gradients - data.gradients).squaredNorm());
}

CvxRegResult cvxreg_fit(const CvxRegDataset& data, const CurvatureBounds& bounds, double rho,
                        const StopRule& stop, PrsState* warm, const PrsOptions& options) {
  data.validate();
  stop.validate();
  if (!(bounds.mu > 0.0) || !(bounds.L > bounds.mu) || !std::isfinite(bounds.L)) {
    throw InvalidArgument("cvxreg_fit: needs L > mu > 0");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidArgument("cvxreg_fit: rho must be > 0");

  const Index n = data.dimension();
  const Index ell = data.size();
  const Index block = n + 1;
  const EdgeSet edges = EdgeSet::complete(ell);

  Matrix targets(block, ell);
  targets.row(0) = data.values.transpose();
  targets.bottomRows(n) = data.gradients;

  Matrix diffs(n, static_cast<Index>(edges.size()));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges.pairs[e];
    diffs.col(static_cast<Index>(e)) = data.points.col(i) - data.points.col(j);
  }

  // The splitting stores (phi_i, delta_i, phi_j, delta_j); the edge QCQP wants
  // (phi_i, phi_j, delta_i, delta_j).
  auto local = [&](Index e, const Vector& w, Eigen::Ref<Vector> t) {
    thread_local Vector stacked_w;
    thread_local Vector stacked_t;
    stacked_w.resize(2 * block);
    stacked_t.resize(2 * block);
    stacked_w[0] = w[0];
    stacked_w[1] = w[block];
    stacked_w.segment(2, n) = w.segment(1, n);
    stacked_w.segment(2 + n, n) = w.segment(block + 1, n);
    qcqp::project_two_constraint(stacked_w, diffs.col(e), bounds.mu, bounds.L, stacked_t);
    t[0] = stacked_t[0];
    t[block] = stacked_t[1];
    t.segment(1, n) = stacked_t.segment(2, n);
    t.segment(block + 1, n) = stacked_t.segment(2 + n, n);
  };

  PrsState cold;
  PrsState& state = warm ? *warm : cold;
  Matrix consensus;
  CvxRegResult result;
  detail::consensus_prs(targets, edges, rho, stop, options, local, state, consensus,
                        result.diagnostics);
  if (!consensus.allFinite()) {
    throw EvaluationError("cvxreg_fit: splitting diverged", consensus.col(0));
  }

  result.fit.values = consensus.row(0).transpose();
  result.fit.gradients = consensus.bottomRows(n);
  result.fit.max_violation =
      interpolation_violation(result.fit.values, result.fit.gradients, data.points, bounds);
  result.diagnostics.max_violation = result.fit.max_violation;
  result.diagnostics.objective = cvxreg_objective(result.fit, data);
  return result;
}

Vector extract_regularized_gradient(const CvxRegSolution& fit, Index index) {
  if (index < 0 || index >= fit.gradients.cols()) {
    throw InvalidArgument("extract_regularized_gradient: index out of range");
  }
  return fit.gradients.col(index);
}

}  // namespace opreg
