#include "opreg/qcqp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace opreg::qcqp {

void OneConstraintInstance::validate() const {
  if (w_i.size() != w_j.size()) throw InvalidArgument("one-constraint QCQP: block sizes differ");
  if (!(b > 0.0) || !std::isfinite(b)) throw InvalidArgument("one-constraint QCQP: b must be > 0");
  if (!w_i.allFinite() || !w_j.allFinite()) {
    throw InvalidArgument("one-constraint QCQP: non-finite anchor");
  }
}

double project_pair(ConstVectorRef w_i, ConstVectorRef w_j, double radius, VectorRef t_i,
                    VectorRef t_j) {
  const double gap = (w_i - w_j).norm();
  if (gap <= radius) {
    t_i = w_i;
    t_j = w_j;
    return 0.0;
  }
  // 1 + 2 lambda = gap / radius; written around the midpoint so that a tiny
  // radius never forms the (huge) multiplier explicitly.
  const double shrink = radius / gap;
  const double half = 0.5 * shrink;
  for (Index k = 0; k < w_i.size(); ++k) {
    const double mid = 0.5 * (w_i[k] + w_j[k]);
    const double delta = half * (w_i[k] - w_j[k]);
    t_i[k] = mid + delta;
    t_j[k] = mid - delta;
  }
  if (radius == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * (gap / radius - 1.0);
}

OneConstraintSolution solve_one_constraint(const OneConstraintInstance& inst) {
  inst.validate();
  OneConstraintSolution sol;
  sol.t_i.resize(inst.w_i.size());
  sol.t_j.resize(inst.w_j.size());
  sol.lambda = project_pair(inst.w_i, inst.w_j, std::sqrt(2.0 * inst.b), sol.t_i, sol.t_j);
  return sol;
}

void TwoConstraintInstance::validate() const {
  const Index n = x_i.size();
  if (x_j.size() != n || w.size() != 2 * (n + 1)) {
    throw InvalidArgument("two-constraint QCQP: expected w of size 2(n+1)");
  }
  if (!(bounds.mu > 0.0) || !(bounds.L > bounds.mu) || !std::isfinite(bounds.L)) {
    throw InvalidArgument("two-constraint QCQP: needs L > mu > 0");
  }
  if ((x_i - x_j).norm() == 0.0) throw InvalidArgument("two-constraint QCQP: x_i == x_j");
  if (!w.allFinite() || !x_i.allFinite() || !x_j.allFinite()) {
    throw InvalidArgument("two-constraint QCQP: non-finite data");
  }
}

namespace {

// Scalar reduction of the edge problem. With Lambda = lambda1 + lambda2 and
// lambda_m = lambda1 - lambda2, the constraints at t(lambda1, lambda2) read
//
//   c_1 = G / (1 + 2 Lambda)^2 - H + beta - C lambda_m
//   c_2 = G / (1 + 2 Lambda)^2 - H - beta + C lambda_m
//
// with G = ||2a - (L+mu)d||^2 / 8, H = (L-mu)^2 ||d||^2 / 8,
// beta = (L-mu)(<w3 + w4, d>/2 - (w1 - w2)), C = (L-mu)^2 (||d||^2 + 4) / 2,
// a = w3 - w4, d = x_i - x_j.
struct Reduced {
  double G;
  double excess;  // G - H, formed without cancellation
  double beta;
  double C;
  double K;  // C/2 - H = (L-mu)^2 (||d||^2/8 + 1)
  double width;  // (L - mu) ||d||
  double g;
};

// Root u >= 1 of G/u^2 + (K + s) - (C/2) u, given the value at u = 1 is positive.
// The function is convex and decreasing, so Newton from u = 1 increases
// monotonically to the root.
double single_active_root(const Reduced& r, double s) {
  double u = 1.0;
  const double half_c = 0.5 * r.C;
  for (int it = 0; it < 200; ++it) {
    const double u2 = u * u;
    const double f = r.G / u2 + (r.K + s) - half_c * u;
    const double df = -2.0 * r.G / (u2 * u) - half_c;
    const double step = -f / df;
    u += step;
    if (!(std::abs(step) > 1e-16 * u)) break;
  }
  return 0.5 * (u - 1.0);
}

}  // namespace

TwoConstraintMultipliers project_two_constraint(ConstVectorRef w, ConstVectorRef diff,
                                                double mu, double L, VectorRef t) {
  const Index n = diff.size();
  const auto w3 = w.segment(2, n);
  const auto w4 = w.segment(2 + n, n);
  const double kappa = L - mu;
  const double dist_sq = diff.squaredNorm();
  const double dist = std::sqrt(dist_sq);

  const double g = ((L + mu) * diff - 2.0 * (w3 - w4)).norm();
  const double sum_dot = (w3 + w4).dot(diff);
  const double phi_gap = w[0] - w[1];

  Reduced r;
  r.g = g;
  r.width = kappa * dist;
  r.G = g * g / 8.0;
  r.excess = (g - r.width) * (g + r.width) / 8.0;
  r.beta = kappa * (0.5 * sum_dot - phi_gap);
  r.C = kappa * kappa * (dist_sq + 4.0) / 2.0;
  r.K = kappa * kappa * (dist_sq / 8.0 + 1.0);

  TwoConstraintMultipliers out;
  const double c1_free = r.excess + r.beta;
  const double c2_free = r.excess - r.beta;
  if (c1_free <= 0.0 && c2_free <= 0.0) {
    out.active = ActiveSet::kNone;
  } else {
    bool found = false;
    if (c1_free > 0.0) {
      const double lam = single_active_root(r, r.beta);
      if (r.C * lam <= r.beta) {
        out = {lam, 0.0, ActiveSet::kFirst};
        found = true;
      }
    }
    if (!found && c2_free > 0.0) {
      const double lam = single_active_root(r, -r.beta);
      if (r.C * lam <= -r.beta) {
        out = {0.0, lam, ActiveSet::kSecond};
        found = true;
      }
    }
    if (!found) {
      // Both constraints hold with equality: their difference fixes lambda_m
      // and their sum is a quadratic in Lambda.
      const double lam_minus = r.beta / r.C;
      const double lam_plus = 0.5 * (g / r.width - 1.0);
      out.lambda1 = std::max(0.0, 0.5 * (lam_plus + lam_minus));
      out.lambda2 = std::max(0.0, 0.5 * (lam_plus - lam_minus));
      out.active = ActiveSet::kBoth;
    }
  }

  if (out.active == ActiveSet::kNone) {
    t = w;
    return out;
  }
  const double l1 = out.lambda1;
  const double l2 = out.lambda2;
  const double lam_sum = l1 + l2;
  const double lam_diff = l1 - l2;
  t[0] = w[0] + lam_diff * kappa;
  t[1] = w[1] - lam_diff * kappa;
  const double mix = 1.0 / (2.0 * (1.0 + 2.0 * lam_sum));
  const double shift_i = l1 * mu + l2 * L;
  const double shift_j = l1 * L + l2 * mu;
  for (Index k = 0; k < n; ++k) {
    const double u3 = w3[k] + shift_i * diff[k];
    const double u4 = w4[k] - shift_j * diff[k];
    const double mid = 0.5 * (u3 + u4);
    const double half_gap = mix * (u3 - u4);
    t[2 + k] = mid + half_gap;
    t[2 + n + k] = mid - half_gap;
  }
  return out;
}

TwoConstraintSolution solve_two_constraint(const TwoConstraintInstance& inst) {
  inst.validate();
  TwoConstraintSolution sol;
  sol.t.resize(inst.w.size());
  const Vector diff = inst.x_i - inst.x_j;
  const auto m = project_two_constraint(inst.w, diff, inst.bounds.mu, inst.bounds.L, sol.t);
  sol.lambda1 = m.lambda1;
  sol.lambda2 = m.lambda2;
  sol.active = m.active;
  return sol;
}

std::pair<double, double> two_constraint_values(ConstVectorRef t, ConstVectorRef x_i,
                                                ConstVectorRef x_j,
                                                const CurvatureBounds& bounds) {
  const Index n = x_i.size();
  const double mu = bounds.mu;
  const double L = bounds.L;
  const double kappa = L - mu;
  const Vector diff = x_i - x_j;
  const auto di = t.segment(2, n);
  const auto dj = t.segment(2 + n, n);
  const double quad = 0.5 * (di - dj).squaredNorm();
  const double r = 0.5 * L * mu * diff.squaredNorm();
  const double phi = kappa * (t[0] - t[1]);
  const double c1 = quad - phi - mu * di.dot(diff) + L * dj.dot(diff) + r;
  const double c2 = quad + phi - L * di.dot(diff) + mu * dj.dot(diff) + r;
  return {c1, c2};
}

double two_constraint_scale(ConstVectorRef t, ConstVectorRef x_i, ConstVectorRef x_j,
                            const CurvatureBounds& bounds) {
  const Index n = x_i.size();
  const double L = bounds.L;
  const double kappa = L - bounds.mu;
  const Vector diff = x_i - x_j;
  const auto di = t.segment(2, n);
  const auto dj = t.segment(2 + n, n);
  const double terms[] = {0.5 * (di - dj).squaredNorm(),
                          kappa * std::abs(t[0]),
                          kappa * std::abs(t[1]),
                          L * std::abs(di.dot(diff)),
                          L * std::abs(dj.dot(diff)),
                          0.5 * L * bounds.mu * diff.squaredNorm(),
                          1.0};
  return *std::max_element(std::begin(terms), std::end(terms));
}

}  // namespace opreg::qcqp
