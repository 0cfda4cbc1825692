#pragma once

// Independent reference solvers used by the unit and acceptance tests. They
// share no code with the library beyond the Eigen types.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Bisection for the root of a decreasing function on [lo, hi].
inline double bisect_decreasing(const std::function<double(double)>& f, double lo, double hi,
                                int iterations = 200) {
  for (int it = 0; it < iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Grows hi from `start` until f(hi) <= 0.
inline double bracket_decreasing(const std::function<double(double)>& f, double start = 1.0) {
  double hi = start;
  for (int it = 0; it < 400 && f(hi) > 0.0; ++it) hi *= 2.0;
  return hi;
}

// ---------------------------------------------------------------------------
// min 1/2||t_i - w_i||^2 + 1/2||t_j - w_j||^2  s.t. 1/2||t_i - t_j||^2 <= b

struct PairSolution {
  Vec t_i, t_j;
  double lambda = 0.0;
};

/// Stationarity gives the 2x2 system [[1+l, -l], [-l, 1+l]] (x) I; the
/// multiplier is found by bisection on the (decreasing) constraint value.
inline PairSolution pair_projection(const Vec& w_i, const Vec& w_j, double b) {
  auto solve = [&](double lambda, Vec& ti, Vec& tj) {
    Eigen::Matrix2d M;
    M << 1.0 + lambda, -lambda, -lambda, 1.0 + lambda;
    const Eigen::Matrix2d Minv = M.inverse();
    ti = Minv(0, 0) * w_i + Minv(0, 1) * w_j;
    tj = Minv(1, 0) * w_i + Minv(1, 1) * w_j;
  };
  auto excess = [&](double lambda) {
    Vec ti, tj;
    solve(lambda, ti, tj);
    return 0.5 * (ti - tj).squaredNorm() - b;
  };
  PairSolution out;
  if (excess(0.0) <= 0.0) {
    out.t_i = w_i;
    out.t_j = w_j;
    return out;
  }
  out.lambda = bisect_decreasing(excess, 0.0, bracket_decreasing(excess));
  solve(out.lambda, out.t_i, out.t_j);
  return out;
}

// ---------------------------------------------------------------------------
// Two-constraint edge problem of convex regression, in the layout
// t = (phi_i, phi_j, delta_i, delta_j).

/// (L - mu) times the violation of the S_{mu,L} interpolation inequality
///   f_a - f_b - <g_b, x_a - x_b> >= 1/(2(1 - mu/L)) (||g_a - g_b||^2/L
///       + mu||x_a - x_b||^2 - 2 mu/L <g_a - g_b, x_a - x_b>)
inline double interpolation_residual(double f_a, double f_b, const Vec& g_a, const Vec& g_b,
                                     const Vec& x_a, const Vec& x_b, double mu, double L) {
  const Vec dx = x_a - x_b;
  const Vec dg = g_a - g_b;
  const double rhs =
      L / (2.0 * (L - mu)) * (dg.squaredNorm() / L + mu * dx.squaredNorm() - 2.0 * mu / L * dg.dot(dx));
  return (L - mu) * (rhs - (f_a - f_b - g_b.dot(dx)));
}

struct EdgeConstraints {
  Mat P[2];
  Vec q[2];
  double r[2];

  double value(int k, const Vec& t) const { return 0.5 * t.dot(P[k] * t) + q[k].dot(t) + r[k]; }
};

/// Recovers the quadratic form of both constraints by exact central
/// differences (step 1 is exact on quadratics).
inline EdgeConstraints edge_constraints(const Vec& x_i, const Vec& x_j, double mu, double L) {
  const Eigen::Index n = x_i.size();
  const Eigen::Index N = 2 * (n + 1);
  auto c = [&](int k, const Vec& t) {
    const double phi_i = t[0], phi_j = t[1];
    const Vec d_i = t.segment(2, n), d_j = t.segment(2 + n, n);
    return k == 0 ? interpolation_residual(phi_i, phi_j, d_i, d_j, x_i, x_j, mu, L)
                  : interpolation_residual(phi_j, phi_i, d_j, d_i, x_j, x_i, mu, L);
  };
  EdgeConstraints out;
  const Vec zero = Vec::Zero(N);
  for (int k = 0; k < 2; ++k) {
    out.r[k] = c(k, zero);
    out.q[k].resize(N);
    out.P[k].resize(N, N);
    for (Eigen::Index a = 0; a < N; ++a) {
      const Vec ea = Vec::Unit(N, a);
      out.q[k][a] = 0.5 * (c(k, ea) - c(k, -ea));
      out.P[k](a, a) = c(k, ea) + c(k, -ea) - 2.0 * out.r[k];
    }
    for (Eigen::Index a = 0; a < N; ++a) {
      for (Eigen::Index b = a + 1; b < N; ++b) {
        const Vec eab = Vec::Unit(N, a) + Vec::Unit(N, b);
        const double mixed = c(k, eab) - out.r[k] - out.q[k][a] - out.q[k][b] -
                             0.5 * out.P[k](a, a) - 0.5 * out.P[k](b, b);
        out.P[k](a, b) = out.P[k](b, a) = mixed;
      }
    }
  }
  return out;
}

struct EdgeSolution {
  Vec t;
  double lambda1 = 0.0, lambda2 = 0.0;
  double objective = std::numeric_limits<double>::infinity();
  int pattern = -1;  // 0 none, 1 first, 2 second, 3 both
};

/// Enumerates the four activity patterns, solving each stationarity system
/// (I + l1 P1 + l2 P2) t = w - l1 q1 - l2 q2 densely. Keeps the KKT-valid
/// candidate with the smallest objective.
inline EdgeSolution edge_projection(const Vec& w, const Vec& x_i, const Vec& x_j, double mu,
                                    double L, double feas_tol = 1e-9) {
  const EdgeConstraints cons = edge_constraints(x_i, x_j, mu, L);
  const Eigen::Index N = w.size();
  auto t_of = [&](double l1, double l2) {
    const Mat M = Mat::Identity(N, N) + l1 * cons.P[0] + l2 * cons.P[1];
    return Vec(M.ldlt().solve(w - l1 * cons.q[0] - l2 * cons.q[1]));
  };
  const double scale = 1.0 + w.squaredNorm() + (L - mu) * (L + mu) * (x_i - x_j).squaredNorm();
  auto feasible = [&](const Vec& t) {
    return cons.value(0, t) <= feas_tol * scale && cons.value(1, t) <= feas_tol * scale;
  };

  EdgeSolution best;
  auto consider = [&](const Vec& t, double l1, double l2, int pattern) {
    if (l1 < 0.0 || l2 < 0.0 || !feasible(t)) return;
    const double obj = 0.5 * (t - w).squaredNorm();
    if (obj < best.objective) best = {t, l1, l2, obj, pattern};
  };

  consider(w, 0.0, 0.0, 0);
  for (int k = 0; k < 2; ++k) {
    auto ck = [&](double lam) {
      return cons.value(k, k == 0 ? t_of(lam, 0.0) : t_of(0.0, lam));
    };
    if (ck(0.0) <= 0.0) continue;
    const double lam = bisect_decreasing(ck, 0.0, bracket_decreasing(ck));
    consider(k == 0 ? t_of(lam, 0.0) : t_of(0.0, lam), k == 0 ? lam : 0.0, k == 0 ? 0.0 : lam,
             k + 1);
  }

  // Both active. For a fixed sum S = l1 + l2 the difference c1 - c2 is affine
  // in l1 (the quadratic parts agree), so it is solved by two evaluations; the
  // remaining scalar c1(S) is decreasing (derivative of a concave dual).
  auto split = [&](double S, double& l1) {
    auto gap = [&](double a) {
      const Vec t = t_of(a, S - a);
      return cons.value(0, t) - cons.value(1, t);
    };
    const double g0 = gap(0.0), g1 = gap(S > 0.0 ? S : 1.0);
    const double slope = (g1 - g0) / (S > 0.0 ? S : 1.0);
    l1 = slope != 0.0 ? -g0 / slope : 0.0;
  };
  auto c_sum = [&](double S) {
    double l1;
    split(S, l1);
    return cons.value(0, t_of(l1, S - l1));
  };
  if (c_sum(0.0) > 0.0) {
    const double S = bisect_decreasing(c_sum, 0.0, bracket_decreasing(c_sum));
    double l1;
    split(S, l1);
    consider(t_of(l1, S - l1), l1, S - l1, 3);
  }
  return best;
}

/// Random instance helper: standard normal vector.
inline Vec gaussian(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vec v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

// ---------------------------------------------------------------------------
// Prox of x -> (1/m) sum |<c_i, x> - d_i| with parameter alpha, by enumerating
// the sign/activity pattern of every residual. On the active set E the
// residuals vanish; off it the signs s_i are fixed and
//   x = y - (alpha/m) C_F' s_F - C_E' nu,   C_E x = d_E,
// with the certificate |nu_i| <= alpha/m for i in E. Feasible for small m only.
inline std::optional<Vec> l1_affine_prox(const Mat& C, const Vec& d, const Vec& y, double alpha) {
  const Eigen::Index m = C.rows();
  const Eigen::Index n = C.cols();
  const double w = alpha / static_cast<double>(m);
  long total = 1;
  for (Eigen::Index i = 0; i < m; ++i) total *= 3;
  std::optional<Vec> best;
  double best_value = std::numeric_limits<double>::infinity();
  for (long code = 0; code < total; ++code) {
    long c = code;
    std::vector<int> state(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      state[static_cast<std::size_t>(i)] = static_cast<int>(c % 3) - 1;  // -1, 0 (active), +1
      c /= 3;
    }
    Vec base = y;
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < m; ++i) {
      const int s = state[static_cast<std::size_t>(i)];
      if (s == 0) {
        active.push_back(i);
      } else {
        base -= w * s * C.row(i).transpose();
      }
    }
    Vec x = base;
    const auto k = static_cast<Eigen::Index>(active.size());
    if (k > 0) {
      if (k > n) continue;
      Mat CE(k, n);
      Vec dE(k);
      for (Eigen::Index a = 0; a < k; ++a) {
        CE.row(a) = C.row(active[static_cast<std::size_t>(a)]);
        dE[a] = d[active[static_cast<std::size_t>(a)]];
      }
      const Mat gram = CE * CE.transpose();
      Eigen::FullPivLU<Mat> lu(gram);
      if (lu.rank() < k) continue;
      const Vec nu = lu.solve(CE * base - dE);
      if ((nu.array().abs() > w * (1.0 + 1e-9)).any()) continue;
      x = base - CE.transpose() * nu;
    }
    bool consistent = true;
    for (Eigen::Index i = 0; i < m && consistent; ++i) {
      const int s = state[static_cast<std::size_t>(i)];
      const double r = C.row(i).dot(x) - d[i];
      if (s > 0 && r < -1e-12) consistent = false;
      if (s < 0 && r > 1e-12) consistent = false;
    }
    if (!consistent) continue;
    const double value = (C * x - d).lpNorm<1>() / static_cast<double>(m) +
                         (x - y).squaredNorm() / (2.0 * alpha);
    if (value < best_value) {
      best_value = value;
      best = x;
    }
  }
  return best;
}

}  // namespace oracle
