#include "opreg/baselines.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace opreg {

namespace {

void require_step(double alpha, const char* who) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument(std::string(who) + ": step size must be positive");
  }
}

Vector checked_gradient(const CompositeProblem& problem, const Vector& x) {
  Vector g = problem.smooth.gradient(x);
  require_finite(g, x, "gradient");
  return g;
}

Vector checked_prox(const CompositeProblem& problem, const Vector& y, double alpha) {
  Vector p = problem.nonsmooth.prox(y, alpha);
  require_finite(p, y, "prox");
  return p;
}

}  // namespace

Vector fb_step(const CompositeProblem& problem, double alpha, const Vector& x) {
  require_step(alpha, "fb_step");
  return checked_prox(problem, x - alpha * checked_gradient(problem, x), alpha);
}

// ---------------------------------------------------------------------------

FistaState FistaState::start(const Vector& x0) {
  FistaState s;
  s.x = x0;
  s.y = x0;
  return s;
}

namespace {

void momentum_update(FistaState& state, Vector next) {
  const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * state.t * state.t));
  const double weight = (state.t - 1.0) / t_next;
  state.y = next + weight * (next - state.x);
  state.x = std::move(next);
  state.t = t_next;
}

}  // namespace

void fista_step(FistaState& state, const CompositeProblem& problem, double alpha) {
  require_step(alpha, "fista_step");
  if (state.y.size() != problem.dimension()) throw InvalidArgument("fista_step: state size");
  Vector next = checked_prox(problem, state.y - alpha * checked_gradient(problem, state.y), alpha);
  momentum_update(state, std::move(next));
}

void fista_backtracking_step(FistaState& state, const CompositeProblem& problem,
                             const BacktrackingOptions& options) {
  if (!(options.initial_lipschitz > 0.0)) {
    throw InvalidArgument("fista_backtracking_step: initial Lipschitz estimate must be > 0");
  }
  if (state.y.size() != problem.dimension()) {
    throw InvalidArgument("fista_backtracking_step: state size");
  }
  if (!(state.lipschitz > 0.0)) state.lipschitz = options.initial_lipschitz;

  const Vector& y = state.y;
  const Vector grad = checked_gradient(problem, y);
  const double fy = problem.smooth.value(y);
  for (int halving = 0;; ++halving) {
    const double step = 1.0 / state.lipschitz;
    Vector next = checked_prox(problem, y - step * grad, step);
    const Vector diff = next - y;
    const double linear = grad.dot(diff);
    const double model = fy + linear + 0.5 * state.lipschitz * diff.squaredNorm();
    const double fnext = problem.smooth.value(next);
    // Near a minimizer both sides agree to rounding; allow a few ulps.
    const double slack = 16.0 * std::numeric_limits<double>::epsilon() *
                         (std::abs(fy) + std::abs(fnext) + std::abs(linear));
    if (fnext <= model + slack) {
      momentum_update(state, std::move(next));
      return;
    }
    if (halving == options.max_halvings) {
      throw NonConvergence("fista_backtracking_step: no sufficient decrease after " +
                               std::to_string(options.max_halvings) + " step halvings",
                           next);
    }
    state.lipschitz *= 2.0;
    ++state.halvings;
  }
}

// ---------------------------------------------------------------------------

AndersonState::AndersonState(int memory_depth) : memory(memory_depth) {
  if (memory_depth < 0) throw InvalidArgument("Anderson memory must be >= 0");
}

Vector anderson_step(AndersonState& state, const OperatorHandle& G, const Vector& x) {
  if (state.memory < 0) throw InvalidArgument("anderson_step: memory must be >= 0");
  Vector gx = state.cached_image ? *state.cached_image : G(x);
  state.cached_image.reset();
  require_finite(gx, x, "fixed-point map value");

  state.iterates.push_back(x);
  state.images.push_back(gx);
  const auto keep = static_cast<std::size_t>(state.memory) + 1;
  while (state.iterates.size() > keep) {
    state.iterates.pop_front();
    state.images.pop_front();
  }
  if (state.iterates.size() < 2) return gx;

  // min || f_k - dF gamma ||, x_aa = g_k - dG gamma.
  auto solve_mixing = [&](Vector& out) {
    while (state.iterates.size() >= 2) {
      const auto cols = static_cast<Index>(state.iterates.size()) - 1;
      Matrix dF(x.size(), cols), dG(x.size(), cols);
      for (Index c = 0; c < cols; ++c) {
        const auto a = static_cast<std::size_t>(c), b = a + 1;
        dG.col(c) = state.images[b] - state.images[a];
        dF.col(c) = dG.col(c) - (state.iterates[b] - state.iterates[a]);
      }
      const Vector fk = state.images.back() - state.iterates.back();
      Eigen::ColPivHouseholderQR<Matrix> qr(dF);
      qr.setThreshold(1e-12);
      if (qr.rank() == cols) {
        const Vector gamma = qr.solve(fk);
        out = state.images.back() - dG * gamma;
        if (out.allFinite()) return true;
      }
      state.iterates.pop_front();
      state.images.pop_front();
    }
    return false;
  };

  Vector x_aa;
  if (!solve_mixing(x_aa)) return gx;

  const Vector& x_fb = gx;
  Vector g_fb = G(x_fb);
  Vector g_aa = G(x_aa);
  const double r_fb = (g_fb - x_fb).norm();
  const double r_aa = g_aa.allFinite() ? (g_aa - x_aa).norm() : std::numeric_limits<double>::infinity();
  if (r_aa < r_fb) {
    ++state.accepted;
    state.cached_image = std::move(g_aa);
    return x_aa;
  }
  ++state.rejected;
  state.cached_image = std::move(g_fb);
  return x_fb;
}

// ---------------------------------------------------------------------------

ProxLinearModel ProxLinearModel::linearize(const Matrix& A, const Vector& b, const Vector& y,
                                           double alpha) {
  require_step(alpha, "prox-linear");
  if (A.rows() != b.size() || A.cols() != y.size()) {
    throw InvalidArgument("prox-linear: dimension mismatch");
  }
  ProxLinearModel model;
  model.base = y;
  model.alpha = alpha;
  const Vector inner = A * y;
  model.C = (2.0 * inner).asDiagonal() * A;
  model.d = inner.array().square().matrix() + b;
  return model;
}

double ProxLinearModel::value(const Vector& x) const {
  return (C * x - d).lpNorm<1>() / static_cast<double>(measurements());
}

double ProxLinearModel::prox_objective(const Vector& x) const {
  return value(x) + (x - base).squaredNorm() / (2.0 * alpha);
}

void AdmmConfig::validate() const {
  if (!std::isfinite(sigma)) throw InvalidArgument("ADMM: sigma must be finite");
  if (!(tolerance > 0.0)) throw InvalidArgument("ADMM: tolerance must be > 0");
  if (max_iterations < 1) throw InvalidArgument("ADMM: max_iterations must be >= 1");
  if (!(relaxation > 0.0 && relaxation < 2.0)) {
    throw InvalidArgument("ADMM: relaxation must lie in (0, 2)");
  }
  if (balance_interval < 1 || !(balance_ratio > 1.0) || !(sigma_scale > 0.0)) {
    throw InvalidArgument("ADMM: bad balancing parameters");
  }
}

namespace {

/// Sign pattern of u: 0 where soft-thresholding zeroed the entry.
std::vector<signed char> pattern_of(const Vector& u) {
  std::vector<signed char> p(static_cast<std::size_t>(u.size()));
  for (Index i = 0; i < u.size(); ++i) p[static_cast<std::size_t>(i)] = (u[i] > 0) - (u[i] < 0);
  return p;
}

/// Solves the optimality system for a guessed pattern exactly: rows with a
/// zero entry are fitted (C_E x = d_E, multipliers |nu| <= 1/m), the others
/// contribute sign_i c_i / m to the gradient. Succeeds only if the result is
/// consistent with the guess.
bool polish(const ProxLinearModel& model, const std::vector<signed char>& pattern,
            double tolerance, Vector* x_out, AdmmReport* report) {
  const double inv_m = 1.0 / static_cast<double>(model.measurements());
  std::vector<Index> fitted;
  Vector signs = Vector::Zero(model.measurements());
  for (Index i = 0; i < model.measurements(); ++i) {
    if (pattern[static_cast<std::size_t>(i)] == 0) {
      fitted.push_back(i);
    } else {
      signs[i] = pattern[static_cast<std::size_t>(i)];
    }
  }
  const auto e = static_cast<Index>(fitted.size());
  if (e > model.C.cols()) return false;
  const Vector shifted = model.base - model.alpha * inv_m * (model.C.transpose() * signs);
  Vector x = shifted;
  Vector nu = Vector::Zero(e);
  if (e > 0) {
    Matrix CE(e, model.C.cols());
    Vector dE(e);
    for (Index j = 0; j < e; ++j) {
      CE.row(j) = model.C.row(fitted[static_cast<std::size_t>(j)]);
      dE[j] = model.d[fitted[static_cast<std::size_t>(j)]];
    }
    const Eigen::ColPivHouseholderQR<Matrix> qr(model.alpha * CE * CE.transpose());
    if (qr.rank() < e) return false;
    nu = qr.solve(CE * shifted - dE);
    x = shifted - model.alpha * (CE.transpose() * nu);
  }
  if (!x.allFinite()) return false;
  const Vector r = model.C * x - model.d;
  double fit = 0.0;
  for (Index j = 0; j < e; ++j) fit += r[fitted[static_cast<std::size_t>(j)]] * r[fitted[static_cast<std::size_t>(j)]];
  fit = std::sqrt(fit);
  if (fit > tolerance) return false;
  if ((nu.array().abs() > inv_m * (1.0 + 1e-10)).any()) return false;
  if ((signs.array() * r.array() < 0.0).any()) return false;
  *x_out = x;
  if (report) {
    report->primal_residual = fit;
    report->dual_residual = 0.0;
  }
  return true;
}

}  // namespace

Vector solve_prox_linear(const ProxLinearModel& model, const AdmmConfig& config,
                         AdmmReport* report) {
  config.validate();
  const double inv_m = 1.0 / static_cast<double>(model.measurements());
  const Matrix gram = model.C.transpose() * model.C;
  // sigma ||C||^2 should be comparable to 1/alpha; trace/n is a cheap proxy
  // for the typical eigenvalue of C'C.
  double sigma = config.sigma;
  if (!(sigma > 0.0)) {
    const double typical = std::max(gram.trace() / static_cast<double>(gram.rows()), 1e-300);
    sigma = config.sigma_scale / (model.alpha * typical);
  }

  Eigen::LLT<Matrix> factor;
  auto refactor = [&] {
    Matrix system = sigma * gram;
    system.diagonal().array() += 1.0 / model.alpha;
    factor.compute(system);
    if (factor.info() != Eigen::Success) {
      throw EvaluationError("prox-linear: factorization failed", model.base);
    }
  };
  refactor();

  Vector x = model.base;
  Vector residual = model.C * x - model.d;
  Vector u = residual;
  Vector s = Vector::Zero(u.size());  // scaled dual, multiplier = sigma s
  Vector u_prev(u.size());
  const Vector scaled_base = model.base / model.alpha;
  const Vector Ctd = model.C.transpose() * model.d;

  AdmmReport local;
  std::vector<signed char> last_pattern;
  for (int it = 0; it < config.max_iterations; ++it) {
    x = factor.solve(scaled_base + sigma * (Ctd + model.C.transpose() * (u - s)));
    const Vector cx = model.C * x;
    residual = cx - model.d;
    u_prev = u;
    const Vector relaxed = config.relaxation * residual + (1.0 - config.relaxation) * u_prev;
    u = soft_threshold(relaxed + s, inv_m / sigma);
    s += relaxed - u;
    const Vector gap = residual - u;

    local.iterations = it + 1;
    local.primal_residual = gap.norm();
    local.dual_residual = sigma * (model.C.transpose() * (u - u_prev)).norm();
    double primal_scale = 1.0, dual_scale = 1.0;
    if (config.relative) {
      primal_scale = std::max({1.0, cx.norm(), u.norm(), model.d.norm()});
      dual_scale = std::max(1.0, sigma * (model.C.transpose() * s).norm());
    }
    const double primal = local.primal_residual / primal_scale;
    const double dual = local.dual_residual / dual_scale;
    if (primal <= config.tolerance && dual <= config.tolerance) {
      if (report) *report = local;
      if (!x.allFinite()) throw EvaluationError("prox-linear: non-finite iterate", model.base);
      return x;
    }
    if ((it + 1) % config.balance_interval == 0) {
      if (config.polish) {
        auto pattern = pattern_of(u);
        if (pattern == last_pattern && polish(model, pattern, config.tolerance, &x, &local)) {
          if (report) *report = local;
          return x;
        }
        last_pattern = std::move(pattern);
      }
    }
    // Residual balancing; the scaled dual is rescaled so sigma s is unchanged.
    if (config.adaptive && (it + 1) % config.balance_interval == 0) {
      double change = 1.0;
      if (primal > config.balance_ratio * dual) change = 2.0;
      if (dual > config.balance_ratio * primal) change = 0.5;
      if (change != 1.0) {
        sigma *= change;
        s /= change;
        refactor();
      }
    }
  }
  if (config.polish && polish(model, pattern_of(u), config.tolerance, &x, &local)) {
    if (report) *report = local;
    return x;
  }
  if (report) *report = local;
  throw NonConvergence("prox-linear: inner ADMM did not converge", x,
                       {local.primal_residual, local.dual_residual});
}

Vector prox_linear_step(const Matrix& A, const Vector& b, double alpha, const Vector& y,
                        const AdmmConfig& config, AdmmReport* report) {
  return solve_prox_linear(ProxLinearModel::linearize(A, b, y, alpha), config, report);
}

}  // namespace opreg
