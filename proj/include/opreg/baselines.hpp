#pragma once

#include <cstdint>
#include <deque>
#include <optional>

#include "opreg/core.hpp"

namespace opreg {

/// One proximal-gradient step prox_{alpha g}(x - alpha grad f(x)).
Vector fb_step(const CompositeProblem& problem, double alpha, const Vector& x);

// ---------------------------------------------------------------------------
// FISTA

/// Momentum state; survives problem changes so the online runner can keep
/// accelerating across time steps.
struct FistaState {
  Vector x;  ///< last prox-gradient iterate
  Vector y;  ///< extrapolated point the next gradient is taken at
  double t = 1.0;
  double lipschitz = 0.0;  ///< current estimate 1/step (backtracking variant)
  std::uint64_t halvings = 0;

  static FistaState start(const Vector& x0);
};

struct BacktrackingOptions {
  double initial_lipschitz = 1.0;  ///< L_0, the first trial step is 1/L_0
  int max_halvings = 60;           ///< per step
};

/// Fixed step alpha.
void fista_step(FistaState& state, const CompositeProblem& problem, double alpha);

/// Halves the trial step until
///   f(x+) <= f(y) + <grad f(y), x+ - y> + ||x+ - y||^2 / (2 step).
/// The accepted step is kept for later iterations and never grows back.
/// Throws NonConvergence after max_halvings failed trials.
void fista_backtracking_step(FistaState& state, const CompositeProblem& problem,
                             const BacktrackingOptions& options = {});

// ---------------------------------------------------------------------------
// Anderson acceleration

/// Type-II Anderson mixing over the last `memory` residual differences of a
/// fixed-point map G; memory 0 is the plain iteration x+ = G(x).
struct AndersonState {
  int memory = 5;
  std::deque<Vector> iterates;  ///< x_i
  std::deque<Vector> images;    ///< G(x_i)
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  /// G at the point returned last, valid until the map changes.
  std::optional<Vector> cached_image;

  explicit AndersonState(int memory_depth = 5);
  /// Call whenever G changes (the cached image is no longer valid).
  void invalidate_cache() { cached_image.reset(); }
};

/// Returns the next iterate. The extrapolated candidate x_aa is accepted only
/// if ||G(x_aa) - x_aa|| < ||G(x_fb) - x_fb|| with x_fb = G(x); otherwise
/// x_fb is returned. Rank-deficient mixing systems drop the oldest history.
Vector anderson_step(AndersonState& state, const OperatorHandle& G, const Vector& x);

// ---------------------------------------------------------------------------
// Prox-linear method for f(x) = (1/m) sum_i |<a_i, x>^2 - b_i|

/// Linearization of f at y:
///   f_y(x) = (1/m) sum_i |<a_i,y>^2 + 2<a_i,y><a_i,x - y> - b_i|
///          = (1/m) sum_i |<c_i, x> - d_i|,  c_i = 2<a_i,y> a_i,  d_i = <a_i,y>^2 + b_i.
struct ProxLinearModel {
  Vector base;  ///< y
  Matrix C;     ///< rows c_i, m x n
  Vector d;
  double alpha = 0.0;

  static ProxLinearModel linearize(const Matrix& A, const Vector& b, const Vector& y,
                                   double alpha);
  Index measurements() const { return C.rows(); }
  /// f_y(x)
  double value(const Vector& x) const;
  /// f_y(x) + ||x - y||^2 / (2 alpha)
  double prox_objective(const Vector& x) const;
};

struct AdmmConfig {
  /// Initial penalty; <= 0 picks 1 / (alpha trace(C'C)/n), which balances the
  /// two terms of the x-update.
  double sigma = 0.0;
  double sigma_scale = 1.0;  ///< multiplies the automatic sigma
  /// Residual balancing: every balance_interval iterations sigma is doubled
  /// (halved) when the primal (dual) residual exceeds the other by balance_ratio.
  bool adaptive = true;
  int balance_interval = 5;
  double balance_ratio = 3.0;
  /// Over-relaxation of the Cx - d term in the u- and dual updates; 1 is plain ADMM.
  double relaxation = 1.8;
  /// When the zero/sign pattern of u is stable across two checks, solve the
  /// optimality system for that pattern directly and stop if it is consistent.
  /// Reported residuals are then those of the polished point.
  bool polish = true;
  double tolerance = 1e-8;  ///< on both primal and dual residual
  int max_iterations = 500;
  /// Residuals relative to the problem scale (max of ||Cx||, ||u||, ||d||
  /// for the primal, ||C' s|| sigma for the dual) instead of absolute.
  bool relative = false;

  void validate() const;
};

struct AdmmReport {
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

/// argmin_x f_y(x) + ||x - y||^2/(2 alpha) by ADMM on u = Cx - d: a cached
/// Cholesky solve with I/alpha + sigma C'C alternates with soft-thresholding.
/// Throws NonConvergence (last iterate, {primal, dual}) when the budget runs out.
Vector solve_prox_linear(const ProxLinearModel& model, const AdmmConfig& config = {},
                         AdmmReport* report = nullptr);

/// T(y) = prox_{alpha f_y}(y).
Vector prox_linear_step(const Matrix& A, const Vector& b, double alpha, const Vector& y,
                        const AdmmConfig& config = {}, AdmmReport* report = nullptr);

}  // namespace opreg
