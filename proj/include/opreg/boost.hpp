#pragma once

#include <cstddef>
#include <cstdint>

#include "opreg/core.hpp"
#include "opreg/cvxreg.hpp"
#include "opreg/interp.hpp"
#include "opreg/opreg.hpp"

namespace opreg {

struct BoostConfig {
  Index ell = 3;              ///< anchors per step, x_{k-1} included
  double alpha = 1.0;         ///< step size of T_k and of the prox
  double zeta = 0.9;
  double rho = 1.0;           ///< PRS penalty
  double sample_sigma = 0.1;  ///< anchors are x_{k-1} + sample_sigma N(0, I)
  int tau = 2;                ///< interpolated variant: refresh when k % tau == 0
  StopRule stop;
  std::uint64_t rng_seed = 0;
  interp::MapOptions map;
  PrsOptions prs;

  void validate() const;
};

struct StepStats {
  std::uint64_t operator_calls = 0;
  std::uint64_t gradient_calls = 0;
  int inner_iterations = 0;     ///< PRS sweeps, or MAP sweeps on interpolated steps
  double inner_residual = 0.0;
  double max_violation = 0.0;
  double solver_seconds = 0.0;  ///< regression / interpolation only
  bool refreshed = false;       ///< a new regression was solved
};

struct BoostStep {
  Vector x;
  StepStats stats;
};

/// Column 0 is x_prev; columns 1..ell-1 are Gaussian perturbations drawn from
/// a generator seeded by (rng_seed, k) alone.
Matrix sample_anchors(const Vector& x_prev, const BoostConfig& config, std::size_t k);

/// One OpReg-Boost step: ell evaluations of T_k at the anchors, regression onto
/// zeta-contractive data, x_k = prox_{alpha g_k}(t_hat at x_prev).
/// `warm` carries PRS duals between steps (nullptr: cold start).
BoostStep opreg_boost_step(const ProblemStream& stream, std::size_t k, const Vector& x_prev,
                           const BoostConfig& config, PrsState* warm = nullptr,
                           OpRegResult* fit = nullptr, Matrix* anchors = nullptr);

/// One CvxReg-Boost step: ell samples of (f_k, grad f_k), regression onto
/// S_{mu,L}-interpolable data, x_k = prox_{alpha g_k}(x_prev - alpha z_hat).
BoostStep cvxreg_boost_step(const ProblemStream& stream, std::size_t k, const Vector& x_prev,
                            const BoostConfig& config, const CurvatureBounds& bounds,
                            PrsState* warm = nullptr);

/// Last fitted operator, extended by every interpolated value since.
struct InterpolationCache {
  Matrix anchors;
  ContractiveEvaluations fit;

  bool empty() const { return anchors.cols() == 0; }
  void append(const Vector& point, const Vector& value);
};

/// Refreshes (a full opreg_boost_step) when k % tau == 0 or the cache is
/// empty. Otherwise makes one call t_k = T_k(x_prev) and extends the cached
/// operator to x_prev by alternating projections started at t_k.
BoostStep opreg_boost_interpolated_step(const ProblemStream& stream, std::size_t k,
                                        const Vector& x_prev, const BoostConfig& config,
                                        InterpolationCache& cache, PrsState* warm = nullptr);

}  // namespace opreg
