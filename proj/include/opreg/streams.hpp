#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "opreg/baselines.hpp"
#include "opreg/core.hpp"

namespace opreg::bench {

/// 1/2 ||A x - b_k||^2 + w ||x||_1 with b_k = A y_k + e_k.
struct LassoStreamSpec {
  Index n = 1000;
  double w = 1000.0;
  double L = 1e8;
  double mu = 1.0;
  double noise_variance = 1e-2;
  double period = 0.1;  ///< seconds between problem changes
  double amplitude = 1.0;  ///< of each sinusoidal coordinate
  std::size_t horizon = 1000;
  std::uint64_t seed = 1;
  double x0_scale = 10.0;  ///< x_0 ~ N(0, x0_scale^2 I)

  void validate() const;
};

class LassoStream : public ProblemStream {
 public:
  explicit LassoStream(const LassoStreamSpec& spec);

  Index dimension() const override { return spec_.n; }
  std::size_t horizon() const override { return spec_.horizon; }
  double period() const override { return spec_.period; }
  std::uint64_t seed() const override { return spec_.seed; }
  std::string name() const override { return "lasso"; }
  Vector ground_truth(std::size_t k) const override;
  CompositeProblem problem_at(std::size_t k) const override;
  Vector initial_point() const override { return x0_; }

  const LassoStreamSpec& spec() const { return spec_; }
  const Matrix& matrix() const { return *A_; }
  /// The n/2 nonzero singular values used to build A, descending.
  const Vector& singular_values() const { return sigma_; }
  Vector observations(std::size_t k) const;
  /// 2 / (L + mu).
  double default_step() const { return 2.0 / (spec_.L + spec_.mu); }

 private:
  LassoStreamSpec spec_;
  std::shared_ptr<const Matrix> A_;
  Vector sigma_;
  Vector omega_, phase_;
  std::vector<bool> active_;
  Vector x0_;
};

/// Robust phase retrieval (1/m) sum_i |<a_i, x>^2 - b_{i,k}| over the unit
/// sphere, solved online with the prox-linear map.
struct PhaseStreamSpec {
  Index n = 50;
  Index m = 100;
  double L = 1e2;  ///< largest diagonal entry of D
  double mu = 1.0;
  double noise_scale = 1.0;  ///< Laplace scale
  int pieces = 1;            ///< constant segments of the signal over the horizon
  double period = 1.0;
  std::size_t horizon = 200;
  std::uint64_t seed = 1;
  double alpha = 1e-3;
  /// b = <a_i, y_k> + noise instead of the squared model.
  bool linear_measurements = false;
  AdmmConfig admm;

  void validate() const;
};

class PhaseStream : public ProblemStream {
 public:
  explicit PhaseStream(const PhaseStreamSpec& spec);

  Index dimension() const override { return spec_.n; }
  std::size_t horizon() const override { return spec_.horizon; }
  double period() const override { return spec_.period; }
  std::uint64_t seed() const override { return spec_.seed; }
  std::string name() const override { return "phase"; }
  Vector ground_truth(std::size_t k) const override;
  /// f_k with a subgradient, g = indicator of the unit sphere.
  CompositeProblem problem_at(std::size_t k) const override;
  /// y -> prox_{alpha f_{k,y}}(y) via the inner ADMM.
  OperatorHandle algorithmic_operator(std::size_t k, double alpha) const override;
  /// min(||x - y_k||, ||x + y_k||).
  double tracking_error(const Vector& x, std::size_t k) const override;
  Vector initial_point() const override { return x0_; }

  const PhaseStreamSpec& spec() const { return spec_; }
  const Matrix& matrix() const { return *A_; }
  Vector measurements(std::size_t k) const;
  double cost(const Vector& x, std::size_t k) const;
  /// Index of the signal segment active at step k.
  int piece_at(std::size_t k) const;

 private:
  PhaseStreamSpec spec_;
  std::shared_ptr<const Matrix> A_;
  Matrix signals_;  ///< n x pieces, unit columns
  Vector x0_;
};

}  // namespace opreg::bench
