#include "opreg/streams.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace opreg::bench {

namespace {

enum Tag : std::uint32_t { kMatrix = 1, kSignal = 2, kNoise = 3, kStart = 4 };

std::mt19937_64 make_rng(std::uint64_t seed, Tag tag, std::uint64_t k = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(k),
                    static_cast<std::uint32_t>(k >> 32)};
  return std::mt19937_64(seq);
}

Matrix gaussian_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal;
  Matrix G(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) G(r, c) = normal(rng);
  return G;
}

/// First `cols` columns of the orthogonal factor of a Gaussian matrix.
Matrix orthonormal_columns(std::mt19937_64& rng, Index rows, Index cols) {
  const Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(rng, rows, cols));
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

}  // namespace

// ---------------------------------------------------------------------------

void LassoStreamSpec::validate() const {
  if (n < 2 || n % 2 != 0) throw InvalidArgument("lasso stream: n must be even and >= 2");
  if (!(mu > 0.0) || !(L > mu) || !std::isfinite(L)) {
    throw InvalidArgument("lasso stream: need 0 < mu < L");
  }
  if (!(w >= 0.0) || !(noise_variance >= 0.0) || !(period > 0.0) || !(x0_scale >= 0.0) ||
      !std::isfinite(amplitude)) {
    throw InvalidArgument("lasso stream: bad weight, noise, period, amplitude or start scale");
  }
}

LassoStream::LassoStream(const LassoStreamSpec& spec) : spec_(spec) {
  spec_.validate();
  const Index n = spec_.n, rank = n / 2;

  auto rng = make_rng(spec_.seed, kMatrix);
  const Matrix U = orthonormal_columns(rng, n, rank);
  const Matrix V = orthonormal_columns(rng, n, rank);
  sigma_.resize(rank);
  const double top = std::sqrt(spec_.L), bottom = std::sqrt(spec_.mu);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  sigma_[0] = top;
  sigma_[rank - 1] = bottom;
  for (Index i = 1; i + 1 < rank; ++i) {
    sigma_[i] = std::exp(std::log(bottom) + unit(rng) * (std::log(top) - std::log(bottom)));
  }
  std::sort(sigma_.begin(), sigma_.end(), std::greater<>());
  A_ = std::make_shared<const Matrix>(U * sigma_.asDiagonal() * V.transpose());

  auto srng = make_rng(spec_.seed, kSignal);
  std::uniform_real_distribution<double> freq(0.1, 1.0), ph(0.0, 2.0 * std::numbers::pi);
  omega_.resize(n);
  phase_.resize(n);
  for (Index i = 0; i < n; ++i) {
    omega_[i] = freq(srng);
    phase_[i] = ph(srng);
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), srng);
  active_.assign(static_cast<std::size_t>(n), true);
  for (Index i = 0; i < n / 3; ++i) active_[static_cast<std::size_t>(order[i])] = false;

  auto xrng = make_rng(spec_.seed, kStart);
  x0_ = spec_.x0_scale * gaussian_matrix(xrng, n, 1).col(0);
}

Vector LassoStream::ground_truth(std::size_t k) const {
  const double time = static_cast<double>(k) * spec_.period;
  Vector y = Vector::Zero(spec_.n);
  for (Index i = 0; i < spec_.n; ++i) {
    if (active_[static_cast<std::size_t>(i)]) {
      y[i] = spec_.amplitude * std::sin(omega_[i] * time + phase_[i]);
    }
  }
  return y;
}

Vector LassoStream::observations(std::size_t k) const {
  Vector b = *A_ * ground_truth(k);
  if (spec_.noise_variance > 0.0) {
    auto rng = make_rng(spec_.seed, kNoise, k);
    std::normal_distribution<double> noise(0.0, std::sqrt(spec_.noise_variance));
    for (Index i = 0; i < b.size(); ++i) b[i] += noise(rng);
  }
  return b;
}

CompositeProblem LassoStream::problem_at(std::size_t k) const {
  // A is rank deficient, so f_k is only convex.
  return {least_squares(A_, observations(k)), l1_norm(spec_.w), {0.0, spec_.L}};
}

// ---------------------------------------------------------------------------

void PhaseStreamSpec::validate() const {
  if (n < 2 || m < n) throw InvalidArgument("phase stream: need m >= n >= 2");
  if (!(mu > 0.0) || !(L >= mu) || !std::isfinite(L)) {
    throw InvalidArgument("phase stream: need 0 < mu <= L");
  }
  if (pieces < 1) throw InvalidArgument("phase stream: pieces must be >= 1");
  if (!(noise_scale >= 0.0) || !(period > 0.0) || !(alpha > 0.0)) {
    throw InvalidArgument("phase stream: negative noise scale, period or step");
  }
  admm.validate();
}

PhaseStream::PhaseStream(const PhaseStreamSpec& spec) : spec_(spec) {
  spec_.validate();
  const Index n = spec_.n;
  auto rng = make_rng(spec_.seed, kMatrix);
  const Matrix U = orthonormal_columns(rng, spec_.m, n);
  Vector d(n);
  std::uniform_real_distribution<double> spread(spec_.mu, spec_.L);
  d[0] = spec_.L;
  d[1] = spec_.mu;
  for (Index i = 2; i < n; ++i) d[i] = spread(rng);
  A_ = std::make_shared<const Matrix>(U * d.asDiagonal());

  auto srng = make_rng(spec_.seed, kSignal);
  signals_ = gaussian_matrix(srng, n, spec_.pieces);
  for (Index p = 0; p < signals_.cols(); ++p) signals_.col(p).normalize();

  auto xrng = make_rng(spec_.seed, kStart);
  x0_ = gaussian_matrix(xrng, n, 1).col(0).normalized();
}

int PhaseStream::piece_at(std::size_t k) const {
  if (k == 0 || spec_.horizon == 0) return 0;
  const auto p = (k - 1) * static_cast<std::size_t>(spec_.pieces) / spec_.horizon;
  return static_cast<int>(std::min<std::size_t>(p, static_cast<std::size_t>(spec_.pieces - 1)));
}

Vector PhaseStream::ground_truth(std::size_t k) const { return signals_.col(piece_at(k)); }

Vector PhaseStream::measurements(std::size_t k) const {
  Vector b = *A_ * ground_truth(k);
  if (!spec_.linear_measurements) b = b.array().square().matrix();
  if (spec_.noise_scale > 0.0) {
    // Laplace(0, s) as a signed exponential.
    auto rng = make_rng(spec_.seed, kNoise, k);
    std::exponential_distribution<double> magnitude(1.0 / spec_.noise_scale);
    std::bernoulli_distribution sign(0.5);
    for (Index i = 0; i < b.size(); ++i) {
      const double e = magnitude(rng);
      b[i] += sign(rng) ? e : -e;
    }
  }
  return b;
}

double PhaseStream::cost(const Vector& x, std::size_t k) const {
  const Vector r = (*A_ * x).array().square().matrix() - measurements(k);
  return r.lpNorm<1>() / static_cast<double>(spec_.m);
}

CompositeProblem PhaseStream::problem_at(std::size_t k) const {
  const Vector b = measurements(k);
  const auto A = A_;
  const double inv_m = 1.0 / static_cast<double>(spec_.m);
  SmoothPart f;
  f.dimension = spec_.n;
  f.value = [A, b, inv_m](const Vector& x) {
    return ((*A * x).array().square().matrix() - b).lpNorm<1>() * inv_m;
  };
  f.gradient = [A, b, inv_m](const Vector& x) -> Vector {
    const Vector ax = *A * x;
    const Vector r = ax.array().square().matrix() - b;
    const Vector s = r.array().sign() * ax.array() * 2.0 * inv_m;
    return A->transpose() * s;
  };
  // The cost is only weakly convex; the bounds are nominal.
  return {std::move(f), sphere_indicator(), {0.0, spec_.L * spec_.L}};
}

OperatorHandle PhaseStream::algorithmic_operator(std::size_t k, double alpha) const {
  const auto A = A_;
  const AdmmConfig admm = spec_.admm;
  return OperatorHandle([A, b = measurements(k), alpha, admm](const Vector& y) {
    return prox_linear_step(*A, b, alpha, y, admm);
  });
}

double PhaseStream::tracking_error(const Vector& x, std::size_t k) const {
  const Vector y = ground_truth(k);
  return std::min((x - y).norm(), (x + y).norm());
}

}  // namespace opreg::bench
