#include <gtest/gtest.h>

#include <random>
#include <thread>
#include <vector>

#include "opreg/core.hpp"

namespace {

using opreg::Matrix;
using opreg::Vector;

Vector random_vector(std::mt19937_64& rng, opreg::Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

Vector central_difference(const opreg::SmoothPart& f, const Vector& x, double h = 1e-5) {
  Vector g(x.size());
  for (opreg::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f.value(xp) - f.value(xm)) / (2.0 * h);
  }
  return g;
}

opreg::CompositeProblem diagonal_problem(double a, double b) {
  Matrix H = Matrix::Zero(2, 2);
  H(0, 0) = a;
  H(1, 1) = b;
  return {opreg::quadratic(H, Vector::Zero(2)), opreg::zero_function(), {a, b}};
}

TEST(CurvatureBounds, Validation) {
  EXPECT_NO_THROW((opreg::CurvatureBounds{0.0, 1.0}.validate()));
  EXPECT_THROW((opreg::CurvatureBounds{1.0, 1.0}.validate()), opreg::InvalidArgument);
  EXPECT_THROW((opreg::CurvatureBounds{-1.0, 1.0}.validate()), opreg::InvalidArgument);
}

TEST(ForwardBackwardMap, IdentityQuadraticIsAnnihilated) {
  opreg::CompositeProblem p{opreg::quadratic(Matrix::Identity(2, 2), Vector::Zero(2)),
                            opreg::zero_function(),
                            {1.0, 2.0}};
  const auto T = opreg::forward_backward_map(p, 1.0);
  const Vector out = T(Vector::Constant(2, 2.0));
  EXPECT_NEAR(out.norm(), 0.0, 1e-15);
}

TEST(ForwardBackwardMap, ConstantFunctionIsIdentity) {
  opreg::CompositeProblem p{opreg::constant_function(3, 4.2), opreg::zero_function(), {}};
  const Vector x = Vector::LinSpaced(3, -1.0, 2.0);
  EXPECT_EQ(opreg::forward_backward_map(p, 0.7)(x), x);
}

TEST(ForwardBackwardMap, DiagonalQuadraticMatchesFiniteDifferenceOracle) {
  const auto p = diagonal_problem(1.0, 4.0);
  const Vector x = Vector::Ones(2);
  const Vector expected = x - 0.4 * central_difference(p.smooth, x);
  const Vector out = opreg::forward_backward_map(p, 0.4)(x);
  EXPECT_NEAR(out[0], 0.6, 1e-12);
  EXPECT_NEAR(out[1], -0.6, 1e-12);
  EXPECT_NEAR((out - expected).lpNorm<Eigen::Infinity>(), 0.0, 1e-8);
}

TEST(ForwardBackwardMap, RejectsNonPositiveStep) {
  const auto p = diagonal_problem(1.0, 4.0);
  EXPECT_THROW(opreg::forward_backward_map(p, 0.0), opreg::InvalidArgument);
  EXPECT_THROW(opreg::forward_backward_map(p, -1.0), opreg::InvalidArgument);
}

TEST(ForwardBackwardMap, NonFiniteGradientCarriesPoint) {
  opreg::SmoothPart f = opreg::constant_function(2);
  f.gradient = [](const Vector& x) { return Vector(x.array().log()); };
  opreg::CompositeProblem p{f, opreg::zero_function(), {}};
  const Vector bad(Vector::Constant(2, -1.0));
  try {
    opreg::forward_backward_map(p, 0.1)(bad);
    FAIL() << "expected EvaluationError";
  } catch (const opreg::EvaluationError& e) {
    EXPECT_EQ(e.point(), bad);
  }
}

TEST(ForwardBackwardMap, ContractiveForStronglyConvexQuadratic) {
  std::mt19937_64 rng(7);
  const opreg::Index n = 6;
  Matrix Q = Eigen::HouseholderQR<Matrix>(Matrix::Random(n, n)).householderQ();
  Vector eig = Vector::LinSpaced(n, 0.5, 8.0);
  const Matrix H = Q * eig.asDiagonal() * Q.transpose();
  opreg::CompositeProblem p{opreg::quadratic(H, random_vector(rng, n)), opreg::zero_function(),
                            {0.5, 8.0}};
  for (double alpha : {0.05, 0.2, 0.24}) {
    const auto T = opreg::forward_backward_map(p, alpha);
    const double bound = p.curvature.gradient_step_contraction(alpha) + 1e-9;
    for (int trial = 0; trial < 100; ++trial) {
      const Vector u = random_vector(rng, n), v = random_vector(rng, n);
      EXPECT_LE((T(u) - T(v)).norm() / (u - v).norm(), bound);
    }
  }
}

TEST(SmoothParts, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(11);
  auto A = std::make_shared<const Matrix>(Matrix::Random(7, 4));
  const opreg::SmoothPart ls = opreg::least_squares(A, random_vector(rng, 7));
  Matrix H = Matrix::Random(4, 4);
  H = H * H.transpose();
  const opreg::SmoothPart q = opreg::quadratic(H, random_vector(rng, 4));
  for (const auto* f : {&ls, &q}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Vector x = random_vector(rng, 4);
      const Vector g = f->gradient(x);
      const Vector fd = central_difference(*f, x);
      EXPECT_LE((g - fd).norm(), 1e-5 * std::max(1.0, g.norm()));
    }
  }
}

TEST(NonsmoothParts, ProxIsNonExpansive) {
  std::mt19937_64 rng(3);
  const auto l1 = opreg::l1_norm(0.8);
  const auto zero = opreg::zero_function();
  for (const auto* g : {&l1, &zero}) {
    for (int trial = 0; trial < 100; ++trial) {
      const Vector u = random_vector(rng, 5, 2.0), v = random_vector(rng, 5, 2.0);
      EXPECT_LE((g->prox(u, 0.5) - g->prox(v, 0.5)).norm(), (u - v).norm() + 1e-12);
    }
  }
}

TEST(SphereProject, ScalesToUnitNorm) {
  const Vector out = opreg::sphere_project(Vector((Vector(2) << 3.0, 4.0).finished()));
  EXPECT_NEAR(out[0], 0.6, 1e-15);
  EXPECT_NEAR(out[1], 0.8, 1e-15);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    EXPECT_NEAR(opreg::sphere_project(random_vector(rng, 9, 1e3)).norm(), 1.0, 1e-12);
  }
}

TEST(SphereProject, UnitVectorIsFixed) {
  const Vector e = Vector::Unit(4, 2);
  EXPECT_EQ(opreg::sphere_project(e), e);
}

TEST(SphereProject, ZeroIsDegenerate) {
  EXPECT_THROW(opreg::sphere_project(Vector::Zero(3)), opreg::DegenerateInput);
  EXPECT_THROW(opreg::sphere_project(Vector::Constant(3, 1e-32)), opreg::DegenerateInput);
}

TEST(SoftThreshold, Shrinkage) {
  const Vector out = opreg::soft_threshold(Vector((Vector(2) << 2.0, -0.5).finished()), 1.0);
  EXPECT_EQ(out, Vector((Vector(2) << 1.0, 0.0).finished()));
  const Vector y = Vector::LinSpaced(5, -2.0, 2.0);
  EXPECT_EQ(opreg::soft_threshold(y, 0.0), y);
  EXPECT_THROW(opreg::soft_threshold(y, -1.0), opreg::InvalidArgument);
}

// The prox value minimizes kappa|x| + (x - y)^2 / 2; brute force over a grid.
double grid_prox(double y, double kappa) {
  double best_x = -5.0, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 1000000; ++i) {
    const double x = -5.0 + 1e-5 * i;
    const double v = kappa * std::abs(x) + 0.5 * (x - y) * (x - y);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  return best_x;
}

TEST(SoftThreshold, MatchesGridOracle) {
  EXPECT_NEAR(opreg::soft_threshold(Vector::Constant(1, 3.0), 1.0)[0], 2.0, 1e-15);
  for (double y : {3.0, -1.7, 0.4}) {
    EXPECT_NEAR(opreg::soft_threshold(Vector::Constant(1, y), 1.0)[0], grid_prox(y, 1.0), 2e-5);
  }
}

TEST(OperatorHandle, CountsEachApplyOnce) {
  opreg::OperatorHandle T([](const Vector& x) { return Vector(2.0 * x); });
  EXPECT_EQ(T.calls(), 0u);
  for (int i = 1; i <= 5; ++i) {
    T(Vector::Ones(2));
    EXPECT_EQ(T.calls(), static_cast<std::uint64_t>(i));
  }
  const opreg::OperatorHandle copy = T;
  copy(Vector::Ones(2));
  EXPECT_EQ(T.calls(), 6u);
}

TEST(OperatorHandle, ConcurrentApplyCountsExactly) {
  opreg::OperatorHandle T([](const Vector& x) { return x; });
  {
    std::vector<std::jthread> workers;
    for (int w = 0; w < 4; ++w) {
      workers.emplace_back([&T] {
        for (int i = 0; i < 1000; ++i) T(Vector::Zero(1));
      });
    }
  }
  EXPECT_EQ(T.calls(), 4000u);
}

TEST(OperatorHandle, EmptyHandleThrows) {
  opreg::OperatorHandle T;
  EXPECT_FALSE(static_cast<bool>(T));
  EXPECT_THROW(T(Vector::Zero(1)), opreg::InvalidArgument);
}

}  // namespace
