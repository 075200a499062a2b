#include "doctest.h"

#include "../support.hpp"
#include "svrpl/problem.hpp"
#include "svrpl/prox.hpp"

#include <cmath>
#include <limits>
#include <memory>

using namespace svrpl;
using namespace svrpl::testing;

namespace {

// g_i(x) = scale(i) * x, with n = m.
CompositeProblem scaled_identity(std::uint64_t N, Eigen::Index n, std::function<double(Token)> scale,
                                 OuterFunction outer = L1Norm{}, Regularizer reg = ZeroReg{}) {
  auto oracle = std::make_shared<FunctionOracle>(
      n, n, [scale](Token t, const Vector& x) -> Vector { return scale(t) * x; },
      [scale, n](Token t, const Vector&) -> Matrix { return scale(t) * Matrix::Identity(n, n); });
  return CompositeProblem(oracle, FiniteSum{N}, outer, reg, {});
}

}  // namespace

TEST_SUITE("core-model") {

TEST_CASE("outer function values") {
  Vector z(3);
  z << 1.0, -2.0, 0.5;
  CHECK(OuterFunction(L1Norm{}).value(z) == doctest::Approx(3.5));
  CHECK(OuterFunction(SquaredNorm{2.0}).value(z) == doctest::Approx(2.0 * 5.25));
  CHECK(OuterFunction(MaxCoordinate{}).value(z) == doctest::Approx(1.0));
  CHECK(OuterFunction(EuclideanNorm{}).value(z) == doctest::Approx(std::sqrt(5.25)));
  Vector s(1);
  s << -1.0;
  CHECK(OuterFunction(TruncatedIdentity{0.5}).value(s) == 0.5);
  Vector h(2);
  h << 1.0, 2.0;
  CHECK(OuterFunction(AffinePlusHinge{3.0}).value(h) == doctest::Approx(7.0));
  h[1] = -2.0;
  CHECK(OuterFunction(AffinePlusHinge{3.0}).value(h) == doctest::Approx(1.0));
}

TEST_CASE("outer functions enforce their dimension and parameters") {
  CHECK_THROWS_AS(OuterFunction(TruncatedIdentity{}).value(Vector::Zero(2)), Error);
  CHECK_THROWS_AS(OuterFunction(AffinePlusHinge{}).value(Vector::Zero(3)), Error);
  CHECK_THROWS_AS(OuterFunction(SquaredNorm{0.0}), Error);
  CHECK_THROWS_AS(OuterFunction(AffinePlusHinge{-1.0}), Error);
}

TEST_CASE("documented Lipschitz constants hold on random pairs") {
  Rng rng(11);
  const OuterFunction fs[] = {L1Norm{}, MaxCoordinate{}, EuclideanNorm{}, TruncatedIdentity{0.3},
                              AffinePlusHinge{2.0}};
  for (const auto& f : fs) {
    const Eigen::Index m = f.required_dim().value_or(4);
    const double lf = *f.lipschitz(m);
    for (int k = 0; k < 1000; ++k) {
      const Vector u = randn(rng, m, 3.0), v = randn(rng, m, 3.0);
      CHECK(std::abs(f.value(u) - f.value(v)) <= lf * (u - v).norm() * (1 + 1e-12));
    }
  }
  CHECK(*OuterFunction(L1Norm{}).lipschitz(4) == doctest::Approx(2.0));
  CHECK(*OuterFunction(AffinePlusHinge{2.0}).lipschitz(2) == doctest::Approx(std::sqrt(5.0)));
  CHECK_FALSE(OuterFunction(SquaredNorm{}).lipschitz(3).has_value());
}

TEST_CASE("conjugate satisfies the Fenchel-Young inequality") {
  Rng rng(12);
  const OuterFunction fs[] = {L1Norm{}, SquaredNorm{0.7}, MaxCoordinate{}, EuclideanNorm{},
                              TruncatedIdentity{-0.4}, AffinePlusHinge{1.5}};
  for (const auto& f : fs) {
    const Eigen::Index m = f.required_dim().value_or(3);
    for (int k = 0; k < 200; ++k) {
      const Vector y = f.project_conjugate_domain(randn(rng, m, 2.0));
      CHECK(f.project_conjugate_domain(y).isApprox(y, 1e-12));
      const Vector z = randn(rng, m, 2.0);
      CHECK(f.value(z) + f.conjugate_value(y) >= y.dot(z) - 1e-9);
    }
  }
}

TEST_CASE("regularizer values and domains") {
  Vector x(3);
  x << 0.2, 0.8, -5.0;
  CHECK(Regularizer(ZeroReg{}).value(x) == 0.0);
  CHECK(Regularizer(L1Reg{0.5}).value(x) == doctest::Approx(3.0));
  CHECK(Regularizer(SimplexIndicator{2}).value(x) == 0.0);
  CHECK(Regularizer(SimplexIndicator{3}).value(x) == std::numeric_limits<double>::infinity());
  CHECK_FALSE(Regularizer(SimplexIndicator{3}).in_domain(x));
}

TEST_CASE("regularizer prox beats a grid and random candidates") {
  Rng rng(13);
  const Regularizer regs[] = {ZeroReg{}, L1Reg{0.7}, SimplexIndicator{2}};
  for (const auto& h : regs) {
    for (int trial = 0; trial < 20; ++trial) {
      const Vector v = randn(rng, 2, 1.5);
      const double t = uniform(rng, 0.2, 2.0);
      auto penalized = [&](const Vector& u) { return h.value(u) + (u - v).squaredNorm() / (2 * t); };
      const Vector p = h.prox(v, t);
      const double best = penalized(p);
      REQUIRE(std::isfinite(best));
      double other = std::numeric_limits<double>::infinity();
      for (int k = 0; k < 10000; ++k) {
        Vector u = v + randn(rng, 2, 1.0);
        if (h.is<SimplexIndicator>()) u = project_simplex(u);
        other = std::min(other, penalized(u));
      }
      const int G = 201;
      for (int i = 0; i < G; ++i)
        for (int j = 0; j < G; ++j) {
          Vector u(2);
          u << v[0] - 3 + 6.0 * i / (G - 1), v[1] - 3 + 6.0 * j / (G - 1);
          other = std::min(other, penalized(u));
        }
      CHECK(best <= other + 1e-12);
    }
  }
}

TEST_CASE("full averages match hand sums") {
  auto single = scaled_identity(1, 2, [](Token) { return 1.0; });
  Vector x(2);
  x << 1.0, 2.0;
  CHECK(full_average_map(single, x) == x);
  CHECK(full_average_jacobian(single, x) == Matrix::Identity(2, 2));

  auto three = scaled_identity(3, 1, [](Token t) { return double(t); });
  CHECK(full_average_map(three, Vector::Ones(1))[0] == doctest::Approx(2.0));

  auto oracle = std::make_shared<FunctionOracle>(
      1, 1, [](Token t, const Vector& x) -> Vector { return Vector::Constant(1, t * x[0] * x[0]); },
      [](Token t, const Vector& x) -> Matrix { return Matrix::Constant(1, 1, 2.0 * t * x[0]); });
  CompositeProblem quad(oracle, FiniteSum{2}, L1Norm{}, ZeroReg{}, {});
  CHECK(full_average_jacobian(quad, Vector::Ones(1))(0, 0) == doctest::Approx(3.0));

  CHECK_THROWS_AS(full_average_map(three, Vector::Ones(2)), Error);
}

TEST_CASE("objective values") {
  auto zero = std::make_shared<FunctionOracle>(
      2, 2, [](Token, const Vector&) -> Vector { return Vector::Zero(2); },
      [](Token, const Vector&) -> Matrix { return Matrix::Zero(2, 2); });
  CompositeProblem p0(zero, FiniteSum{1}, L1Norm{}, ZeroReg{}, {});
  CHECK(objective_value(p0, Vector::Ones(2)) == 0.0);

  auto p1 = scaled_identity(1, 1, [](Token) { return 1.0; }, SquaredNorm{1.0}, L1Reg{1.0});
  CHECK(objective_value(p1, Vector::Constant(1, 2.0)) == doctest::Approx(6.0));

  auto p2 = scaled_identity(1, 2, [](Token) { return 1.0; }, L1Norm{}, SimplexIndicator{2});
  CHECK(objective_value(p2, Vector::Ones(2)) == std::numeric_limits<double>::infinity());
}

TEST_CASE("expectation regimes average over their reference set") {
  auto base = scaled_identity(4, 1, [](Token t) { return double(t); });
  auto p = base.with_regime(uniform_expectation(4));
  CHECK_FALSE(p.is_finite_sum());
  CHECK(p.reference_tokens().size() == 4);
  CHECK(full_average_map(p, Vector::Ones(1))[0] == doctest::Approx(2.5));
  const std::vector<Token> only_two{2};
  CHECK(full_average_map(p, Vector::Ones(1), only_two)[0] == 2.0);
  CHECK_THROWS_AS(p.num_components(), Error);
}

TEST_CASE("derived constants") {
  SmoothnessConstants c;
  c.ell_f = 2.0;
  c.L_g = 3.0;
  c.ell_g = 0.5;
  CHECK_FALSE(c.L_fog().has_value());
  c.L_f = 4.0;
  CHECK(*c.L_fog() == doctest::Approx(2.0 * 3.0 + 4.0 * 0.25));
  CHECK(c.default_M() == doctest::Approx(24.0));
  c.L_g = 0.0;
  CHECK(c.default_M() == 1.0);
}

}
