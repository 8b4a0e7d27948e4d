#include <cmath>
#include <random>

#include "doctest.h"
#include "dunkl/dunkl_operators.hpp"
#include "dunkl/polynomial_io.hpp"
#include "test_support.hpp"

using namespace dunkl;
using dunkl::testing::random_polynomial;
using dunkl::testing::random_rational_polynomial;

namespace {

OperatorContext context(RootFamily fam, int d, std::vector<double> k, int m = 0) {
  auto rs = RootSystem::build(fam, d, m);
  auto kappa = Multiplicity::from_orbits(rs, k);
  return OperatorContext(std::move(rs), std::move(kappa));
}

RationalPolynomial P(const char* s, int d) { return parse_polynomial(s, d); }

// Δ_κ f = Δf + Σ κ_v [2⟨∇f,u⟩⟨x,u⟩ - ‖u‖²(f - f∘σ_v)] / ⟨x,u⟩², computed
// with two exact divisions; independent of the 𝒟_i composition.
RationalPolynomial laplacian_oracle(const OperatorContext& ctx, const RationalPolynomial& f) {
  const int d = f.dimension();
  RationalPolynomial out(d);
  for (int i = 0; i < d; ++i) out += partial_derivative(partial_derivative(f, i), i);
  for (std::size_t k = 0; k < ctx.roots().root_count(); ++k) {
    const Rational kv = ctx.kappa_as<Rational>(k);
    if (kv == 0) continue;
    const auto& u = ctx.direction_as<Rational>(k);
    RationalPolynomial xu(d), grad_u(d);
    Rational uu = 0;
    for (int i = 0; i < d; ++i) {
      xu += u[i] * RationalPolynomial::variable(d, i);
      grad_u += u[i] * partial_derivative(f, i);
      uu += u[i] * u[i];
    }
    const RationalPolynomial num =
        Rational(2) * grad_u * xu - uu * (f - compose_linear(f, ctx.reflection_as<Rational>(k)));
    auto q1 = divide_exact(num, std::span<const Rational>(u));
    REQUIRE(q1.remainder.is_zero());
    auto q2 = divide_exact(q1.quotient, std::span<const Rational>(u));
    REQUIRE(q2.remainder.is_zero());
    out += kv * q2.quotient;
  }
  return out;
}

}  // namespace

TEST_CASE("Dunkl derivative examples on Z2^d") {
  const auto ctx = context(RootFamily::Z2, 3, {0.5, 1.5, 2.0});
  REQUIRE(ctx.exact_capable());
  CHECK(dunkl_derivative(ctx, 0, P("x1", 3)) == P("2", 3));  // 1 + 2κ₁
  CHECK(dunkl_derivative(ctx, 0, P("x1^2", 3)) == P("2 x1", 3));
  CHECK(dunkl_laplacian(ctx, P("x1^2", 3)) == P("4", 3));  // 2(1 + 2κ₁)
  // Float mode with the √2 roots gives the same numbers.
  const Polynomial d1 = dunkl_derivative(ctx, 1, Polynomial::variable(3, 1));
  CHECK(d1.coefficient(Exponent{0, 0, 0}) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("zero multiplicity reduces to partial derivatives") {
  const auto ctx = context(RootFamily::B, 3, {0.0});
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    auto f = random_rational_polynomial(3, 4, rng);
    for (int i = 0; i < 3; ++i) CHECK(dunkl_derivative(ctx, i, f) == partial_derivative(f, i));
    RationalPolynomial lap(3);
    for (int i = 0; i < 3; ++i) lap += partial_derivative(partial_derivative(f, i), i);
    CHECK(dunkl_laplacian(ctx, f) == lap);
  }
}

TEST_CASE("Dunkl operators commute") {
  std::mt19937_64 rng(2);
  for (const auto& ctx : {context(RootFamily::B, 3, {0.5, 2.0}), context(RootFamily::A, 4, {1.0 / 3.0}),
                          context(RootFamily::Dihedral, 2, {0.75, 1.25}, 4)}) {
    REQUIRE(ctx.exact_capable());
    for (int t = 0; t < 3; ++t) {
      auto f = random_rational_polynomial(ctx.dimension(), 4, rng);
      for (int i = 0; i < ctx.dimension(); ++i)
        for (int j = i + 1; j < ctx.dimension(); ++j) {
          CHECK(dunkl_derivative(ctx, i, dunkl_derivative(ctx, j, f)) ==
                dunkl_derivative(ctx, j, dunkl_derivative(ctx, i, f)));
        }
    }
  }
  // Irrational root directions: float mode.
  const auto ctx = context(RootFamily::Dihedral, 2, {0.7}, 3);
  CHECK_FALSE(ctx.exact_capable());
  for (int t = 0; t < 5; ++t) {
    auto f = random_polynomial(2, 5, rng);
    const Polynomial a = dunkl_derivative(ctx, 0, dunkl_derivative(ctx, 1, f));
    const Polynomial b = dunkl_derivative(ctx, 1, dunkl_derivative(ctx, 0, f));
    CHECK((a - b).max_coefficient() <= 1e-10 * std::max(1.0, a.max_coefficient()));
  }
}

TEST_CASE("Dunkl Laplacian matches the explicit formula and commutes with G") {
  std::mt19937_64 rng(3);
  for (const auto& ctx : {context(RootFamily::B, 3, {0.5, 2.0}), context(RootFamily::A, 3, {1.0}),
                          context(RootFamily::Z2, 3, {1.0, 0.0, 2.0})}) {
    for (int t = 0; t < 4; ++t) {
      auto f = random_rational_polynomial(3, 5, rng);
      const auto lap = dunkl_laplacian(ctx, f);
      CHECK(lap == laplacian_oracle(ctx, f));
      for (const auto& g : ctx.roots().group()) {
        LinearMap<Rational> gm(3, std::vector<Rational>(3));
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) gm[i][j] = Rational(static_cast<long long>(std::llround(g.matrix(i, j))));
        CHECK(dunkl_laplacian(ctx, compose_linear(f, gm)) == compose_linear(lap, gm));
      }
    }
  }
}

TEST_CASE("angular derivatives") {
  CHECK(angular_derivative(0, 1, P("x1", 2)) == P("x2", 2));
  CHECK(angular_derivative(0, 1, P("x1^2 + x2^2", 2)).is_zero());
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    auto f = random_rational_polynomial(4, 4, rng);
    RationalPolynomial total(4);
    for (int i = 0; i < 4; ++i) {
      CHECK(angular_derivative(i, i, f).is_zero());
      for (int j = 0; j < 4; ++j) {
        CHECK(angular_derivative(i, j, f) == -angular_derivative(j, i, f));
        total += RationalPolynomial::variable(4, i) * RationalPolynomial::variable(4, j) * angular_derivative(i, j, f);
      }
    }
    CHECK(total.is_zero());
  }
}

TEST_CASE("difference operator") {
  const auto ctx = context(RootFamily::Z2, 2, {1.0});
  const Polynomial e = difference_operator(ctx, 0, Polynomial::monomial({3, 0}, 1.0));
  CHECK(e.size() == 1);
  CHECK(e.coefficient({2, 0}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(difference_operator(ctx, 0, Polynomial::monomial({2, 0}, 1.0)).is_zero());

  // (I - σ)² = 2 (I - σ)
  const auto b = context(RootFamily::B, 3, {1.0, 1.0});
  std::mt19937_64 rng(5);
  for (int t = 0; t < 5; ++t) {
    auto f = random_rational_polynomial(3, 4, rng);
    for (std::size_t k = 0; k < b.roots().root_count(); ++k) {
      const auto& s = b.reflection_as<Rational>(k);
      const RationalPolynomial once = f - compose_linear(f, s);
      CHECK(once - compose_linear(once, s) == Rational(2) * once);
    }
  }
  // E_v f vanishes exactly for σ_v-invariant f.
  auto inv = P("x1^2 x2 + x3^4", 3);
  CHECK(difference_operator(b, 0, to_floating(inv)).is_zero());
}

TEST_CASE("corrupted reflection data is detected") {
  // f - f∘g is not divisible by ⟨x, v⟩ when g is not the reflection in v.
  const auto ctx = context(RootFamily::Z2, 2, {1.0});
  Polynomial f = Polynomial::variable(2, 1);
  std::vector<double> v{std::sqrt(2.0), 0.0};
  LinearMap<double> wrong{{1, 0}, {0, -1}};
  const Polynomial diff = f - compose_linear(f, wrong);
  auto r = divide_exact(diff, std::span<const double>(v));
  CHECK(r.remainder.max_coefficient() > OperatorContext::kRemainderTolerance);
}

TEST_CASE("spherical restrictions") {
  const auto c0 = context(RootFamily::Trivial, 3, {});
  CHECK(sphere_laplacian_polynomial(c0, P("x1 x2", 3)) == P("-6 x1 x2", 3));
  CHECK(sphere_laplacian_polynomial(c0, P("5", 3)).is_zero());
  const auto c1 = context(RootFamily::Z2, 3, {1.0});
  CHECK(sphere_laplacian_polynomial(c1, P("x1", 3)) == P("-8 x1", 3));

  const auto grad = sphere_gradient_polynomial(c0, P("x1", 3));
  CHECK(grad[0] == P("1 - x1^2", 3));
  CHECK(grad[1] == P("-x1 x2", 3));
  CHECK(grad[2] == P("-x1 x3", 3));
  for (const auto& g : sphere_gradient_polynomial(c1, P("7", 3))) CHECK(g.is_zero());
  // The radial part of ∇_{κ,0} vanishes for κ = 0.
  std::mt19937_64 rng(6);
  auto f = random_rational_polynomial(3, 4, rng);
  const auto rad = radial_component(sphere_gradient_polynomial(c0, f));
  // ξ·∇₀f = Σ_n n (1 - ‖x‖²) p_n vanishes on the sphere.
  const Eigen::VectorXd x = random_sphere_point(3, rng);
  CHECK(std::abs(dunkl::testing::eval(to_floating(rad), x)) <= 1e-12);
}
