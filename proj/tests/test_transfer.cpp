#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dunkl/polynomial_io.hpp"
#include "dunkl/quadrature.hpp"
#include "dunkl/transfer.hpp"
#include "test_support.hpp"

using namespace dunkl;
using dunkl::testing::eval;
using dunkl::testing::random_polynomial;
using std::numbers::pi;

namespace {

Polynomial F(const char* s, int d) { return to_floating(parse_polynomial(s, d)); }

BallSpace ball_for(RootFamily fam, int d, std::vector<double> k, double mu) {
  const auto rs = RootSystem::build(fam, d);
  return BallSpace(rs, Multiplicity::from_orbits(rs, k), mu);
}

// Tensor Gauss rule on the disk in polar coordinates for ∫_{B²} f W dx,
// with the radial factor (1-r²)^{μ-1/2} handled by Gauss–Jacobi in t = 2r² - 1
// and the angle split at the multiples of π/4 where the weights can kink.
double disk_quadrature(const std::function<double(double, double)>& f, double mu, int radial_degree) {
  // r dr = dt/4 with t = 2r² - 1, and (1 - r²) = (1 - t)/2.
  const GaussRule jr = gauss_jacobi(radial_degree, mu - 0.5, 0.0);
  double s = 0.0;
  for (int piece = 0; piece < 8; ++piece) {
    const GaussRule th = gauss_legendre(40, piece * pi / 4, (piece + 1) * pi / 4);
    for (std::size_t i = 0; i < jr.nodes.size(); ++i) {
      const double r = std::sqrt(0.5 * (jr.nodes[i] + 1.0));
      const double w = jr.weights[i] * std::pow(0.5, mu - 0.5) / 4.0;
      for (std::size_t j = 0; j < th.nodes.size(); ++j) {
        s += w * th.weights[j] * f(r * std::cos(th.nodes[j]), r * std::sin(th.nodes[j]));
      }
    }
  }
  return s;
}

}  // namespace

TEST_CASE("ball lift and push-down") {
  const auto ball = ball_for(RootFamily::Z2, 2, {1.0, 1.0}, 1.0);
  CHECK(ball.lift(F("1", 2)) == F("1", 3));
  CHECK(ball.lift(F("x1", 2)) == F("x1", 3));
  CHECK(ball.push_down(F("x3^2", 3)) == F("1 - x1^2 - x2^2", 2));
  CHECK_THROWS_AS(ball.push_down(F("x3", 3)), std::domain_error);
  std::mt19937_64 rng(1);
  const Polynomial p = random_polynomial(2, 4, rng);
  CHECK((ball.push_down(ball.lift(p)) - p).max_coefficient() == 0.0);
  CHECK(ball.lift_factor() == doctest::Approx(4.0));
}

TEST_CASE("ball integrals") {
  // d = 2, μ = 0, κ = 0: the lift of x3² is 1 - ‖x‖² on the disk.
  const auto b0 = ball_for(RootFamily::Trivial, 2, {}, 0.0);
  CHECK(b0.sphere()->integrator().integrate(F("x3^2", 3)) == doctest::Approx(4 * pi / 3).epsilon(1e-13));
  CHECK(2 * b0.integral(F("1 - x1^2 - x2^2", 2)) == doctest::Approx(4 * pi / 3).epsilon(1e-13));
  CHECK(2 * b0.integral(F("1", 2)) == doctest::Approx(4 * pi).epsilon(1e-13));
  CHECK(2 * b0.integral_direct(F("1", 2)) == doctest::Approx(4 * pi).epsilon(1e-13));

  // Dual path for several weights and random integrands of degree ≤ 6.
  std::mt19937_64 rng(2);
  const std::vector<std::tuple<RootFamily, int, std::vector<double>, double>> cases{
      {RootFamily::Trivial, 2, {}, 0.5},  {RootFamily::Z2, 2, {1.0, 0.5}, 1.0}, {RootFamily::Z2, 3, {1.0, 0.0, 2.0}, 0.0},
      {RootFamily::B, 2, {1.0, 1.0}, 1.5}, {RootFamily::A, 3, {1.0}, 0.5},     {RootFamily::Trivial, 1, {}, 0.0}};
  for (const auto& [fam, d, k, mu] : cases) {
    const auto ball = ball_for(fam, d, k, mu);
    for (int t = 0; t < 3; ++t) {
      const Polynomial p = random_polynomial(d, 6, rng);
      const double a = ball.integral(p), b = ball.integral_direct(p);
      CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)));
    }
  }

  // Against tensor quadrature on the disk: Z2², μ = 1.
  const auto bz = ball_for(RootFamily::Z2, 2, {1.0, 1.0}, 1.0);
  for (int t = 0; t < 3; ++t) {
    const Polynomial p = random_polynomial(2, 5, rng);
    const double q = disk_quadrature(
        [&](double x, double y) {
          const Eigen::Vector2d v(x, y);
          return eval(p, v) * weight_squared_eval(bz.roots(), bz.kappa(), v);
        },
        1.0, 20);
    CHECK(std::abs(bz.integral(p) - q) <= 1e-7);
  }
}

TEST_CASE("ball fractional powers") {
  // d = 1, κ = 0, μ = 0: x is an eigenfunction with eigenvalue 1.
  const auto b1 = ball_for(RootFamily::Trivial, 1, {}, 0.0);
  CHECK((b1.fractional_laplacian(F("x1", 1), 1.0) - F("x1", 1)).max_coefficient() <= 1e-12);
  CHECK((b1.laplacian_operator(F("x1", 1)) + F("x1", 1)).max_coefficient() <= 1e-12);

  std::mt19937_64 rng(3);
  const std::vector<std::tuple<RootFamily, int, std::vector<double>, double>> cases{
      {RootFamily::Trivial, 2, {}, 0.5}, {RootFamily::Z2, 2, {1.0, 0.5}, 1.0}, {RootFamily::B, 2, {1.0, 1.0}, 0.0}};
  for (const auto& [fam, d, k, mu] : cases) {
    const auto ball = ball_for(fam, d, k, mu);
    const Polynomial f = ball.normalize(random_polynomial(d, 4, rng));
    CHECK(std::abs(ball.integral(f)) <= 1e-12);
    CHECK(ball.norm_squared(f) == doctest::Approx(1.0).epsilon(1e-12));
    // α = 1: spectral route against the operator formula.
    const Polynomial spectral = ball.fractional_laplacian(f, 1.0);
    const Polynomial op = ball.laplacian_operator(f);
    CHECK(std::sqrt(ball.norm_squared(spectral + op)) <= 1e-8);
    CHECK(std::sqrt(ball.norm_squared(ball.fractional_laplacian(f, 0.0) - f)) <= 1e-10);
    const Polynomial twice = ball.fractional_laplacian(ball.fractional_laplacian(f, 0.3), 0.4);
    CHECK(std::sqrt(ball.norm_squared(twice - ball.fractional_laplacian(f, 0.7))) <= 1e-8);
    CHECK_THROWS_AS(ball.fractional_laplacian(f + Polynomial::constant(d, 1.0), -0.5), std::domain_error);
  }
}

TEST_CASE("simplex integrals") {
  // d = 1: ∫_{B¹} x² dx = 2/3 = ∫_0^1 z z^{-1/2} dz.
  const SimplexSpace s1(SimplexVariant::Z2, 1, {0.0, 0.5});
  CHECK(s1.ball().integral(F("x1^2", 1)) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(s1.integral(F("x1", 1)) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(*s1.integral_direct(F("x1", 1)) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));

  // All κ = 1/2: Lebesgue measure, volume 1/d!.
  for (int d = 1; d <= 3; ++d) {
    const SimplexSpace s(SimplexVariant::Z2, d, std::vector<double>(d + 1, 0.5));
    CHECK(s.integral(Polynomial::constant(d, 1.0)) == doctest::Approx(1.0 / std::tgamma(d + 1.0)).epsilon(1e-12));
  }

  std::mt19937_64 rng(4);
  const std::vector<SimplexSpace> spaces = [] {
    std::vector<SimplexSpace> v;
    v.emplace_back(SimplexVariant::Z2, 2, std::vector<double>{0.0, 0.0, 0.5});  // (T-B) itself
    v.emplace_back(SimplexVariant::Z2, 2, std::vector<double>{1.0, 0.5, 2.0});
    v.emplace_back(SimplexVariant::Z2, 3, std::vector<double>{0.5, 1.0, 0.0, 1.0});
    v.emplace_back(SimplexVariant::B, 2, std::vector<double>{0.5, 2.0, 1.0});
    return v;
  }();
  for (const auto& s : spaces) {
    for (int t = 0; t < 3; ++t) {
      const Polynomial g = random_polynomial(s.dimension(), 3, rng);
      const auto direct = s.integral_direct(g);
      REQUIRE(direct.has_value());
      CHECK(std::abs(s.integral(g) - *direct) <= 1e-9 * std::max(1.0, std::abs(*direct)));
      // The pullback is even in every coordinate.
      const Polynomial pb = s.pull_back(g);
      CHECK(s.push_forward(pb) == g);
    }
  }
  CHECK_FALSE(SimplexSpace(SimplexVariant::B, 2, {0.5, 1.0, 1.0}).integral_direct(F("1", 2)).has_value());
  CHECK_THROWS_AS(SimplexSpace(SimplexVariant::Z2, 2, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(SimplexSpace(SimplexVariant::Z2, 2, {1.0, -1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("simplex fractional powers") {
  // d = 1, Chebyshev-type weight: -Δ^T z = z - 1/2.
  const SimplexSpace s1(SimplexVariant::Z2, 1, {0.0, 0.0});
  CHECK(s1.lambda() == doctest::Approx(0.0));
  CHECK((s1.fractional_laplacian(F("x1", 1), 1.0) - F("x1 - 1/2", 1)).max_coefficient() <= 1e-12);
  CHECK((s1.intrinsic_fractional_laplacian(F("x1", 1), 1.0) - F("x1 - 1/2", 1)).max_coefficient() <= 1e-12);

  std::mt19937_64 rng(5);
  const std::vector<SimplexSpace> spaces = [] {
    std::vector<SimplexSpace> v;
    v.emplace_back(SimplexVariant::Z2, 2, std::vector<double>{1.0, 0.5, 2.0});
    v.emplace_back(SimplexVariant::B, 2, std::vector<double>{0.5, 2.0, 1.0});
    return v;
  }();
  for (const auto& s : spaces) {
    const Polynomial g = s.normalize(random_polynomial(2, 3, rng));
    for (double alpha : {0.5, 1.0}) {
      // The ratio of the two routes is 4^{-α}.
      const Polynomial intrinsic = s.intrinsic_fractional_laplacian(g, alpha);
      const Polynomial via_ball = s.ball_route(g, alpha);
      const double ratio = s.integral(intrinsic * via_ball) / s.integral(via_ball * via_ball);
      CHECK(std::abs(ratio - std::pow(4.0, -alpha)) <= 1e-8);
      CHECK(std::sqrt(s.norm_squared(intrinsic - s.fractional_laplacian(g, alpha))) <= 1e-8);
    }
    CHECK(std::sqrt(s.norm_squared(s.fractional_laplacian(g, 0.0) - g)) <= 1e-10);
    const Polynomial half2 = s.fractional_laplacian(s.fractional_laplacian(g, 0.5), 0.5);
    CHECK(std::sqrt(s.norm_squared(half2 - s.fractional_laplacian(g, 1.0))) <= 1e-8);
  }
}

TEST_CASE("simplex kernel") {
  std::mt19937_64 rng(6);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  auto point = [&] {
    Eigen::VectorXd y(4);
    for (int i = 0; i < 4; ++i) y[i] = gamma(rng);
    return Eigen::VectorXd(y.head(3) / y.sum());
  };
  for (int k = 0; k < 200; ++k) {
    const Eigen::VectorXd x = point(), y = point();
    CHECK(simplex_kernel(x, y) >= 0.0);
    CHECK(simplex_kernel(x, y) > 1e-12);
    const Eigen::VectorXd v = Eigen::Vector3d(0.2, 0.3, 0.5);
    CHECK(std::abs(simplex_kernel(v, v)) <= 1e-15);
  }
}

TEST_CASE("ball and simplex uncertainty products") {
  // κ = 0, μ = 1/2, d = 2 (Lebesgue measure on the disk), f ∝ x1: localization 1,
  // and x1 lifts to a degree-1 h-harmonic with λ = 1, eigenvalue 3.
  const auto leb = ball_for(RootFamily::Trivial, 2, {}, 0.5);
  const Polynomial x1 = leb.normalize(F("x1", 2));
  CHECK(leb.integral(x1 * x1) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(x1.coefficient({1, 0}) == doctest::Approx(1.0 / std::sqrt(pi / 4)).epsilon(1e-12));
  const auto r = ball_uncertainty_product(leb, x1);
  CHECK(r.report.localization == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(r.report.product == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.dirichlet_alternative == doctest::Approx(3.0).epsilon(1e-12));

  // G-invariant even f: no first moments.
  const auto bz = ball_for(RootFamily::Z2, 2, {1.0, 0.5}, 1.0);
  const auto even = ball_uncertainty_product(bz, bz.normalize(F("x1^2 + 3*x2^4", 2)));
  CHECK(even.report.localization == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const Polynomial f = bz.normalize(random_polynomial(2, 3, rng));
    const auto rep = ball_uncertainty_product(bz, f);
    CHECK(rep.report.product > 0.0);
    CHECK(std::abs(rep.report.dirichlet - rep.dirichlet_alternative) <= 1e-8);
    CHECK(std::abs(rep.report.localization - rep.report.localization_grid) <= 1e-6);
  }

  const SimplexSpace s(SimplexVariant::Z2, 2, {1.0, 0.5, 2.0});
  for (int t = 0; t < 10; ++t) {
    const Polynomial g = s.normalize(random_polynomial(2, 3, rng));
    const auto rep = simplex_uncertainty_product(s, g);
    CHECK(rep.report.product > 0.0);
    CHECK(std::abs(rep.report.dirichlet - rep.dirichlet_alternative) <= 1e-8);
    // Closed-form localization against the search over T².
    CHECK(std::abs(rep.report.localization - rep.report.localization_grid) <= 1e-8);
    CHECK(rep.report.localization <= rep.report.localization_axis + 1e-15);
  }
}
