#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dunkl/polynomial.hpp"
#include "dunkl/polynomial_io.hpp"
#include "test_support.hpp"

using namespace dunkl;
using dunkl::testing::eval;
using dunkl::testing::random_polynomial;
using dunkl::testing::random_rational_polynomial;

namespace {

RationalPolynomial x(int d, int i) { return RationalPolynomial::variable(d, i); }

// Term-by-term evaluation with std::pow, independent of BasicPolynomial::evaluate.
double naive_eval(const Polynomial& p, const std::vector<double>& pt) {
  double s = 0.0;
  for (const auto& [e, c] : p.terms()) {
    double t = c;
    for (std::size_t i = 0; i < e.size(); ++i) t *= std::pow(pt[i], e[i]);
    s += t;
  }
  return s;
}

}  // namespace

TEST_CASE("arithmetic examples") {
  const int d = 2;
  CHECK(x(d, 0) + x(d, 1) == parse_polynomial("x1 + x2", d));
  CHECK((x(d, 0) + x(d, 1)) * (x(d, 0) - x(d, 1)) == parse_polynomial("x1^2 - x2^2", d));
  CHECK((parse_polynomial("3 x1 x2 + 1/2", d) * RationalPolynomial(d)).is_zero());
  CHECK((x(d, 0) - x(d, 0)).size() == 0);
}

TEST_CASE("ring axioms hold exactly in rational mode") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = random_rational_polynomial(3, 3, rng), q = random_rational_polynomial(3, 3, rng),
         r = random_rational_polynomial(3, 2, rng);
    CHECK((p * q) * r == p * (q * r));
    CHECK(p * (q + r) == p * q + p * r);
    CHECK(p * q == q * p);
    CHECK(p + q - q == p);
  }
}

TEST_CASE("dimension mismatch throws") {
  CHECK_THROWS_AS(x(2, 0) + x(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(partial_derivative(x(2, 0), 2), std::out_of_range);
}

TEST_CASE("evaluation") {
  auto p = parse_polynomial("x1^2 x2", 2);
  std::vector<Rational> pt{2, 3};
  CHECK(p.evaluate<Rational>(pt) == 12);
  CHECK(RationalPolynomial::constant(3, 5).evaluate<Rational>(std::vector<Rational>{7, 8, 9}) == 5);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 30; ++trial) {
    auto q = random_polynomial(4, 5, rng);
    std::vector<double> v(4);
    for (auto& c : v) c = u(rng);
    CHECK(q.evaluate<double>(v) == doctest::Approx(naive_eval(q, v)).epsilon(1e-13));
  }
}

TEST_CASE("partial derivatives") {
  CHECK(partial_derivative(parse_polynomial("x1^2 x2", 2), 0) == parse_polynomial("2 x1 x2", 2));
  CHECK(partial_derivative(parse_polynomial("x1^3", 2), 1).is_zero());

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = random_rational_polynomial(3, 4, rng), q = random_rational_polynomial(3, 3, rng);
    for (int i = 0; i < 3; ++i) {
      CHECK(partial_derivative(p * q, i) == partial_derivative(p, i) * q + p * partial_derivative(q, i));
    }
    const Polynomial pf = to_floating(p);
    std::vector<double> v(3);
    for (auto& c : v) c = u(rng);
    const double h = 1e-6;
    for (int i = 0; i < 3; ++i) {
      auto plus = v, minus = v;
      plus[i] += h;
      minus[i] -= h;
      const double fd = (pf.evaluate<double>(plus) - pf.evaluate<double>(minus)) / (2 * h);
      const double exact = partial_derivative(pf, i).evaluate<double>(v);
      CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST_CASE("compose_linear") {
  const double s = std::sqrt(2.0);
  // reflection in √2 e1 is diag(-1, 1)
  LinearMap<Rational> flip{{-1, 0}, {0, 1}};
  CHECK(compose_linear(x(2, 0), flip) == -x(2, 0));
  LinearMap<Rational> swap{{0, 1}, {1, 0}};
  CHECK(compose_linear(x(2, 0) * x(2, 1), swap) == x(2, 0) * x(2, 1));
  (void)s;

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const Polynomial p = random_polynomial(3, 4, rng);
    const Eigen::MatrixXd g = dunkl::testing::random_orthogonal(3, rng);
    const Eigen::MatrixXd h = dunkl::testing::random_orthogonal(3, rng);
    LinearMap<double> gm(3, std::vector<double>(3)), hm = gm;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        gm[i][j] = g(i, j);
        hm[i][j] = h(i, j);
      }
    const Polynomial pg = compose_linear(p, gm);
    CHECK(pg.degree() == p.degree());
    const Polynomial pgh = compose_linear(pg, hm);
    for (int k = 0; k < 50; ++k) {
      const Eigen::VectorXd pt = Eigen::VectorXd::Random(3);
      CHECK(std::abs(eval(pg, pt) - eval(p, g * pt)) <= 1e-10);
      // (p∘g)∘h evaluated at x is p(g h x)
      CHECK(std::abs(eval(pgh, pt) - eval(p, g * h * pt)) <= 1e-10);
    }
  }
}

TEST_CASE("divide_exact") {
  std::vector<Rational> l{1, -1};
  auto r = divide_exact(parse_polynomial("x1^2 - x2^2", 2), std::span<const Rational>(l));
  CHECK(r.quotient == parse_polynomial("x1 + x2", 2));
  CHECK(r.remainder.is_zero());

  std::vector<Rational> l1{1, 0};
  auto r1 = divide_exact(parse_polynomial("x1^2 + 1", 2), std::span<const Rational>(l1));
  CHECK(r1.quotient == parse_polynomial("x1", 2));
  CHECK(r1.remainder == parse_polynomial("1", 2));

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    // Exact reconstruction p = ℓ q + r with r free of the pivot variable.
    auto p = random_rational_polynomial(3, 4, rng);
    std::vector<Rational> form{Rational(1, 2), Rational(-3), Rational(2, 3)};
    auto res = divide_exact(p, std::span<const Rational>(form));
    RationalPolynomial lin(3);
    for (int i = 0; i < 3; ++i) lin += form[i] * x(3, i);
    CHECK(lin * res.quotient + res.remainder == p);
    for (const auto& [e, c] : res.remainder.terms()) CHECK(e[res.pivot] == 0);

    // f - f∘σ_v is divisible by ⟨x, v⟩ for an irrational root direction.
    const Polynomial f = to_floating(p);
    Eigen::Vector3d v(1.0, std::sqrt(2.0), -0.5);
    v *= std::sqrt(2.0) / v.norm();
    const Eigen::Matrix3d s = Eigen::Matrix3d::Identity() - v * v.transpose();
    LinearMap<double> sm(3, std::vector<double>(3));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) sm[i][j] = s(i, j);
    const Polynomial diff = f - compose_linear(f, sm);
    std::vector<double> vf{v[0], v[1], v[2]};
    auto dr = divide_exact(diff, std::span<const double>(vf));
    CHECK(dr.remainder.max_coefficient() <= 1e-10 * std::max(1.0, diff.max_coefficient()));
  }
}

TEST_CASE("homogeneous components and Euler identity") {
  auto p = parse_polynomial("x1^2 + x2 + 3", 2);
  auto parts = homogeneous_components(p);
  REQUIRE(parts.size() == 3);
  CHECK(parts[0] == parse_polynomial("3", 2));
  CHECK(parts[1] == parse_polynomial("x2", 2));
  CHECK(parts[2] == parse_polynomial("x1^2", 2));

  auto h = parse_polynomial("x1^3 - 2 x1 x2^2", 2);
  auto hp = homogeneous_components(h);
  int nonzero = 0;
  for (const auto& c : hp) nonzero += !c.is_zero();
  CHECK(nonzero == 1);

  std::mt19937_64 rng(23);
  auto q = random_rational_polynomial(3, 5, rng);
  auto comps = homogeneous_components(q);
  RationalPolynomial sum(3);
  for (std::size_t n = 0; n < comps.size(); ++n) {
    sum += comps[n];
    CHECK(comps[n].is_homogeneous());
    CHECK(euler_operator(comps[n]) == Rational(static_cast<long long>(n)) * comps[n]);
  }
  CHECK(sum == q);
}

TEST_CASE("monomial enumeration") {
  CHECK(exponents_of_degree(3, 2).size() == 6);
  CHECK(homogeneous_dimension(3, 4) == 15);
  CHECK(norm_squared_power<Rational>(2, 1) == parse_polynomial("x1^2 + x2^2", 2));
}

TEST_CASE("text round trip") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = random_rational_polynomial(3, 4, rng);
    CHECK(parse_polynomial(format_polynomial(p), 3) == p);
  }
  std::istringstream in("# comment\n1/2 * x1^2 x3\n-0.25 x2\n\n3\n");
  CHECK(read_polynomial(in, 3) == parse_polynomial("1/2 x1^2 x3 - 1/4 x2 + 3", 3));
  CHECK_THROWS(parse_polynomial("x4", 3));
  CHECK(parse_polynomial("010 x1 + 0.5e1", 2) == parse_polynomial("10 x1 + 5", 2));
  CHECK(parse_polynomial("-x1^2 + x2 - 1/3", 2) == parse_polynomial("-1 x1^2\nx2\n-1/3", 2));
}
