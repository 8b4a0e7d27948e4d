#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dunkl/polynomial_io.hpp"
#include "dunkl/uncertainty.hpp"
#include "test_support.hpp"

using namespace dunkl;
using dunkl::testing::eval;
using dunkl::testing::random_polynomial;
using std::numbers::pi;

namespace {

std::shared_ptr<const HarmonicSystem> system_for(RootFamily fam, int d, std::vector<double> k) {
  auto rs = RootSystem::build(fam, d);
  return HarmonicSystem::create(rs, Multiplicity::from_orbits(rs, k));
}

Polynomial F(const char* s, int d) { return to_floating(parse_polynomial(s, d)); }

struct Config {
  RootFamily family;
  int d;
  std::vector<double> kappa;
};

const std::vector<Config> kConfigs{{RootFamily::Trivial, 3, {}},
                                   {RootFamily::Z2, 2, {1.0, 1.0}},
                                   {RootFamily::Z2, 3, {1.0, 0.0, 2.0}},
                                   {RootFamily::A, 3, {1.0}},
                                   {RootFamily::B, 2, {0.5, 1.0}}};

// Symmetrization over G.
Polynomial invariant_part(const HarmonicSystem& sys, const Polynomial& f) {
  Polynomial s(f.dimension());
  for (const auto& g : sys.roots().group()) s += compose_linear(f, to_linear_map(g.matrix));
  return (1.0 / static_cast<double>(sys.roots().group().size())) * s;
}

}  // namespace

TEST_CASE("normalize_admissible") {
  auto z = system_for(RootFamily::Z2, 3, {1.0, 0.0, 2.0});
  const auto f = normalize_admissible(z, F("x1", 3));
  CHECK(f.component(0).norm() <= 1e-14);
  CHECK(f.norm() == doctest::Approx(1.0).epsilon(1e-12));
  // Already mean-zero: only rescaled.
  const double n = z->integrator().norm(F("x1", 3));
  CHECK((f.to_polynomial() - (1.0 / n) * F("x1", 3)).max_coefficient() <= 1e-12);

  CHECK_THROWS_AS(normalize_admissible(z, F("1", 3)), std::domain_error);

  auto s0 = system_for(RootFamily::Trivial, 3, {});
  const auto g = normalize_admissible(s0, F("x1^2", 3));
  const Polynomial expected = F("x1^2", 3) - (1.0 / 3.0) * norm_squared_power<double>(3, 1);
  const Polynomial gp = g.to_polynomial();
  // Proportional to x1² - ‖x‖²/3 on the sphere.
  const double scale = gp.coefficient({2, 0, 0}) / expected.coefficient({2, 0, 0});
  CHECK(s0->integrator().norm(gp - scale * expected) <= 1e-12);
}

TEST_CASE("moment vector") {
  auto s0 = system_for(RootFamily::Trivial, 3, {});
  const auto f = normalize_admissible(s0, F("x1", 3));
  CHECK(moment_vector(*s0, f.to_polynomial()).norm() <= 1e-14);

  // G-invariant |f|² under Z2^d has zero first moments.
  auto z = system_for(RootFamily::Z2, 3, {1.0, 0.0, 2.0});
  const auto g = normalize_admissible(z, F("x1*x2 + x3^2", 3));
  CHECK(moment_vector(*z, g.to_polynomial()).norm() <= 1e-13);

  // Against Monte Carlo.
  auto a = system_for(RootFamily::A, 3, {1.0});
  const Polynomial p = normalize_admissible(a, F("1 + x1 + 0.5*x2*x3", 3)).to_polynomial();
  const Eigen::VectorXd m = moment_vector(*a, p);
  CHECK(m.norm() <= 1.0);
  for (int i = 0; i < 3; ++i) {
    const auto mc = monte_carlo_sphere(
        3,
        [&](const Eigen::VectorXd& x) {
          return x[i] * std::pow(eval(p, x), 2) * weight_squared_eval(a->roots(), a->kappa(), x);
        },
        400000, 17 + i);
    CHECK(std::abs(mc.mean - m[i]) <= 3.0 * mc.standard_error);
  }
}

TEST_CASE("localization") {
  const Localization zero = localization_min(Eigen::VectorXd::Zero(3));
  CHECK(zero.value == 1.0);
  CHECK_FALSE(zero.direction.has_value());

  // f concentrated near e1: (1 + x1)^12.
  auto s0 = system_for(RootFamily::Trivial, 3, {});
  Polynomial c = F("1 + x1", 3);
  Polynomial p = c;
  for (int k = 0; k < 11; ++k) p = p * c;
  const auto f = normalize_admissible(s0, p);
  const Eigen::VectorXd m = moment_vector(*s0, f.to_polynomial());
  const auto loc = localization_min(m);
  REQUIRE(loc.direction.has_value());
  CHECK((*loc.direction - Eigen::Vector3d(1, 0, 0)).norm() <= 1e-12);
  CHECK(loc.value < 0.25);
  const auto grid = localization_grid_search(m);
  CHECK(std::abs(grid.value - loc.value) <= 1e-6);

  std::mt19937_64 rng(3);
  for (const auto& cfg : kConfigs) {
    auto sys = system_for(cfg.family, cfg.d, cfg.kappa);
    for (int t = 0; t < 5; ++t) {
      const auto g = normalize_admissible(sys, random_polynomial(cfg.d, 3, rng));
      const Eigen::VectorXd mg = moment_vector(*sys, g.to_polynomial());
      const double closed = localization_min(mg).value;
      CHECK(std::abs(localization_grid_search(mg).value - closed) <= 1e-6);
      CHECK(closed <= localization_axis_min(mg) + 1e-15);
      CHECK(closed >= -1e-12);
    }
  }
}

TEST_CASE("geodesic relation") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd x = random_sphere_point(4, rng), y = random_sphere_point(4, rng);
    const double th = geodesic_distance(x, y);
    CHECK(std::abs((1.0 - x.dot(y)) - 2.0 * std::pow(std::sin(th / 2), 2)) <= 1e-12);
  }
}

TEST_CASE("uncertainty product examples") {
  auto s0 = system_for(RootFamily::Trivial, 3, {});
  const auto f = normalize_admissible(s0, F("x1", 3));
  const auto rep = uncertainty_product(f);
  CHECK(rep.product == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(rep.product - rep.localization * rep.dirichlet) <= 1e-12);
  CHECK_FALSE(rep.minimizer.has_value());

  std::mt19937_64 rng(5);
  for (const auto& cfg : kConfigs) {
    auto sys = system_for(cfg.family, cfg.d, cfg.kappa);
    for (int t = 0; t < 4; ++t) {
      const auto g = normalize_admissible(sys, random_polynomial(cfg.d, 4, rng));
      const auto r = uncertainty_product(g);
      CHECK(r.product > 0.0);
      CHECK(r.decomposition_residual <= 1e-8);
      CHECK(r.lemma_residual <= 1e-8);
      CHECK(r.gradient_residual <= 1e-8);
      CHECK(r.gradient_inequality);
      CHECK(r.radial_sign);
    }
  }
}

TEST_CASE("decomposition") {
  // f = x1, κ = 0, d = 3: both sides equal 2‖x1‖² = 8π/3.
  auto s0 = system_for(RootFamily::Trivial, 3, {});
  const auto c0 = verify_decomposition(s0, F("x1", 3));
  CHECK(c0.dirichlet == doctest::Approx(2 * 4 * pi / 3).epsilon(1e-12));
  CHECK(c0.rotation_sum == doctest::Approx(2 * 4 * pi / 3).epsilon(1e-12));
  CHECK(c0.residual <= 1e-12);

  // f = x1 on Z2², κ = (k1, k2): E term contributes 2 k1 ω.
  const double k1 = 1.0, k2 = 2.0;
  auto z = system_for(RootFamily::Z2, 2, {k1, k2});
  const auto cz = verify_decomposition(z, F("x1", 2));
  const double omega = z->integrator().normalization_constant();
  CHECK(cz.difference_sum == doctest::Approx(2 * k1 * omega).epsilon(1e-12));
  CHECK(cz.rotation_sum == doctest::Approx(z->integrator().integrate(F("x2^2", 2))).epsilon(1e-12));
  CHECK(cz.residual <= 1e-10);

  std::mt19937_64 rng(6);
  for (const auto& cfg : kConfigs) {
    auto sys = system_for(cfg.family, cfg.d, cfg.kappa);
    for (int t = 0; t < 5; ++t) {
      const Polynomial p = random_polynomial(cfg.d, 5, rng);
      CHECK(verify_decomposition(sys, p).residual <= 1e-8);
      // G-invariant f: the difference terms vanish.
      const auto inv = verify_decomposition(sys, invariant_part(*sys, p));
      CHECK(inv.difference_sum <= 1e-10);
      CHECK(inv.residual <= 1e-8);
    }
  }
}

TEST_CASE("lemma identity") {
  std::mt19937_64 rng(7);
  auto s0 = system_for(RootFamily::Trivial, 3, {});
  for (int t = 0; t < 5; ++t) {
    const Polynomial p = random_polynomial(3, 4, rng);
    const Eigen::VectorXd y = random_sphere_point(3, rng);
    const auto c = verify_lemma_identity(*s0, p, y);
    CHECK(c.difference_term == 0.0);
    CHECK(c.residual <= 1e-9);
  }
  // Constants: both sides vanish.
  auto z3 = system_for(RootFamily::Z2, 3, {1.0, 0.0, 2.0});
  const auto cc = verify_lemma_identity(*z3, F("3", 3), Eigen::Vector3d(0.6, 0.0, 0.8));
  CHECK(cc.residual <= 1e-10);
  CHECK(std::abs(cc.rotation_term) <= 1e-14);

  for (const auto& cfg : kConfigs) {
    auto sys = system_for(cfg.family, cfg.d, cfg.kappa);
    for (int t = 0; t < 5; ++t) {
      const Polynomial p = random_polynomial(cfg.d, 5, rng);
      const Eigen::VectorXd y = random_sphere_point(cfg.d, rng);
      const auto c = verify_lemma_identity(*sys, p, y);
      CHECK(c.residual <= 1e-8);
      // The sign of the rotation term matters whenever it is nonzero.
      if (std::abs(c.rotation_term) > 1e-6) CHECK(c.opposite_sign_residual > 1e-6);
    }
  }
}

TEST_CASE("gradient identity") {
  std::mt19937_64 rng(8);
  auto s0 = system_for(RootFamily::Trivial, 3, {});
  const auto g0 = verify_gradient_identity(s0, random_polynomial(3, 4, rng));
  CHECK(g0.residual <= 1e-9);
  CHECK(g0.radial_direct == doctest::Approx(0.0).scale(1.0));
  CHECK(std::abs(g0.dirichlet - g0.gradient_norm_squared) <= 1e-9);

  auto z = system_for(RootFamily::Z2, 2, {1.0, 1.0});
  const auto gz = verify_gradient_identity(z, F("x1 + x2^3 - 0.5*x1*x2", 2));
  CHECK(gz.residual <= 1e-8);
  CHECK(gz.radial_residual <= 1e-10);
  CHECK(gz.radial_direct > 1e-3);
  CHECK(std::sqrt(gz.dirichlet) < std::sqrt(gz.gradient_norm_squared));

  for (const auto& cfg : kConfigs) {
    auto sys = system_for(cfg.family, cfg.d, cfg.kappa);
    for (int t = 0; t < 4; ++t) {
      const Polynomial p = random_polynomial(cfg.d, 5, rng);
      const auto c = verify_gradient_identity(sys, p);
      CHECK(c.residual <= 1e-8);
      CHECK(c.radial_residual <= 1e-8);
      CHECK(c.sign_holds);
      CHECK(c.inequality_holds);
      const auto inv = verify_gradient_identity(sys, invariant_part(*sys, p));
      CHECK(std::abs(inv.radial_reflection) <= 1e-10);
      CHECK(std::abs(inv.dirichlet - inv.gradient_norm_squared) <= 1e-8);
    }
  }
}

TEST_CASE("residuals are quadratic in f") {
  std::mt19937_64 rng(9);
  auto sys = system_for(RootFamily::Z2, 3, {1.0, 0.0, 2.0});
  const Polynomial p = random_polynomial(3, 4, rng);
  const Eigen::VectorXd y = random_sphere_point(3, rng);
  const double scale = sys->integrator().norm_squared(p) + verify_gradient_identity(sys, p).gradient_norm_squared;
  // Rounding in the two evaluations is independent, hence the absolute floor.
  const double floor = 256 * std::numeric_limits<double>::epsilon() * scale;
  for (double c : {2.0, 10.0}) {
    const Polynomial q = c * p;
    CHECK(verify_decomposition(sys, q).residual <= c * c * (verify_decomposition(sys, p).residual * (1 + 1e-6) + floor));
    CHECK(verify_lemma_identity(*sys, q, y).residual <=
          c * c * (verify_lemma_identity(*sys, p, y).residual * (1 + 1e-6) + floor));
    CHECK(verify_gradient_identity(sys, q).residual <=
          c * c * (verify_gradient_identity(sys, p).residual * (1 + 1e-6) + floor));
  }
}

TEST_CASE("proof bounds") {
  std::mt19937_64 rng(10);
  auto z = system_for(RootFamily::Z2, 3, {1.0, 0.0, 2.0});
  const Eigen::Vector3d e1(1, 0, 0);
  for (int t = 0; t < 3; ++t) {
    const Polynomial f = normalize_admissible(z, random_polynomial(3, 4, rng)).to_polynomial();
    const auto rep = verify_proof_bounds(*z, f, e1, 0.5);
    CHECK(rep.holds);
    CHECK(rep.j1_margin >= 0.0);
    CHECK(rep.pointwise_excess <= 1e-12);
    CHECK(rep.radial_identity_exact);
    CHECK(rep.roots.size() == 2);
    for (const auto& rb : rep.roots) {
      CHECK(rb.margin > 0.0);
      CHECK(rb.split_margin >= -1e-10);
      CHECK(rb.j2 <= rb.j2_inner + rb.j2_outer + 1e-12);
    }
  }

  // G-invariant f: E_α f = 0 and only the 1/(1-ε) part remains.
  const Polynomial inv = normalize_admissible(z, F("x1^2 - 2*x2^4 + x3^2*x1^2", 3)).to_polynomial();
  for (double eps : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto rep = verify_proof_bounds(*z, inv, e1, eps);
    CHECK(rep.holds);
    for (const auto& rb : rep.roots) {
      CHECK(rb.inner_bound <= 1e-12);
      CHECK(rb.j2 <= rb.outer_bound);
    }
  }

  CHECK_THROWS_AS(verify_proof_bounds(*z, inv, e1, 1.0), std::invalid_argument);

  for (const auto& cfg : kConfigs) {
    auto sys = system_for(cfg.family, cfg.d, cfg.kappa);
    const Polynomial f = normalize_admissible(sys, random_polynomial(cfg.d, 3, rng)).to_polynomial();
    const Eigen::VectorXd y = random_sphere_point(cfg.d, rng);
    for (double eps : {0.1, 0.5, 0.9}) CHECK(verify_proof_bounds(*sys, f, y, eps).holds);
  }
}

TEST_CASE("proof-side constant") {
  // κ = 0, d = 3: min(2ε, (1-ε)²/4).
  CHECK(proof_side_constant(3, 0.0, 0.5) == doctest::Approx(0.0625));
  CHECK(proof_side_constant(3, 0.0, 0.05) == doctest::Approx(0.1));
  const auto best = best_proof_side_constant(3, 0.0);
  CHECK(best.value > 0.19);
  CHECK(best.value < 0.21);
  // The √2 constant can only give a larger bound.
  CHECK(best_proof_side_constant(3, 3.0, true).value >= best_proof_side_constant(3, 3.0, false).value);
}

TEST_CASE("constant estimation") {
  auto s0 = system_for(RootFamily::Trivial, 3, {});
  OptimizerOptions opt;
  opt.restarts = 8;
  opt.seed = 1;
  const auto one = estimate_constant(s0, 1, opt);
  CHECK(one.value == doctest::Approx(2.0).epsilon(1e-12));
  // Exhaustive parameterization of H_1: every unit combination gives 2.
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd u = random_sphere_point(3, rng);
    const SphereFunction f(s0, {Eigen::VectorXd::Zero(1), u});
    CHECK(uncertainty_product(f, false).product == doctest::Approx(2.0).epsilon(1e-12));
  }

  auto z = system_for(RootFamily::Z2, 2, {1.0, 1.0});
  const auto est = estimate_constant(z, 4, opt);
  CHECK(est.value > 0.0);
  for (std::size_t n = 1; n < est.by_budget.size(); ++n) CHECK(est.by_budget[n] <= est.by_budget[n - 1]);
  CHECK(est.proof_side <= est.value);
  CHECK(uncertainty_product(est.witness, false).product == doctest::Approx(est.value).epsilon(1e-9));

  const auto again = estimate_constant(z, 4, opt);
  CHECK(again.value == est.value);
  opt.seed = 2;
  const auto other = estimate_constant(z, 4, opt);
  CHECK(std::abs(other.value - est.value) <= 1e-4);
}
