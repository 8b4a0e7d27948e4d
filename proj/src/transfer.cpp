#include "dunkl/transfer.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace dunkl {

namespace {

std::vector<double> orbit_values(const RootSystem& rs, const Multiplicity& kappa) {
  std::vector<double> out(rs.orbit_count(), 0.0);
  for (std::size_t k = 0; k < rs.root_count(); ++k) out[rs.orbit_index()[k]] = kappa[k];
  return out;
}

// Rejects a polynomial whose terms with odd exponent in `coord` (or any
// coordinate when coord < 0) are above rounding level, and drops them otherwise.
Polynomial even_part(const Polynomial& p, int coord) {
  double odd = 0.0;
  Polynomial out(p.dimension());
  for (const auto& [e, c] : p.terms()) {
    bool is_odd = false;
    for (int i = 0; i < p.dimension(); ++i)
      if ((coord < 0 || i == coord) && e[i] % 2 != 0) is_odd = true;
    if (is_odd) {
      odd = std::max(odd, std::abs(c));
    } else {
      out.add_term(e, c);
    }
  }
  if (odd > 1e-8 * std::max(1.0, p.max_coefficient())) {
    throw std::domain_error("function is not even under the transfer symmetry");
  }
  return out;
}

double abs_integral(const SphereIntegrator& integ, const Polynomial& p, int coord) {
  double s = 0.0;
  for (const auto& [e, c] : p.terms()) s += c * integ.abs_moment(e, coord);
  return s;
}

RootSystem lifted_roots(const RootSystem& base) {
  const int d = base.dimension();
  std::vector<Eigen::VectorXd> roots;
  for (const auto& r : base.positive_roots()) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d + 1);
    v.head(d) = r.vector;
    roots.push_back(std::move(v));
  }
  roots.push_back(std::sqrt(2.0) * Eigen::VectorXd::Unit(d + 1, d));
  const RootFamily fam = base.family() == RootFamily::Z2 ? RootFamily::Z2 : RootFamily::Custom;
  return RootSystem::from_roots(d + 1, roots, fam);
}

// ∫_{T^d} z^a Π z_i^{b_i - 1} (1-|z|)^{b_{d+1} - 1} dz with b = (κ_1 + 1/2, ..., κ_{d+1} + 1/2).
double dirichlet_moment(const Exponent& a, const std::vector<double>& kappa) {
  const int d = static_cast<int>(a.size());
  double log_num = std::lgamma(kappa[d] + 0.5), total = kappa[d] + 0.5;
  for (int i = 0; i < d; ++i) {
    const double b = a[i] + kappa[i] + 0.5;
    log_num += std::lgamma(b);
    total += b;
  }
  return std::exp(log_num - std::lgamma(total));
}

}  // namespace

// ---------------------------------------------------------------------------
// Ball

BallSpace::BallSpace(const RootSystem& roots, const Multiplicity& kappa, double mu, IntegrationOptions options)
    : base_(roots), kappa_(kappa), mu_(mu) {
  if (!(mu >= 0.0)) throw std::invalid_argument("μ must be non-negative");
  if (kappa.size() != roots.root_count()) throw std::invalid_argument("multiplicity does not match root system");
  const RootSystem lifted = lifted_roots(roots);
  std::vector<double> values(kappa.values().begin(), kappa.values().end());
  values.push_back(mu);
  sphere_ = HarmonicSystem::create(lifted, Multiplicity::from_roots(lifted, values), options);
  base_integrator_ = std::make_shared<const SphereIntegrator>(roots, kappa, options);
  lift_factor_ = std::pow(2.0, mu + 1.0);
}

double BallSpace::weight(const Eigen::VectorXd& x) const {
  return weight_squared_eval(base_, kappa_, x) * std::pow(1.0 - x.squaredNorm(), mu_ - 0.5);
}

Polynomial BallSpace::lift(const Polynomial& f) const {
  const int d = dimension();
  if (f.dimension() != d) throw std::invalid_argument("ball function has wrong dimension");
  Polynomial out(d + 1);
  Exponent e(d + 1, 0);
  for (const auto& [a, c] : f.terms()) {
    std::copy(a.begin(), a.end(), e.begin());
    out.add_term(e, c);
  }
  return out;
}

Polynomial BallSpace::push_down(const Polynomial& lifted) const {
  const int d = dimension();
  if (lifted.dimension() != d + 1) throw std::invalid_argument("sphere function has wrong dimension");
  const Polynomial even = even_part(lifted, d);
  const Polynomial one_minus = Polynomial::constant(d, 1.0) - norm_squared_power<double>(d, 1);
  std::vector<Polynomial> powers{Polynomial::constant(d, 1.0)};
  Polynomial out(d);
  for (const auto& [e, c] : even.terms()) {
    const int k = e[d] / 2;
    while (static_cast<int>(powers.size()) <= k) powers.push_back(powers.back() * one_minus);
    out += Polynomial::monomial(Exponent(e.begin(), e.begin() + d), c) * powers[k];
  }
  return out;
}

double BallSpace::integral(const Polynomial& f) const {
  return sphere_->integrator().integrate(lift(f)) / lift_factor_;
}

double BallSpace::integral_direct(const Polynomial& f) const {
  const int d = dimension();
  const double kt = kappa_.total();
  double s = 0.0;
  for (const Polynomial& part : homogeneous_components(f)) {
    if (part.is_zero()) continue;
    const int n = part.degree();
    // ∫_0^1 r^{n+d-1+2|κ|} (1-r²)^{μ-1/2} dr
    const double radial = 0.5 * std::beta(0.5 * (n + d) + kt, mu_ + 0.5);
    s += radial * base_integrator_->integrate(part);
  }
  return s;
}

double BallSpace::norm_squared(const Polynomial& f) const {
  return sphere_->integrator().norm_squared(lift(f)) / lift_factor_;
}

Polynomial BallSpace::fractional_laplacian(const Polynomial& f, double alpha) const {
  const SphereFunction lifted = SphereFunction::from_polynomial(sphere_, lift(f));
  return push_down(dunkl::fractional_laplacian(lifted, alpha).to_polynomial());
}

Polynomial BallSpace::laplacian_operator(const Polynomial& f) const {
  return push_down(sphere_laplacian_polynomial(sphere_->operators(), lift(f)));
}

Polynomial BallSpace::normalize(const Polynomial& f) const {
  const int d = dimension();
  const double mean = integral(f) / integral(Polynomial::constant(d, 1.0));
  const Polynomial g = f - Polynomial::constant(d, mean);
  const double n2 = norm_squared(g);
  if (!(n2 > 1e-24)) throw std::domain_error("function is constant on the ball; it cannot be normalized");
  return (1.0 / std::sqrt(n2)) * g;
}

// ---------------------------------------------------------------------------
// Simplex

std::string to_string(SimplexVariant variant) { return variant == SimplexVariant::Z2 ? "Z2" : "B"; }

SimplexVariant parse_simplex_variant(std::string_view name) {
  if (name == "Z2" || name == "z2") return SimplexVariant::Z2;
  if (name == "B" || name == "b") return SimplexVariant::B;
  throw std::invalid_argument("unknown simplex weight variant '" + std::string(name) + "' (expected Z2 or B)");
}

SimplexSpace::SimplexSpace(SimplexVariant variant, int dimension, std::vector<double> parameters,
                           IntegrationOptions options)
    : variant_(variant), dimension_(dimension), parameters_(std::move(parameters)) {
  if (dimension < 1) throw std::invalid_argument("simplex dimension must be positive");
  for (double p : parameters_)
    if (!(p >= 0.0)) throw std::invalid_argument("simplex weight parameters must be non-negative");
  const int d = dimension;
  if (variant == SimplexVariant::Z2) {
    if (static_cast<int>(parameters_.size()) != d + 1) {
      throw std::invalid_argument("Z2 simplex weight needs d + 1 parameters");
    }
    const RootSystem rs = RootSystem::build(RootFamily::Z2, d);
    std::vector<double> per_root(parameters_.begin(), parameters_.begin() + d);
    ball_ = std::make_unique<BallSpace>(rs, Multiplicity::from_roots(rs, per_root), parameters_[d], options);
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += parameters_[i];
    pullback_factor_ = std::pow(2.0, s);
  } else {
    if (parameters_.size() != 3) throw std::invalid_argument("B simplex weight needs parameters κ', κ, μ");
    if (d < 2) throw std::invalid_argument("B simplex weight needs d >= 2");
    const RootSystem rs = RootSystem::build(RootFamily::B, d);
    // |x_i² - x_j²|^{2·κ/2} = |z_i - z_j|^κ.
    std::vector<double> per_root;
    for (std::size_t k = 0; k < rs.root_count(); ++k) {
      per_root.push_back(rs.orbit_index()[k] == rs.orbit_index()[0] ? parameters_[0] : 0.5 * parameters_[1]);
    }
    ball_ = std::make_unique<BallSpace>(rs, Multiplicity::from_roots(rs, per_root), parameters_[2], options);
    pullback_factor_ = std::pow(2.0, d * parameters_[0]);
  }
  lambda_ = ball_->sphere()->lambda();
}

double SimplexSpace::weight(const Eigen::VectorXd& z) const {
  const int d = dimension_;
  const double rest = 1.0 - z.sum();
  double w = 1.0;
  if (variant_ == SimplexVariant::Z2) {
    for (int i = 0; i < d; ++i) w *= std::pow(z[i], parameters_[i] - 0.5);
    return w * std::pow(rest, parameters_[d] - 0.5);
  }
  for (int i = 0; i < d; ++i) w *= std::pow(z[i], parameters_[0] - 0.5);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) w *= std::pow(std::abs(z[i] - z[j]), parameters_[1]);
  return w * std::pow(rest, parameters_[2] - 0.5);
}

Polynomial SimplexSpace::pull_back(const Polynomial& g) const {
  if (g.dimension() != dimension_) throw std::invalid_argument("simplex function has wrong dimension");
  Polynomial out(dimension_);
  Exponent e(dimension_);
  for (const auto& [a, c] : g.terms()) {
    for (int i = 0; i < dimension_; ++i) e[i] = 2 * a[i];
    out.add_term(e, c);
  }
  return out;
}

Polynomial SimplexSpace::push_forward(const Polynomial& even) const {
  if (even.dimension() != dimension_) throw std::invalid_argument("ball function has wrong dimension");
  Polynomial out(dimension_);
  Exponent e(dimension_);
  const Polynomial part = even_part(even, -1);
  for (const auto& [a, c] : part.terms()) {
    for (int i = 0; i < dimension_; ++i) e[i] = a[i] / 2;
    out.add_term(e, c);
  }
  return out;
}

double SimplexSpace::integral(const Polynomial& g) const { return ball_->integral(pull_back(g)) / pullback_factor_; }

std::optional<double> SimplexSpace::integral_direct(const Polynomial& g) const {
  const int d = dimension_;
  std::vector<double> kappa;
  Polynomial integrand = g;
  if (variant_ == SimplexVariant::Z2) {
    kappa = parameters_;
  } else {
    const double k = parameters_[1];
    if (k != std::floor(k) || static_cast<long long>(k) % 2 != 0) return std::nullopt;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        const Polynomial diff = Polynomial::variable(d, i) - Polynomial::variable(d, j);
        for (int t = 0; t < static_cast<int>(k); ++t) integrand = integrand * diff;
      }
    kappa.assign(d, parameters_[0]);
    kappa.push_back(parameters_[2]);
  }
  double s = 0.0;
  for (const auto& [a, c] : integrand.terms()) s += c * dirichlet_moment(a, kappa);
  return s;
}

double SimplexSpace::norm_squared(const Polynomial& g) const {
  return ball_->norm_squared(pull_back(g)) / pullback_factor_;
}

double SimplexSpace::inner(const Polynomial& a, const Polynomial& b) const {
  const Polynomial p = a * b;
  if (auto direct = integral_direct(p)) return *direct;
  return integral(p);
}

Polynomial SimplexSpace::ball_route(const Polynomial& g, double alpha) const {
  return push_forward(ball_->fractional_laplacian(pull_back(g), alpha));
}

Polynomial SimplexSpace::fractional_laplacian(const Polynomial& g, double alpha) const {
  return std::pow(4.0, -alpha) * ball_route(g, alpha);
}

Polynomial SimplexSpace::intrinsic_fractional_laplacian(const Polynomial& g, double alpha) const {
  const int d = dimension_;
  const int top = std::max(0, g.degree());
  std::vector<Exponent> monomials;
  std::vector<int> degree_of;
  for (int n = 0; n <= top; ++n)
    for (auto& e : exponents_of_degree(d, n)) {
      monomials.push_back(std::move(e));
      degree_of.push_back(n);
    }
  const auto m = static_cast<Eigen::Index>(monomials.size());
  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = a; b < m; ++b) {
      gram(a, b) = gram(b, a) = inner(Polynomial::monomial(monomials[a], 1.0), Polynomial::monomial(monomials[b], 1.0));
    }
  // Cholesky in degree order: the leading columns of L^{-T} span the
  // polynomials of each degree, so each block is an orthonormal basis of
  // the orthogonal complement of the lower degrees.
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw std::runtime_error("simplex Gram matrix is not positive definite");
  Eigen::VectorXd coeffs(m);
  for (Eigen::Index a = 0; a < m; ++a) coeffs[a] = g.coefficient(monomials[a]);
  Eigen::VectorXd c = llt.matrixU() * coeffs;  // Lᵀ a
  if (alpha < 0.0 && std::abs(c[0]) > 1e-10) {
    throw std::domain_error("negative fractional power of a function with nonzero mean");
  }
  for (Eigen::Index a = 0; a < m; ++a) {
    const int n = degree_of[a];
    c[a] *= n == 0 ? (alpha == 0.0 ? 1.0 : 0.0) : std::pow(n * (n + lambda_), alpha);
  }
  const Eigen::VectorXd out_coeffs = llt.matrixU().solve(c);
  Polynomial out(d);
  for (Eigen::Index a = 0; a < m; ++a) out.add_term(monomials[a], out_coeffs[a]);
  return out;
}

Polynomial SimplexSpace::normalize(const Polynomial& g) const {
  const int d = dimension_;
  const double mean = integral(g) / integral(Polynomial::constant(d, 1.0));
  const Polynomial h = g - Polynomial::constant(d, mean);
  const double n2 = norm_squared(h);
  if (!(n2 > 1e-24)) throw std::domain_error("function is constant on the simplex; it cannot be normalized");
  return (1.0 / std::sqrt(n2)) * h;
}

double simplex_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return 1.0 - x.cwiseMax(0.0).cwiseSqrt().dot(y.cwiseMax(0.0).cwiseSqrt());
}

// ---------------------------------------------------------------------------
// Uncertainty products

TransferReport ball_uncertainty_product(const BallSpace& ball, const Polynomial& f) {
  const int d = ball.dimension();
  const HarmonicSystemPtr& sys = ball.sphere();
  const double c = ball.lift_factor();
  const Polynomial lifted = ball.lift(f);
  const SphereFunction s = SphereFunction::from_polynomial(sys, lifted);

  TransferReport out;
  UncertaintyReport& rep = out.report;
  rep.domain = "ball";
  rep.group = to_string(ball.roots().family());
  rep.kappa = orbit_values(ball.roots(), ball.kappa());
  rep.mu = ball.mu();
  rep.dimension = d;
  rep.degree = std::max(0, f.degree());

  const double mass = s.norm_squared() / c;
  const Eigen::VectorXd m = moment_vector(*sys, lifted).head(d) / c;
  const Localization loc = localization_min(m, mass);
  rep.localization = loc.value;
  rep.minimizer = loc.direction;
  rep.localization_grid = localization_grid_search(m, mass).value;
  rep.localization_axis = localization_axis_min(m, mass);
  rep.dirichlet = s.dirichlet_energy() / c;
  rep.product = rep.localization * rep.dirichlet;
  out.dirichlet_alternative = -ball.integral(ball.laplacian_operator(f) * f);
  return out;
}

TransferReport simplex_uncertainty_product(const SimplexSpace& simplex, const Polynomial& g) {
  const int d = simplex.dimension();
  const BallSpace& ball = simplex.ball();
  const HarmonicSystemPtr& sys = ball.sphere();
  const double scale = ball.lift_factor() * simplex.pullback_factor();
  const Polynomial lifted = ball.lift(simplex.pull_back(g));
  const SphereFunction s = SphereFunction::from_polynomial(sys, lifted);

  TransferReport out;
  UncertaintyReport& rep = out.report;
  rep.domain = "simplex";
  rep.group = to_string(simplex.variant());
  rep.kappa = simplex.parameters();
  rep.dimension = d;
  rep.degree = std::max(0, g.degree());

  const double mass = s.norm_squared() / scale;
  // a_i = ∫ √z_i g² W^T dz, pulled back as |x_i| on the ball.
  const Polynomial sq = lifted * lifted;
  Eigen::VectorXd a(d);
  for (int i = 0; i < d; ++i) a[i] = abs_integral(sys->integrator(), sq, i) / scale;
  const double r = a.norm();
  rep.localization = mass - r;
  if (r > 0.0) rep.minimizer = a.cwiseAbs2() / (r * r);
  rep.localization_grid = simplex_localization_search(a, mass).value;
  rep.localization_axis = mass - a.maxCoeff();
  rep.dirichlet = s.dirichlet_energy() / (4.0 * scale);
  rep.product = rep.localization * rep.dirichlet;
  out.dirichlet_alternative = simplex.integral(simplex.intrinsic_fractional_laplacian(g, 1.0) * g);
  return out;
}

Localization simplex_localization_search(const Eigen::VectorXd& abs_moments, double mass) {
  const int d = static_cast<int>(abs_moments.size());
  auto objective = [&](const Eigen::VectorXd& y) { return mass - abs_moments.dot(y.cwiseMax(0.0).cwiseSqrt()); };
  auto project = [](Eigen::VectorXd y) {
    y = y.cwiseMax(0.0);
    const double s = y.sum();
    if (s > 1.0) y /= s;
    return y;
  };

  std::vector<Eigen::VectorXd> grid;
  if (d == 1) {
    for (int i = 0; i <= 2000; ++i) grid.push_back(Eigen::VectorXd::Constant(1, i / 2000.0));
  } else if (d == 2) {
    const int n = 200;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; i + j <= n; ++j) grid.push_back(Eigen::Vector2d(double(i) / n, double(j) / n));
  } else {
    std::mt19937_64 rng(0x5eed);
    std::gamma_distribution<double> gamma(1.0, 1.0);
    for (int k = 0; k < 20000; ++k) {
      Eigen::VectorXd y(d + 1);
      for (int i = 0; i <= d; ++i) y[i] = gamma(rng);
      grid.push_back(y.head(d) / y.sum());
    }
  }
  Eigen::VectorXd best = grid.front();
  double best_value = objective(best);
  for (const auto& y : grid) {
    const double v = objective(y);
    if (v < best_value) {
      best_value = v;
      best = y;
    }
  }
  // Compass search; moves along e_i and e_i - e_j keep points on the face |y| = 1.
  std::vector<Eigen::VectorXd> dirs;
  for (int i = 0; i < d; ++i) {
    dirs.push_back(Eigen::VectorXd::Unit(d, i));
    for (int j = i + 1; j < d; ++j) dirs.push_back(Eigen::VectorXd::Unit(d, i) - Eigen::VectorXd::Unit(d, j));
  }
  for (double h = 0.01; h > 1e-13;) {
    bool improved = false;
    for (const auto& dir : dirs) {
      for (double s : {1.0, -1.0}) {
        const Eigen::VectorXd cand = project(best + s * h * dir);
        const double v = objective(cand);
        if (v < best_value) {
          best_value = v;
          best = cand;
          improved = true;
        }
      }
    }
    if (!improved) h *= 0.5;
  }
  Localization out;
  out.value = best_value;
  if (abs_moments.norm() > 0.0) out.direction = best;
  return out;
}

}  // namespace dunkl
