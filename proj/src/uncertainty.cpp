#include "dunkl/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "dunkl/parallel.hpp"

namespace dunkl {

namespace {

std::span<const double> as_span(const Eigen::VectorXd& x) { return {x.data(), static_cast<std::size_t>(x.size())}; }

Polynomial coordinate(int d, int i) { return Polynomial::variable(d, i); }

// Σ_{i,j} y_i x_j D_{i,j} f.
Polynomial rotation_field(const Polynomial& f, const Eigen::VectorXd& y) {
  const int d = f.dimension();
  Polynomial r(d);
  for (int i = 0; i < d; ++i) {
    if (y[i] == 0.0) continue;
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      r += y[i] * (coordinate(d, j) * angular_derivative(i, j, f));
    }
  }
  return r;
}

std::vector<double> orbit_values(const RootSystem& rs, const Multiplicity& kappa) {
  std::vector<double> out(rs.orbit_count(), 0.0);
  for (std::size_t k = 0; k < rs.root_count(); ++k) out[rs.orbit_index()[k]] = kappa[k];
  return out;
}

}  // namespace

RationalPolynomial radial_rotation(const RationalPolynomial& f) {
  const int d = f.dimension();
  RationalPolynomial r(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      r += RationalPolynomial::variable(d, i) * RationalPolynomial::variable(d, j) * angular_derivative(i, j, f);
    }
  return r;
}

SphereFunction normalize_admissible(const SphereFunction& f) {
  SphereFunction g = f.spectral_map([](int n) { return n == 0 ? 0.0 : 1.0; });
  const double norm = g.norm();
  if (!(norm > 1e-12)) throw std::domain_error("function is constant on the sphere; it cannot be normalized");
  g *= 1.0 / norm;
  return g;
}

SphereFunction normalize_admissible(HarmonicSystemPtr system, const Polynomial& f) {
  return normalize_admissible(SphereFunction::from_polynomial(std::move(system), f));
}

Eigen::VectorXd moment_vector(const HarmonicSystem& system, const Polynomial& f) {
  const int d = system.dimension();
  const Polynomial f2 = f * f;
  Eigen::VectorXd m(d);
  for (int i = 0; i < d; ++i) m[i] = system.integrator().integrate(coordinate(d, i) * f2);
  return m;
}

Localization localization_min(const Eigen::VectorXd& moments, double mass) {
  Localization out;
  const double r = moments.norm();
  out.value = mass - r;
  if (r > 0.0) out.direction = moments / r;
  return out;
}

Localization localization_min(const HarmonicSystem& system, const Polynomial& f) {
  return localization_min(moment_vector(system, f), system.integrator().integrate(f * f));
}

Localization localization_grid_search(const Eigen::VectorXd& moments, double mass, int points) {
  const int d = static_cast<int>(moments.size());
  auto objective = [&](const Eigen::VectorXd& y) { return mass - moments.dot(y); };

  std::vector<Eigen::VectorXd> grid;
  grid.reserve(points);
  if (d == 1) {
    grid.push_back(Eigen::VectorXd::Constant(1, 1.0));
    grid.push_back(Eigen::VectorXd::Constant(1, -1.0));
  } else if (d == 2) {
    for (int k = 0; k < points; ++k) {
      const double t = 2.0 * std::numbers::pi * k / points;
      grid.push_back(Eigen::Vector2d(std::cos(t), std::sin(t)));
    }
  } else if (d == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < points; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / points;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      grid.push_back(Eigen::Vector3d(r * std::cos(golden * k), r * std::sin(golden * k), z));
    }
  } else {
    std::mt19937_64 rng(0x5eed);
    for (int k = 0; k < points; ++k) grid.push_back(random_sphere_point(d, rng));
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

  // Local refinement: compass search along tangent directions.
  if (d >= 2) {
    for (double h = 0.05; h > 1e-12;) {
      Eigen::MatrixXd frame = Eigen::MatrixXd::Identity(d, d);
      frame -= best * best.transpose();
      bool improved = false;
      for (int t = 0; t < d && !improved; ++t) {
        const Eigen::VectorXd dir = frame.col(t);
        if (dir.norm() < 1e-8) continue;
        for (double s : {1.0, -1.0}) {
          const Eigen::VectorXd cand = (best + s * h * dir.normalized()).normalized();
          const double v = objective(cand);
          if (v < best_value) {
            best_value = v;
            best = cand;
            improved = true;
            break;
          }
        }
      }
      if (!improved) h *= 0.5;
    }
  }

  Localization out;
  out.value = best_value;
  if (moments.norm() > 0.0) out.direction = best;
  return out;
}

double localization_axis_min(const Eigen::VectorXd& moments, double mass) { return mass - moments.maxCoeff(); }

double geodesic_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  // 2 asin(‖x - y‖/2) is accurate for nearby points, unlike acos.
  return 2.0 * std::asin(std::min(1.0, 0.5 * (x - y).norm()));
}

DecompositionCheck verify_decomposition(HarmonicSystemPtr system, const Polynomial& f) {
  const int d = system->dimension();
  const SphereIntegrator& integ = system->integrator();
  const OperatorContext& ops = system->operators();
  DecompositionCheck out;
  out.dirichlet = SphereFunction::from_polynomial(system, f).dirichlet_energy();
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) out.rotation_sum += integ.norm_squared(angular_derivative(i, j, f));
  for (std::size_t k = 0; k < system->roots().root_count(); ++k) {
    const double kv = system->kappa()[k];
    if (kv == 0.0) continue;
    out.difference_sum += kv * integ.norm_squared(difference_operator(ops, k, f));
  }
  out.residual = std::abs(out.dirichlet - out.rotation_sum - out.difference_sum);
  return out;
}

LemmaCheck verify_lemma_identity(const HarmonicSystem& system, const Polynomial& f, const Eigen::VectorXd& y) {
  const int d = system.dimension();
  if (y.size() != d) throw std::invalid_argument("direction has wrong dimension");
  const SphereIntegrator& integ = system.integrator();
  LemmaCheck out;
  const double weight = system.kappa().total() + 0.5 * (d - 1);
  out.lhs = weight * moment_vector(system, f).dot(y);
  for (std::size_t k = 0; k < system.roots().root_count(); ++k) {
    const double kv = system.kappa()[k];
    if (kv == 0.0) continue;
    const Eigen::VectorXd& v = system.roots().positive_roots()[k].vector;
    out.difference_term += kv * y.dot(v) * integ.inner_product(difference_operator(system.operators(), k, f), f);
  }
  out.rotation_term = integ.integrate(rotation_field(f, y) * f);
  out.residual = std::abs(out.lhs - out.difference_term - out.rotation_term);
  out.opposite_sign_residual = std::abs(out.lhs - out.difference_term + out.rotation_term);
  return out;
}

GradientCheck verify_gradient_identity(HarmonicSystemPtr system, const Polynomial& f) {
  const SphereIntegrator& integ = system->integrator();
  const OperatorContext& ops = system->operators();
  GradientCheck out;
  out.dirichlet = SphereFunction::from_polynomial(system, f).dirichlet_energy();
  const auto grad = sphere_gradient_polynomial(ops, f);
  for (const auto& g : grad) out.gradient_norm_squared += integ.norm_squared(g);
  out.radial_direct = integ.integrate(radial_component(grad) * f);
  const double ff = integ.integrate(f * f);
  for (std::size_t k = 0; k < system->roots().root_count(); ++k) {
    const double kv = system->kappa()[k];
    if (kv == 0.0) continue;
    out.radial_reflection += kv * (ff - integ.inner_product(compose_linear(f, ops.reflection(k)), f));
  }
  out.residual = std::abs(out.dirichlet - (out.gradient_norm_squared - 2.0 * system->lambda() * out.radial_direct));
  out.radial_residual = std::abs(out.radial_direct - out.radial_reflection);
  out.sign_holds = out.radial_direct >= -1e-10;
  out.inequality_holds =
      std::sqrt(std::max(0.0, out.dirichlet)) <= std::sqrt(std::max(0.0, out.gradient_norm_squared)) * (1.0 + 1e-10);
  return out;
}

ProofBoundsReport verify_proof_bounds(const HarmonicSystem& system, const Polynomial& f, const Eigen::VectorXd& y,
                                      double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  const int d = system.dimension();
  if (y.size() != d) throw std::invalid_argument("direction has wrong dimension");
  const SphereIntegrator& integ = system.integrator();
  const OperatorContext& ops = system.operators();

  ProofBoundsReport out;
  out.epsilon = epsilon;
  out.y = y;
  const double mass = integ.integrate(f * f);
  out.localization = std::max(0.0, mass - moment_vector(system, f).dot(y));
  const double root_l = std::sqrt(out.localization);

  std::vector<std::pair<std::pair<int, int>, Polynomial>> rotations;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      Polynomial dij = angular_derivative(i, j, f);
      out.rotation_energy += integ.norm_squared(dij);
      rotations.emplace_back(std::pair{i, j}, std::move(dij));
    }
  out.j1 = std::abs(integ.integrate(rotation_field(f, y) * f));
  out.j1_bound = 2.0 * std::sqrt(out.rotation_energy) * root_l;
  out.j1_margin = out.j1_bound - out.j1;

  out.radial_identity_exact = radial_rotation(to_rational(f)).is_zero();

  // Pointwise Cauchy-Schwarz step at quadrature nodes.
  const SphereRule nodes = sphere_product_rule(d, std::max(8, 2 * std::max(0, f.degree())));
  for (Eigen::Index c = 0; c < nodes.size(); ++c) {
    const Eigen::VectorXd x = nodes.nodes.col(c);
    double lhs = 0.0, squares = 0.0;
    for (const auto& [ij, dij] : rotations) {
      const auto [i, j] = ij;
      const double v = dij.evaluate<double>(as_span(x));
      // D_{j,i} = -D_{i,j}
      lhs += ((y[i] - x[i]) * x[j] - (y[j] - x[j]) * x[i]) * v;
      squares += v * v;
    }
    const double rhs = 4.0 * (1.0 - x.dot(y)) * squares;
    out.pointwise_excess = std::max(out.pointwise_excess, lhs * lhs - rhs);
  }

  const double tol = 1e-10 * std::max(1.0, mass);
  bool holds = out.j1_margin >= -tol && out.pointwise_excess <= tol;

  const int weight_degree = static_cast<int>(std::ceil(2.0 * system.kappa().total()));
  for (std::size_t k = 0; k < system.roots().root_count(); ++k) {
    const double kv = system.kappa()[k];
    if (kv == 0.0) continue;
    RootBound rb;
    rb.root = k;
    rb.kappa = kv;
    const Eigen::VectorXd& v = system.roots().positive_roots()[k].vector;
    const Eigen::VectorXd unit = v.normalized();
    const Polynomial e = difference_operator(ops, k, f);
    const Polynomial ef = e * f;
    const double total = y.dot(v) * integ.integrate(ef);
    rb.j2 = std::abs(total);

    double inner = 0.0;
    const double t = (1.0 - epsilon) * std::abs(y.dot(unit));
    if (t > 0.0) {
      const double lo = std::acos(std::min(1.0, t));
      const int inner_degree = ef.degree() + weight_degree + (integ.weight_is_polynomial() ? 0 : 64);
      const SphereRule band = sphere_band_rule(unit, lo, std::numbers::pi - lo, 64, std::max(0, inner_degree));
      double s = 0.0;
      for (Eigen::Index c = 0; c < band.size(); ++c) {
        const Eigen::VectorXd x = band.nodes.col(c);
        s += band.weights[c] * ef.evaluate<double>(as_span(x)) *
             weight_squared_eval(system.roots(), system.kappa(), x);
      }
      inner = y.dot(v) * s;
    }
    rb.j2_inner = std::abs(inner);
    rb.j2_outer = std::abs(total - inner);

    const double e_norm = integ.norm(e);
    rb.outer_bound = mass / (1.0 - epsilon);
    rb.inner_bound = 2.0 / epsilon * e_norm * root_l;
    rb.inner_bound_sqrt2 = std::numbers::sqrt2 / epsilon * e_norm * root_l;
    rb.margin = rb.outer_bound + rb.inner_bound - rb.j2;
    rb.margin_sqrt2 = rb.outer_bound + rb.inner_bound_sqrt2 - rb.j2;
    // Quadrature of the band is less accurate when h_κ² has kinks inside it.
    const double band_tol = integ.weight_is_polynomial() ? tol : 1e-6 * std::max(1.0, mass);
    rb.split_margin = std::min(rb.outer_bound - rb.j2_outer, rb.inner_bound - rb.j2_inner);
    holds = holds && rb.margin >= -tol && rb.split_margin >= -band_tol;
    out.roots.push_back(rb);
  }
  out.holds = holds;
  return out;
}

double proof_side_constant(int dimension, double kappa_total, double epsilon, bool sqrt2_constant) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  const double lambda = 0.5 * (dimension - 2) + kappa_total;
  const double a = (1.0 - epsilon) * (kappa_total + 0.5 * (dimension - 1)) - kappa_total / (1.0 - epsilon);
  if (a <= 0.0) return 0.0;
  const double c = sqrt2_constant ? std::numbers::sqrt2 : 2.0;
  const double b = 2.0 + c * std::sqrt(kappa_total) / epsilon;
  return std::min(epsilon * (1.0 + 2.0 * lambda), (a / b) * (a / b));
}

ProofSideBound best_proof_side_constant(int dimension, double kappa_total, bool sqrt2_constant, int grid) {
  ProofSideBound best;
  for (int k = 1; k <= grid; ++k) {
    const double eps = static_cast<double>(k) / (grid + 1);
    const double v = proof_side_constant(dimension, kappa_total, eps, sqrt2_constant);
    if (v > best.value) best = {v, eps};
  }
  return best;
}

UncertaintyReport uncertainty_product(const SphereFunction& f, bool with_identities) {
  const HarmonicSystem& sys = f.system();
  const Polynomial p = f.to_polynomial();
  const int d = sys.dimension();
  UncertaintyReport rep;
  rep.group = to_string(sys.roots().family());
  rep.kappa = orbit_values(sys.roots(), sys.kappa());
  rep.dimension = d;
  rep.degree = f.max_degree();

  const double mass = f.norm_squared();
  const Eigen::VectorXd m = moment_vector(sys, p);
  const Localization loc = localization_min(m, mass);
  rep.localization = loc.value;
  rep.minimizer = loc.direction;
  rep.localization_grid = localization_grid_search(m, mass).value;
  rep.localization_axis = localization_axis_min(m, mass);
  rep.dirichlet = f.dirichlet_energy();
  rep.product = rep.localization * rep.dirichlet;

  if (with_identities) {
    rep.decomposition_residual = verify_decomposition(f.system_ptr(), p).residual;
    const Eigen::VectorXd y = loc.direction.value_or(Eigen::VectorXd::Unit(d, 0));
    rep.lemma_residual = verify_lemma_identity(sys, p, y).residual;
    const GradientCheck g = verify_gradient_identity(f.system_ptr(), p);
    rep.gradient_residual = g.residual;
    rep.gradient_inequality = g.inequality_holds;
    rep.radial_sign = g.sign_holds;
  }
  return rep;
}

namespace {

struct ProductObjective {
  std::vector<Eigen::MatrixXd> moments;  // M_i(a, b) = ∫ x_i Y_a Y_b h²
  Eigen::VectorXd eigen;                 // n(n + 2λ) per basis element

  double value(const Eigen::VectorXd& c, Eigen::VectorXd* gradient) const {
    const Eigen::Index dim = c.size();
    Eigen::VectorXd m(static_cast<Eigen::Index>(moments.size()));
    std::vector<Eigen::VectorXd> mc;
    mc.reserve(moments.size());
    for (std::size_t i = 0; i < moments.size(); ++i) {
      const auto top = moments[i].topLeftCorner(dim, dim);
      mc.push_back(top * c);
      m[static_cast<Eigen::Index>(i)] = c.dot(mc.back());
    }
    const double r = m.norm();
    const Eigen::VectorXd lc = eigen.head(dim).cwiseProduct(c);
    const double q = c.dot(lc);
    if (gradient) {
      Eigen::VectorXd dr = Eigen::VectorXd::Zero(dim);
      if (r > 1e-300)
        for (std::size_t i = 0; i < moments.size(); ++i) dr += (2.0 * m[static_cast<Eigen::Index>(i)] / r) * mc[i];
      *gradient = -q * dr + 2.0 * (1.0 - r) * lc;
    }
    return (1.0 - r) * q;
  }
};

struct DescentResult {
  Eigen::VectorXd point;
  double value = 0.0;
  bool converged = false;
};

DescentResult descend(const ProductObjective& obj, Eigen::VectorXd c, const OptimizerOptions& opt) {
  c.normalize();
  Eigen::VectorXd g;
  double f = obj.value(c, &g);
  double step = 1.0;
  DescentResult out;
  for (int it = 0; it < opt.max_iterations; ++it) {
    Eigen::VectorXd pg = g - g.dot(c) * c;
    const double gn2 = pg.squaredNorm();
    if (std::sqrt(gn2) <= opt.stationarity) {
      out.converged = true;
      break;
    }
    step = std::min(1.0, 2.0 * step);
    bool accepted = false;
    while (step > 1e-18) {
      const Eigen::VectorXd trial = (c - step * pg).normalized();
      Eigen::VectorXd tg;
      const double tf = obj.value(trial, &tg);
      if (tf <= f - 1e-4 * step * gn2) {
        c = trial;
        f = tf;
        g = std::move(tg);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no descent left at rounding level
  }
  out.point = std::move(c);
  out.value = f;
  return out;
}

}  // namespace

ConstantEstimate estimate_constant(HarmonicSystemPtr system, int degree_budget, const OptimizerOptions& options) {
  if (degree_budget < 1) throw std::invalid_argument("degree budget must be at least 1");
  if (options.restarts < 1) throw std::invalid_argument("at least one restart is required");
  const int d = system->dimension();

  // Basis of H_1 ⊕ ... ⊕ H_N in degree order; level n occupies the first offsets[n] slots.
  std::vector<const Polynomial*> elements;
  std::vector<Eigen::Index> offsets{0};
  std::vector<double> eig;
  for (int n = 1; n <= degree_budget; ++n) {
    for (const auto& y : system->basis(n).elements) {
      elements.push_back(&y);
      eig.push_back(system->eigenvalue(n));
    }
    offsets.push_back(static_cast<Eigen::Index>(elements.size()));
  }
  const auto total = static_cast<Eigen::Index>(elements.size());

  ProductObjective obj;
  obj.eigen = Eigen::Map<const Eigen::VectorXd>(eig.data(), total);
  const auto rows = parallel_map(static_cast<std::size_t>(total), [&](std::size_t a) {
    Eigen::MatrixXd row(d, total);
    for (Eigen::Index b = 0; b < total; ++b) {
      const Polynomial prod = *elements[a] * *elements[b];
      for (int i = 0; i < d; ++i) row(i, b) = system->integrator().integrate(coordinate(d, i) * prod);
    }
    return row;
  });
  obj.moments.assign(d, Eigen::MatrixXd(total, total));
  for (Eigen::Index a = 0; a < total; ++a)
    for (int i = 0; i < d; ++i) obj.moments[i].row(a) = rows[a].row(i);
  for (auto& mi : obj.moments) mi = 0.5 * (mi + mi.transpose()).eval();

  ConstantEstimate out;
  Eigen::VectorXd best_point;
  double best = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= degree_budget; ++n) {
    const Eigen::Index dim = offsets[n];
    const bool warm = best_point.size() > 0;
    const std::size_t starts = static_cast<std::size_t>(options.restarts) + (warm ? 1 : 0);
    const auto results = parallel_map(starts, [&](std::size_t s) {
      Eigen::VectorXd c;
      if (warm && s == 0) {
        c = Eigen::VectorXd::Zero(dim);
        c.head(best_point.size()) = best_point;
      } else {
        std::seed_seq seq{static_cast<std::uint64_t>(options.seed), static_cast<std::uint64_t>(n),
                          static_cast<std::uint64_t>(s)};
        std::mt19937_64 rng(seq);
        c = random_sphere_point(static_cast<int>(dim), rng);
      }
      return descend(obj, std::move(c), options);
    });
    std::size_t arg = 0;
    for (std::size_t s = 1; s < results.size(); ++s)
      if (results[s].value < results[arg].value) arg = s;
    if (results[arg].value < best) {
      best = results[arg].value;
      best_point = results[arg].point;
      out.converged = results[arg].converged;
    } else if (best_point.size() < dim) {
      // The previous optimum stays feasible at this level.
      Eigen::VectorXd padded = Eigen::VectorXd::Zero(dim);
      padded.head(best_point.size()) = best_point;
      best_point = std::move(padded);
    }
    out.by_budget.push_back(best);
  }

  out.value = best;
  std::vector<Eigen::VectorXd> comps{Eigen::VectorXd::Zero(1)};
  for (int n = 1; n <= degree_budget; ++n) comps.push_back(best_point.segment(offsets[n - 1], offsets[n] - offsets[n - 1]));
  out.witness = SphereFunction(system, std::move(comps));

  const double kt = system->kappa().total();
  const ProofSideBound rigorous = best_proof_side_constant(d, kt, false);
  out.proof_side = rigorous.value;
  out.proof_side_epsilon = rigorous.epsilon;
  out.proof_side_sqrt2 = best_proof_side_constant(d, kt, true).value;
  return out;
}

}  // namespace dunkl
