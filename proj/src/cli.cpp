#include "dunkl/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "dunkl/parallel.hpp"
#include "dunkl/polynomial_io.hpp"
#include "dunkl/test_family.hpp"
#include "dunkl/transfer.hpp"

namespace dunkl::cli {

namespace {

using json = nlohmann::ordered_json;

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

Check make_check(std::string tag, std::string sample, std::string metric, double value, std::string relation,
                 double bound) {
  bool pass = false;
  if (relation == "<=") pass = value <= bound;
  if (relation == ">=") pass = value >= bound;
  if (relation == ">") pass = value > bound;
  return {std::move(tag), std::move(sample), std::move(metric), value, std::move(relation), bound, pass};
}

// format_polynomial puts one term per line.
std::string inline_polynomial(const Polynomial& p) {
  std::string s = format_polynomial(p);
  while (!s.empty() && s.back() == '\n') s.pop_back();
  std::string out;
  for (char ch : s) {
    if (ch == '\n') {
      out += " + ";
    } else {
      out += ch;
    }
  }
  return out;
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

// Setup shared by the commands.
struct Context {
  RootSystem roots;
  Multiplicity kappa;
  std::vector<double> kappa_orbits;
  IntegrationOptions integration;
};

void validate(const RunConfig& c) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) throw ConfigError(std::string(what) + " must be positive");
  };
  positive(c.tolerance, "--tol");
  positive(c.localization_tolerance, "--tol-localization");
  positive(c.integration_tolerance, "--tol-integration");
  positive(c.sigma, "--sigma");
  if (c.dimension < 1) throw ConfigError("--dim must be at least 1");
  if (c.degree < 1) throw ConfigError("--degree must be at least 1");
  if (c.samples < 0) throw ConfigError("--samples must be non-negative");
  for (double k : c.kappa)
    if (!(k >= 0.0)) throw ConfigError("multiplicities must be non-negative, got " + std::to_string(k));
  if (c.restarts < 1) throw ConfigError("--restarts must be at least 1");
  for (double e : c.epsilon)
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("--epsilon values must lie in (0, 1)");
  if (!(c.mu >= 0.0)) throw ConfigError("--mu must be non-negative");
  for (double k : c.simplex_kappa)
    if (!(k >= 0.0)) throw ConfigError("simplex parameters must be non-negative");
  for (double k : c.simplex_b)
    if (!(k >= 0.0)) throw ConfigError("simplex parameters must be non-negative");
  if (c.product_samples < 0) throw ConfigError("--product-samples must be non-negative");
  if (c.probes < 1) throw ConfigError("--probes must be at least 1");
  if (c.mc_samples < 2) throw ConfigError("--mc-samples must be at least 2");
}

Context make_context(const RunConfig& c) {
  std::string name = c.group;
  int order = c.dihedral_order;
  if (const auto pos = name.find_first_of("(:"); pos != std::string::npos) {
    std::string digits;
    for (char ch : name.substr(pos + 1))
      if (std::isdigit(static_cast<unsigned char>(ch))) digits += ch;
    if (digits.empty()) throw ConfigError("cannot read the dihedral order from '" + name + "'");
    order = std::stoi(digits);
    name = name.substr(0, pos);
  }
  auto build = [&] {
    try {
      return Context{RootSystem::build(parse_root_family(name), c.dimension, order), {}, {},
                     {.mode = parse_integration_mode(c.integration)}};
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  };
  Context ctx = build();
  const int orbits = ctx.roots.orbit_count();
  if (orbits > 0) {
    if (c.kappa.size() == 1) {
      ctx.kappa_orbits.assign(orbits, c.kappa[0]);
    } else if (static_cast<int>(c.kappa.size()) == orbits) {
      ctx.kappa_orbits = c.kappa;
    } else {
      throw ConfigError("--kappa needs 1 or " + std::to_string(orbits) + " values for this group");
    }
  }
  ctx.kappa = Multiplicity::from_orbits(ctx.roots, ctx.kappa_orbits);
  return ctx;
}

HarmonicSystemPtr make_system(const Context& ctx) {
  try {
    return HarmonicSystem::create(ctx.roots, ctx.kappa, ctx.integration);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

json config_json(const RunConfig& c, const Context& ctx) {
  json j;
  j["group"] = to_string(ctx.roots.family());
  if (ctx.roots.family() == RootFamily::Dihedral) j["dihedral_order"] = ctx.roots.dihedral_order();
  j["dimension"] = c.dimension;
  j["kappa"] = ctx.kappa_orbits;
  j["kappa_total"] = ctx.kappa.total();
  j["lambda"] = lambda_kappa(ctx.roots, ctx.kappa);
  j["degree"] = c.degree;
  j["integration"] = c.integration;
  j["seed"] = c.seed;
  j["samples"] = c.samples;
  j["tolerances"] = {{"identity", c.tolerance},
                     {"localization", c.localization_tolerance},
                     {"integration", c.integration_tolerance},
                     {"monte_carlo_sigma", c.sigma}};
  return j;
}

std::vector<TestFunction> family_for(const RunConfig& c, const Context& ctx) {
  return generate_test_family(ctx.roots, {.degree_budget = c.degree, .seed = c.seed, .random_count = c.samples});
}

void append(std::vector<Check>& into, std::vector<std::vector<Check>> parts) {
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(into));
}

// Commands ------------------------------------------------------------------

Report run_verify(const RunConfig& c, const Context& ctx) {
  const auto system = make_system(ctx);
  const auto family = family_for(c, ctx);
  const int d = c.dimension;
  struct Row {
    std::vector<Check> checks;
    double decomposition = 0, lemma = 0, gradient = 0;
  };
  const auto rows = parallel_map(family.size(), [&](std::size_t k) {
    const auto& t = family[k];
    Row row;
    auto& out = row.checks;
    const auto dec = verify_decomposition(system, t.polynomial);
    out.push_back(make_check("decomposition", t.label, "residual", dec.residual, "<=", c.tolerance));
    std::mt19937_64 rng(derive_seed(c.seed, 1, k));
    const Eigen::VectorXd y = random_sphere_point(d, rng);
    const auto lem = verify_lemma_identity(*system, t.polynomial, y);
    out.push_back(make_check("lemma-identity", t.label, "residual", lem.residual, "<=", c.tolerance));
    const auto grad = verify_gradient_identity(system, t.polynomial);
    out.push_back(make_check("gradient-identity", t.label, "residual", grad.residual, "<=", c.tolerance));
    out.push_back(make_check("radial-reflection-form", t.label, "residual", grad.radial_residual, "<=", c.tolerance));
    out.push_back(make_check("radial-sign", t.label, "value", grad.radial_direct, ">=", -1e-10));
    out.push_back(make_check("gradient-inequality", t.label, "norm-ratio-excess",
                             std::sqrt(std::max(grad.dirichlet, 0.0)) -
                                 std::sqrt(std::max(grad.gradient_norm_squared, 0.0)) * (1 + 1e-10),
                             "<=", 0.0));
    if (t.exact) {
      const bool zero = radial_rotation(*t.exact).is_zero();
      out.push_back(make_check("rotation-radial-zero", t.label, "exact-zero", zero ? 1.0 : 0.0, ">=", 1.0));
    }
    row.decomposition = dec.residual;
    row.lemma = lem.residual;
    row.gradient = grad.residual;
    return row;
  });
  Report r;
  r.command = "verify";
  double dmax = 0, lmax = 0, gmax = 0;
  for (const auto& row : rows) {
    r.checks.insert(r.checks.end(), row.checks.begin(), row.checks.end());
    dmax = std::max(dmax, row.decomposition);
    lmax = std::max(lmax, row.lemma);
    gmax = std::max(gmax, row.gradient);
  }
  r.results = {{"samples", family.size()},
               {"max_residual", {{"decomposition", dmax}, {"lemma-identity", lmax}, {"gradient-identity", gmax}}}};
  return r;
}

Report run_spectrum(const RunConfig& c, const Context& ctx) {
  const auto system = make_system(ctx);
  Report r;
  r.command = "spectrum";
  json table = json::array();
  for (int n = 0; n <= c.degree; ++n) {
    const HarmonicBasis& basis = system->basis(n);
    const std::string label = "H" + std::to_string(n);
    r.checks.push_back(make_check("harmonic-dimension", label, "count-difference",
                                  std::abs(static_cast<double>(basis.elements.size()) -
                                           static_cast<double>(harmonic_dimension(c.dimension, n))),
                                  "<=", 0.0));
    r.checks.push_back(make_check("orthonormality", label, "max-error", basis.orthonormality_error, "<=", c.tolerance));
    const auto residuals = parallel_map(basis.elements.size(), [&](std::size_t k) {
      const Polynomial& y = basis.elements[k];
      return system->integrator().norm(sphere_laplacian_polynomial(system->operators(), y) + system->eigenvalue(n) * y);
    });
    double worst = 0.0;
    for (std::size_t k = 0; k < residuals.size(); ++k) {
      r.checks.push_back(make_check("eigenvalue-law", label + "[" + std::to_string(k) + "]", "residual", residuals[k],
                                    "<=", c.tolerance));
      worst = std::max(worst, residuals[k]);
    }
    table.push_back({{"degree", n},
                     {"dimension", basis.elements.size()},
                     {"eigenvalue", system->eigenvalue(n)},
                     {"max_residual", worst},
                     {"gram_condition", basis.gram_condition}});
  }
  r.results = {{"lambda", system->lambda()}, {"spectrum", table}};
  return r;
}

Report run_uncertainty(const RunConfig& c, const Context& ctx) {
  const auto system = make_system(ctx);
  const auto family = family_for(c, ctx);
  struct Row {
    std::vector<Check> checks;
    json entry;
  };
  const auto rows = parallel_map(family.size(), [&](std::size_t k) {
    const auto& t = family[k];
    Row row;
    SphereFunction f;
    try {
      f = normalize_admissible(system, t.polynomial);
    } catch (const std::domain_error&) {
      row.entry = {{"sample", t.label}, {"skipped", "constant on the sphere"}};
      return row;
    }
    const UncertaintyReport rep = uncertainty_product(f);
    auto& out = row.checks;
    out.push_back(make_check("uncertainty-positive", t.label, "product", rep.product, ">", 0.0));
    out.push_back(make_check("localization-closed-form", t.label, "difference",
                             std::abs(rep.localization - rep.localization_grid), "<=", c.localization_tolerance));
    out.push_back(make_check("localization-axis", t.label, "global-minus-axis",
                             rep.localization - rep.localization_axis, "<=", 1e-12));
    out.push_back(make_check("product-consistency", t.label, "difference",
                             std::abs(rep.product - rep.localization * rep.dirichlet), "<=",
                             1e-12 * std::max(1.0, rep.product)));
    out.push_back(make_check("decomposition", t.label, "residual", rep.decomposition_residual, "<=", c.tolerance));
    out.push_back(make_check("lemma-identity", t.label, "residual", rep.lemma_residual, "<=", c.tolerance));
    out.push_back(make_check("gradient-identity", t.label, "residual", rep.gradient_residual, "<=", c.tolerance));
    row.entry = {{"sample", t.label},
                 {"degree", t.degree},
                 {"localization", rep.localization},
                 {"localization_grid", rep.localization_grid},
                 {"localization_axis", rep.localization_axis},
                 {"dirichlet", rep.dirichlet},
                 {"product", rep.product}};
    row.entry["minimizer"] = rep.minimizer ? vector_json(*rep.minimizer) : json(nullptr);
    return row;
  });
  Report r;
  r.command = "uncertainty";
  json table = json::array();
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    r.checks.insert(r.checks.end(), row.checks.begin(), row.checks.end());
    if (row.entry.contains("product")) smallest = std::min(smallest, row.entry["product"].get<double>());
    table.push_back(row.entry);
  }
  r.results = {{"smallest_product", std::isfinite(smallest) ? json(smallest) : json(nullptr)}, {"samples", table}};
  return r;
}

Report run_estimate_constant(const RunConfig& c, const Context& ctx) {
  const auto system = make_system(ctx);
  const ConstantEstimate est =
      estimate_constant(system, c.degree, {.restarts = c.restarts, .seed = c.seed});
  Report r;
  r.command = "estimate-constant";
  r.checks.push_back(make_check("constant-positive", "estimate", "value", est.value, ">", 0.0));
  for (std::size_t n = 1; n < est.by_budget.size(); ++n) {
    r.checks.push_back(make_check("budget-monotone", "N=" + std::to_string(n + 1), "increase",
                                  est.by_budget[n] - est.by_budget[n - 1], "<=", 0.0));
  }
  r.checks.push_back(
      make_check("proof-side-consistency", "estimate", "proof-minus-estimate", est.proof_side - est.value, "<=", 0.0));
  const UncertaintyReport witness = uncertainty_product(est.witness, false);
  r.checks.push_back(make_check("witness-product", "estimate", "difference", std::abs(witness.product - est.value),
                                "<=", c.tolerance * std::max(1.0, est.value)));
  r.results = {{"value", est.value},
               {"by_budget", est.by_budget},
               {"converged", est.converged},
               {"restarts", c.restarts},
               {"proof_side", est.proof_side},
               {"proof_side_epsilon", est.proof_side_epsilon},
               {"proof_side_sqrt2_constant", est.proof_side_sqrt2},
               {"witness", inline_polynomial(est.witness.to_polynomial())},
               {"witness_localization", witness.localization},
               {"witness_dirichlet", witness.dirichlet}};
  return r;
}

Report run_proof_bounds(const RunConfig& c, const Context& ctx) {
  const auto system = make_system(ctx);
  const auto family = family_for(c, ctx);
  const int d = c.dimension;
  const double band_tol = system->integrator().weight_is_polynomial() ? c.tolerance : std::max(c.tolerance, 1e-6);
  struct Row {
    std::vector<Check> checks;
    json entries = json::array();
    int sqrt2_violations = 0;
  };
  const auto rows = parallel_map(family.size(), [&](std::size_t k) {
    const auto& t = family[k];
    Row row;
    Polynomial f;
    try {
      f = normalize_admissible(system, t.polynomial).to_polynomial();
    } catch (const std::domain_error&) {
      return row;
    }
    const Localization loc = localization_min(*system, f);
    Eigen::VectorXd y = Eigen::VectorXd::Unit(d, 0);
    if (loc.direction) y = *loc.direction;
    for (double eps : c.epsilon) {
      std::ostringstream label;
      label << t.label << "@eps=" << eps;
      const ProofBoundsReport rep = verify_proof_bounds(*system, f, y, eps);
      auto& out = row.checks;
      out.push_back(make_check("rotation-bound", label.str(), "margin", rep.j1_margin, ">=", -c.tolerance));
      out.push_back(
          make_check("pointwise-cauchy-schwarz", label.str(), "excess", rep.pointwise_excess, "<=", c.tolerance));
      out.push_back(make_check("radial-identity", label.str(), "exact-zero", rep.radial_identity_exact ? 1.0 : 0.0,
                               ">=", 1.0));
      double worst = std::numeric_limits<double>::infinity(), worst_split = worst, worst_sqrt2 = worst;
      for (const auto& rb : rep.roots) {
        worst = std::min(worst, rb.margin);
        worst_split = std::min(worst_split, rb.split_margin);
        worst_sqrt2 = std::min(worst_sqrt2, rb.margin_sqrt2);
        if (rb.margin_sqrt2 < -c.tolerance) ++row.sqrt2_violations;
      }
      if (!rep.roots.empty()) {
        out.push_back(make_check("difference-bound", label.str(), "margin", worst, ">=", -c.tolerance));
        out.push_back(make_check("band-split", label.str(), "margin", worst_split, ">=", -band_tol));
      }
      json e = {{"sample", t.label},
                {"epsilon", eps},
                {"y", vector_json(y)},
                {"localization", rep.localization},
                {"j1", rep.j1},
                {"j1_bound", rep.j1_bound}};
      e["difference_margin"] = rep.roots.empty() ? json(nullptr) : json(worst);
      e["difference_margin_sqrt2_constant"] = rep.roots.empty() ? json(nullptr) : json(worst_sqrt2);
      row.entries.push_back(e);
    }
    return row;
  });
  Report r;
  r.command = "proof-bounds";
  json table = json::array();
  int sqrt2_violations = 0;
  for (const auto& row : rows) {
    r.checks.insert(r.checks.end(), row.checks.begin(), row.checks.end());
    for (const auto& e : row.entries) table.push_back(e);
    sqrt2_violations += row.sqrt2_violations;
  }
  const double kt = ctx.kappa.total();
  const auto side = best_proof_side_constant(d, kt);
  const auto side_sqrt2 = best_proof_side_constant(d, kt, true);
  r.results = {{"proof_side_constant", side.value},
               {"proof_side_epsilon", side.epsilon},
               {"proof_side_constant_sqrt2", side_sqrt2.value},
               {"sqrt2_constant_violations", sqrt2_violations},
               {"bounds", table}};
  return r;
}

std::vector<double> default_simplex_kappa(int d, double mu) {
  std::vector<double> k;
  for (int i = 0; i < d; ++i) k.push_back(i % 2 == 0 ? 1.0 : 0.5);
  k.push_back(mu);
  return k;
}

Report run_transfer_check(const RunConfig& c, const Context& ctx) {
  const int d = c.dimension;
  Report r;
  r.command = "transfer-check";
  const BallSpace ball(ctx.roots, ctx.kappa, c.mu, ctx.integration);
  const double itol = c.integration_tolerance;
  const int count = std::max(c.samples, 1);
  auto random_poly = [&](std::uint64_t salt, std::size_t k, int degree) {
    return to_floating(random_rational_polynomial(d, degree, derive_seed(c.seed, salt, k)));
  };

  // Dual-path integrals on the ball.
  const auto ball_rows = parallel_map(count, [&](std::size_t k) {
    const Polynomial p = random_poly(10, k, 1 + static_cast<int>(k) % c.degree);
    const double a = ball.integral(p), b = ball.integral_direct(p);
    return make_check("ball-integral", "random-" + std::to_string(k), "relative-difference",
                      std::abs(a - b) / std::max(1.0, std::abs(b)), "<=", itol);
  });
  r.checks.insert(r.checks.end(), ball_rows.begin(), ball_rows.end());

  std::vector<std::pair<std::string, SimplexSpace>> simplices;
  try {
    const auto z2 = c.simplex_kappa.empty() ? default_simplex_kappa(d, c.mu) : c.simplex_kappa;
    simplices.emplace_back("Z2", SimplexSpace(SimplexVariant::Z2, d, z2, ctx.integration));
    if (d >= 2) simplices.emplace_back("B", SimplexSpace(SimplexVariant::B, d, c.simplex_b, ctx.integration));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const int simplex_degree = std::max(1, c.degree / 2);
  for (const auto& [name, s] : simplices) {
    const auto rows = parallel_map(count, [&](std::size_t k) {
      const Polynomial g = random_poly(20, k, 1 + static_cast<int>(k) % simplex_degree);
      const auto direct = s.integral_direct(g);
      const double via_ball = s.integral(g);
      if (!direct) return std::optional<Check>{};
      return std::optional<Check>(make_check("simplex-integral", name + "/random-" + std::to_string(k),
                                             "relative-difference",
                                             std::abs(via_ball - *direct) / std::max(1.0, std::abs(*direct)), "<=",
                                             itol));
    });
    for (const auto& row : rows)
      if (row) r.checks.push_back(*row);
  }

  // Operators: α = 1 on the ball, 4^{-α} on the simplex.
  const int operator_samples = std::min(count, 10);
  const int operator_degree = std::min(c.degree, 4);
  const auto op_rows = parallel_map(operator_samples, [&](std::size_t k) {
    const Polynomial f = ball.normalize(random_poly(30, k, 1 + static_cast<int>(k) % operator_degree));
    const Polynomial diff = ball.fractional_laplacian(f, 1.0) + ball.laplacian_operator(f);
    return make_check("ball-operator", "random-" + std::to_string(k), "residual",
                      std::sqrt(std::max(0.0, ball.norm_squared(diff))), "<=", c.tolerance);
  });
  r.checks.insert(r.checks.end(), op_rows.begin(), op_rows.end());
  for (const auto& [name, s] : simplices) {
    const auto rows = parallel_map(operator_samples, [&](std::size_t k) {
      std::vector<Check> out;
      const Polynomial g = s.normalize(random_poly(40, k, 1 + static_cast<int>(k) % std::min(simplex_degree, 3)));
      for (double alpha : {0.5, 1.0}) {
        const Polynomial intrinsic = s.intrinsic_fractional_laplacian(g, alpha);
        const Polynomial via_ball = s.ball_route(g, alpha);
        const double ratio = s.integral(intrinsic * via_ball) / s.integral(via_ball * via_ball);
        std::ostringstream label;
        label << name << "/random-" << k << "@alpha=" << alpha;
        out.push_back(make_check("simplex-factor", label.str(), "ratio-error", std::abs(ratio - std::pow(4.0, -alpha)),
                                 "<=", c.tolerance));
      }
      return out;
    });
    append(r.checks, rows);
  }

  // Uncertainty products.
  const int product_degree = std::min(c.degree, 3);
  json summary;
  {
    const auto rows = parallel_map(c.product_samples, [&](std::size_t k) {
      const Polynomial f = ball.normalize(random_poly(50, k, 1 + static_cast<int>(k) % product_degree));
      const auto rep = ball_uncertainty_product(ball, f);
      std::vector<Check> out;
      const std::string label = "random-" + std::to_string(k);
      out.push_back(make_check("ball-uncertainty", label, "product", rep.report.product, ">", 0.0));
      out.push_back(make_check("ball-dirichlet", label, "difference",
                               std::abs(rep.report.dirichlet - rep.dirichlet_alternative), "<=", c.tolerance));
      return out;
    });
    append(r.checks, rows);
  }
  for (const auto& [name, s] : simplices) {
    const auto rows = parallel_map(c.product_samples, [&](std::size_t k) {
      const Polynomial g = s.normalize(random_poly(60, k, 1 + static_cast<int>(k) % product_degree));
      const auto rep = simplex_uncertainty_product(s, g);
      std::vector<Check> out;
      const std::string label = name + "/random-" + std::to_string(k);
      out.push_back(make_check("simplex-uncertainty", label, "product", rep.report.product, ">", 0.0));
      out.push_back(make_check("simplex-localization", label, "difference",
                               std::abs(rep.report.localization - rep.report.localization_grid), "<=",
                               c.localization_tolerance));
      out.push_back(make_check("simplex-dirichlet", label, "difference",
                               std::abs(rep.report.dirichlet - rep.dirichlet_alternative), "<=", c.tolerance));
      return out;
    });
    append(r.checks, rows);
    summary[name] = {{"parameters", s.parameters()}, {"lambda", s.lambda()}, {"pullback_factor", s.pullback_factor()}};
  }
  r.results = {{"mu", c.mu}, {"lift_factor", ball.lift_factor()}, {"simplex", summary}};
  return r;
}

Report run_moments(const RunConfig& c, const Context& ctx) {
  const auto system = make_system(ctx);
  const SphereIntegrator& in = system->integrator();
  const int d = c.dimension;
  std::vector<std::pair<std::string, Polynomial>> probes;
  const int monomial_count = (c.probes + 1) / 2;
  for (int n = 0; static_cast<int>(probes.size()) < monomial_count; ++n)
    for (const auto& e : exponents_of_degree(d, n)) {
      if (static_cast<int>(probes.size()) >= monomial_count) break;
      probes.emplace_back(inline_polynomial(Polynomial::monomial(e, 1.0)), Polynomial::monomial(e, 1.0));
    }
  for (int k = 0; static_cast<int>(probes.size()) < c.probes; ++k) {
    probes.emplace_back("random-" + std::to_string(k),
                        to_floating(random_rational_polynomial(d, 1 + k % c.degree, derive_seed(c.seed, 70, k))));
  }
  const bool closed = in.has_closed_form();
  const bool gauss_exact = in.weight_is_polynomial();
  const auto rows = parallel_map(probes.size(), [&](std::size_t k) {
    const auto& [label, p] = probes[k];
    const double adaptive = in.integrate_adaptive(p).value[0];
    const double reference = closed ? in.integrate_closed_form(p) : adaptive;
    const double scale = std::max(1.0, std::abs(reference));
    std::vector<Check> out;
    if (gauss_exact) {
      out.push_back(make_check("moment-gauss", label, "relative-difference",
                               std::abs(in.integrate_gauss(p) - reference) / scale, "<=", c.integration_tolerance));
    }
    if (closed) {
      out.push_back(make_check("moment-adaptive", label, "relative-difference", std::abs(adaptive - reference) / scale,
                               "<=", c.integration_tolerance));
    }
    const auto mc = in.integrate_monte_carlo(p, c.mc_samples, derive_seed(c.seed, 80, k));
    // Constant integrands have zero sample variance; allow rounding.
    out.push_back(make_check("moment-monte-carlo", label, "standard-errors",
                             std::abs(mc.mean - reference) / std::max(mc.standard_error, 1e-15 * scale), "<=",
                             c.sigma));
    return out;
  });
  Report r;
  r.command = "moments";
  append(r.checks, rows);
  r.results = {{"backend", to_string(in.mode())},
               {"closed_form", closed},
               {"weight_is_polynomial", gauss_exact},
               {"normalization", in.normalization_constant()},
               {"probes", probes.size()},
               {"monte_carlo_samples", c.mc_samples}};
  return r;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::size_t Report::failures() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.pass; }));
}

nlohmann::ordered_json Report::to_json() const {
  json j;
  j["command"] = command;
  j["config"] = config;
  json list = json::array();
  for (const auto& c : checks) {
    list.push_back({{"tag", c.tag},
                    {"sample", c.sample},
                    {"metric", c.metric},
                    {"value", c.value},
                    {"relation", c.relation},
                    {"bound", c.bound},
                    {"pass", c.pass}});
  }
  j["checks"] = list;
  j["results"] = results;
  j["summary"] = {{"checks", checks.size()}, {"failed", failures()}, {"pass", passed()}};
  return j;
}

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"verify",         "spectrum",       "uncertainty", "estimate-constant",
                                              "proof-bounds",   "transfer-check", "moments"};
  return names;
}

Report run(const RunConfig& config) {
  validate(config);
  const Context ctx = make_context(config);
  Report r;
  const std::string& cmd = config.command;
  if (cmd == "verify") {
    r = run_verify(config, ctx);
  } else if (cmd == "spectrum") {
    r = run_spectrum(config, ctx);
  } else if (cmd == "uncertainty") {
    r = run_uncertainty(config, ctx);
  } else if (cmd == "estimate-constant") {
    r = run_estimate_constant(config, ctx);
  } else if (cmd == "proof-bounds") {
    r = run_proof_bounds(config, ctx);
  } else if (cmd == "transfer-check") {
    r = run_transfer_check(config, ctx);
  } else if (cmd == "moments") {
    r = run_moments(config, ctx);
  } else {
    throw ConfigError("unknown command '" + cmd + "'");
  }
  r.config = config_json(config, ctx);
  if (cmd == "proof-bounds") r.config["epsilon"] = config.epsilon;
  if (cmd == "estimate-constant") r.config["restarts"] = config.restarts;
  if (cmd == "transfer-check") {
    r.config["mu"] = config.mu;
    r.config["product_samples"] = config.product_samples;
  }
  if (cmd == "moments") {
    r.config["probes"] = config.probes;
    r.config["mc_samples"] = config.mc_samples;
  }
  return r;
}

std::string render(const Report& report, OutputFormat format) {
  if (format == OutputFormat::Json) return report.to_json().dump(2) + "\n";
  std::ostringstream os;
  os << "command,tag,sample,metric,value,relation,bound,pass\n";
  for (const auto& c : report.checks) {
    os << report.command << ',' << csv_escape(c.tag) << ',' << csv_escape(c.sample) << ',' << c.metric << ','
       << format_double(c.value) << ',' << c.relation << ',' << format_double(c.bound) << ','
       << (c.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dunkl h-harmonic analysis: identities, uncertainty products and transfers"};
  app.set_config("--config", "", "INI file with flat keys; [command] sections hold command options");
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  std::string format = "json";

  app.add_option("--group", cfg.group, "trivial, Z2, A, B or I2(m)")->capture_default_str();
  app.add_option("--order", cfg.dihedral_order, "dihedral order m for I2(m)");
  app.add_option("--kappa", cfg.kappa, "multiplicity per orbit (comma-separated)")->delimiter(',');
  app.add_option("--dim", cfg.dimension, "ambient dimension d")->capture_default_str();
  app.add_option("--degree", cfg.degree, "degree budget")->capture_default_str();
  app.add_option("--integration", cfg.integration, "automatic, exact, polynomial-weight, gauss or adaptive")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  app.add_option("--samples", cfg.samples, "random samples besides the canonical set")->capture_default_str();
  app.add_option("--tol", cfg.tolerance, "identity and margin tolerance")->capture_default_str();
  app.add_option("--tol-localization", cfg.localization_tolerance, "localization search tolerance")
      ->capture_default_str();
  app.add_option("--tol-integration", cfg.integration_tolerance, "integration tolerance")->capture_default_str();
  app.add_option("--sigma", cfg.sigma, "Monte-Carlo standard errors")->capture_default_str();
  app.add_option("--out", cfg.out, "report file, - for standard output")->capture_default_str();
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  std::map<std::string, CLI::App*> subs;
  for (const auto& name : commands()) subs[name] = app.add_subcommand(name);
  subs["verify"]->description("decomposition, lemma and gradient identities on a test family");
  subs["spectrum"]->description("h-harmonic bases and the eigenvalue law up to the degree budget");
  subs["uncertainty"]->description("uncertainty products on a test family");
  subs["estimate-constant"]->description("numerical estimate of the best constant");
  subs["proof-bounds"]->description("the two bounds behind the uncertainty inequality");
  subs["transfer-check"]->description("ball and simplex transfer identities and products");
  subs["moments"]->description("agreement of the integration backends");

  bool sweep = false;
  subs["proof-bounds"]->add_option("--epsilon", cfg.epsilon, "split parameters in (0,1)")->delimiter(',');
  subs["proof-bounds"]->add_flag("--sweep", sweep, "use epsilon = 0.1, 0.3, 0.5, 0.7, 0.9");
  subs["estimate-constant"]->add_option("--restarts", cfg.restarts, "random restarts")->capture_default_str();
  auto* transfer = subs["transfer-check"];
  transfer->add_option("--mu", cfg.mu, "ball parameter")->capture_default_str();
  transfer->add_option("--simplex-kappa", cfg.simplex_kappa, "Z2 simplex parameters (d+1 values)")->delimiter(',');
  transfer->add_option("--simplex-b", cfg.simplex_b, "B simplex parameters kappa', kappa, mu")->delimiter(',');
  transfer->add_option("--product-samples", cfg.product_samples, "samples per weight")->capture_default_str();
  subs["moments"]->add_option("--probes", cfg.probes, "probe count")->capture_default_str();
  subs["moments"]->add_option("--mc-samples", cfg.mc_samples, "Monte-Carlo points")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) cfg.command = name;
  if (sweep) cfg.epsilon = {0.1, 0.3, 0.5, 0.7, 0.9};
  cfg.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;

  Report report;
  try {
    report = run(cfg);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  const std::string text = render(report, cfg.format);
  if (cfg.out == "-") {
    out << text;
  } else {
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) {
      err << "configuration error: cannot write " << cfg.out << '\n';
      return 2;
    }
    file << text;
    out << report.command << ": " << report.checks.size() << " checks, " << report.failures() << " failed\n";
  }
  if (!report.passed()) {
    err << report.command << ": " << report.failures() << " of " << report.checks.size() << " checks failed\n";
    std::size_t shown = 0;
    for (const auto& c : report.checks)
      if (!c.pass && shown++ < 20) {
        err << "  " << c.tag << " " << c.sample << ": " << c.metric << " = " << format_double(c.value) << " (needs "
            << c.relation << " " << format_double(c.bound) << ")\n";
      }
    return 1;
  }
  return 0;
}

}  // namespace dunkl::cli
