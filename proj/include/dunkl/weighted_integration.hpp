#pragma once

// Integration against h_κ²(x) dσ(x) on S^{d-1}.
//
// Three backends are available and can be cross-checked against each other:
//  * closed form: the weight is split into coordinate-axis factors |x_i|^{2κ}
//    (any κ ≥ 0) times the remaining factors ⟨x,v⟩^{2κ_v}, which must be
//    polynomial (integer κ_v). Monomial moments then reduce to Gamma ratios.
//    For Z2^d this is the "exact-moments" mode; otherwise "polynomial-weight".
//  * Gauss: product rule in spherical coordinates, exact for polynomial weights.
//  * adaptive: nested adaptive Gauss–Legendre split along the weight's
//    singular hyperplanes; works for every κ.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include <Eigen/Dense>

#include "dunkl/polynomial.hpp"
#include "dunkl/quadrature.hpp"
#include "dunkl/root_system.hpp"

namespace dunkl {

enum class IntegrationMode {
  Automatic,
  ExactMoments,           // Z2^d (or trivial) only
  PolynomialWeightExact,  // closed form with a polynomial off-axis factor
  Gauss,
  Adaptive,
};

std::string to_string(IntegrationMode mode);
IntegrationMode parse_integration_mode(std::string_view name);

struct IntegrationOptions {
  IntegrationMode mode = IntegrationMode::Automatic;
  double adaptive_tolerance = 1e-12;
  // Extra product-rule degree used by the Gauss backend when h_κ² is not a polynomial.
  int gauss_extra_degree = 64;
};

class SphereIntegrator {
 public:
  SphereIntegrator(RootSystem roots, Multiplicity kappa, IntegrationOptions options = {});

  const RootSystem& roots() const noexcept { return roots_; }
  const Multiplicity& kappa() const noexcept { return kappa_; }
  int dimension() const noexcept { return roots_.dimension(); }
  IntegrationMode mode() const noexcept { return mode_; }
  const IntegrationOptions& options() const noexcept { return options_; }

  /// True when h_κ² is a polynomial (every κ_v an integer).
  bool weight_is_polynomial() const noexcept { return weight_polynomial_; }
  /// True when the closed-form moment backend applies.
  bool has_closed_form() const noexcept { return closed_form_; }

  /// ∫ x^α h_κ²(x) dσ(x), cached.
  double moment(const Exponent& alpha) const;
  /// ∫ x^α |x_i| h_κ²(x) dσ(x).
  double abs_moment(const Exponent& alpha, int abs_coordinate) const;

  double integrate(const Polynomial& p) const;
  double inner_product(const Polynomial& f, const Polynomial& g) const;
  /// ‖f‖²_κ summed pointwise (quadrature of f² h_κ²) rather than from moments,
  /// so small residual norms do not drown in cancellation.
  double norm_squared(const Polynomial& f) const;
  double norm(const Polynomial& f) const;

  /// ω_d^κ = ∫ h_κ² dσ.
  double normalization_constant() const;

  // Individual backends, independent of mode().
  double integrate_closed_form(const Polynomial& p) const;
  double integrate_gauss(const Polynomial& p) const;
  AdaptiveResult integrate_adaptive(const Polynomial& p) const;
  MonteCarloResult integrate_monte_carlo(const Polynomial& p, std::int64_t samples, std::uint64_t seed) const;

  /// Product rule with h_κ² folded into the weights; exact for polynomial
  /// integrands of degree ≤ `degree` when the weight is polynomial.
  const SphereRule& weighted_rule(int degree) const;

  /// Largest discrepancy between the active backend and an independent one
  /// over monomials of degree ≤ max_degree (cheap for exact modes).
  double cross_validate(int max_degree) const;

  /// Conservative accuracy of values returned by moment()/integrate().
  double accuracy_estimate() const;

  /// Hyperplanes where h_κ² fails to be smooth (roots with non-integer κ).
  std::vector<Eigen::VectorXd> singular_hyperplanes() const;

 private:
  double closed_form_moment(const Exponent& alpha, int abs_coordinate) const;
  double numeric_moment(const Exponent& alpha, int abs_coordinate) const;
  void fill_numeric_degree(int degree, int abs_coordinate) const;

  RootSystem roots_;
  Multiplicity kappa_;
  IntegrationOptions options_;
  IntegrationMode mode_;
  bool weight_polynomial_ = true;
  bool closed_form_ = true;
  int weight_degree_ = 0;  // total degree of h_κ² (rounded up)

  // Closed-form data: Π c_i |x_i|^{b_i} × rest.
  std::vector<double> axis_exponent_;
  double axis_factor_ = 1.0;
  Polynomial rest_;

  mutable std::mutex mutex_;
  mutable std::unordered_map<Exponent, double, ExponentHash> moments_;
  mutable std::map<std::pair<int, int>, std::unordered_map<Exponent, double, ExponentHash>> abs_moments_;
  mutable std::map<int, std::unique_ptr<SphereRule>> rules_;
  mutable double adaptive_error_ = 0.0;
};

/// ∫_{S^{d-1}} Π x_i^{e_i} |x_i|^{b_i} dσ for integer e_i ≥ 0 and real b_i ≥ 0.
double sphere_monomial_integral(const Exponent& e, std::span<const double> b);

}  // namespace dunkl
