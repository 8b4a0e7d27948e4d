#pragma once

// Weighted analysis on the unit ball B^d and the simplex T^d, transported
// from the sphere S^d.
//
// Ball: a function f on B^d lifts to f̃(x, x_{d+1}) = f(x) on S^d, which
// carries the weight |x_{d+1}|^{2μ} h_κ²(x). Integrals satisfy
//   ∫_{S^d} f̃ h̃² dσ = 2 ∫_{B^d} f W^B dx,  W^B = h_κ²(x)(1-‖x‖²)^{μ-1/2}
// (the roots are normalized to ⟨v,v⟩ = 2, so h̃² carries an extra 2^μ), and
// the ball operators are defined by (-Δ^B)^α f = ((-Δ_{κ̃,0})^α f̃)|_{B^d}.
//
// Simplex: g on T^d pulls back to g∘ψ, ψ(x) = (x_1², ..., x_d²), and
//   ∫_{B^d} (g∘ψ) W^B dx = c ∫_{T^d} g W^T dz,  ((-Δ^T)^α g)∘ψ = 4^{-α} (-Δ^B)^α (g∘ψ).

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dunkl/uncertainty.hpp"

namespace dunkl {

class BallSpace {
 public:
  BallSpace(const RootSystem& roots, const Multiplicity& kappa, double mu, IntegrationOptions options = {});

  int dimension() const noexcept { return base_.dimension(); }
  double mu() const noexcept { return mu_; }
  const RootSystem& roots() const noexcept { return base_; }
  const Multiplicity& kappa() const noexcept { return kappa_; }
  /// The h-harmonic system on S^d for the lifted weight.
  const HarmonicSystemPtr& sphere() const noexcept { return sphere_; }

  /// W^B(x).
  double weight(const Eigen::VectorXd& x) const;

  /// f̃(x, x_{d+1}) = f(x).
  Polynomial lift(const Polynomial& f) const;
  /// Restriction of an even function on S^d to B^d: x_{d+1}^{2k} → (1-‖x‖²)^k.
  /// Throws std::domain_error if F has a non-negligible odd part in x_{d+1}.
  Polynomial push_down(const Polynomial& lifted) const;

  /// ∫_{S^d} f̃ h̃² dσ / ∫_{B^d} f W^B dx.
  double lift_factor() const noexcept { return lift_factor_; }

  /// ∫_{B^d} f W^B dx through the sphere.
  double integral(const Polynomial& f) const;
  /// The same integral in polar coordinates on B^d: Beta-function radial
  /// factors times h_κ²-integrals over S^{d-1}.
  double integral_direct(const Polynomial& f) const;
  double norm_squared(const Polynomial& f) const;

  /// (-Δ^B_{κ,μ})^α f through the spectral decomposition of the lift.
  Polynomial fractional_laplacian(const Polynomial& f, double alpha) const;
  /// Δ^B f from the operator formula for Δ_{κ̃,0} applied to the lift.
  Polynomial laplacian_operator(const Polynomial& f) const;

  /// Mean zero and unit norm with respect to W^B. Throws std::domain_error for constants.
  Polynomial normalize(const Polynomial& f) const;

 private:
  RootSystem base_;
  Multiplicity kappa_;
  double mu_;
  double lift_factor_;
  HarmonicSystemPtr sphere_;
  std::shared_ptr<const SphereIntegrator> base_integrator_;
};

enum class SimplexVariant {
  Z2,  // Π z_i^{κ_i-1/2} (1-|z|)^{κ_{d+1}-1/2}
  B,   // Π z_i^{κ'-1/2} Π_{i<j} |z_i-z_j|^κ (1-|z|)^{μ-1/2}
};

std::string to_string(SimplexVariant variant);
SimplexVariant parse_simplex_variant(std::string_view name);

class SimplexSpace {
 public:
  /// Z2: parameters κ_1, ..., κ_{d+1}. B: parameters κ', κ, μ (d ≥ 2).
  SimplexSpace(SimplexVariant variant, int dimension, std::vector<double> parameters, IntegrationOptions options = {});

  SimplexVariant variant() const noexcept { return variant_; }
  int dimension() const noexcept { return dimension_; }
  const std::vector<double>& parameters() const noexcept { return parameters_; }
  const BallSpace& ball() const noexcept { return *ball_; }

  /// W^T(z).
  double weight(const Eigen::VectorXd& z) const;
  /// λ with (-Δ^T) acting on orthogonal polynomials of degree n as n(n + λ).
  double lambda() const noexcept { return lambda_; }

  /// g∘ψ.
  Polynomial pull_back(const Polynomial& g) const;
  /// Inverse of pull_back for functions even in every coordinate.
  Polynomial push_forward(const Polynomial& even) const;

  /// ∫_{B^d} (g∘ψ) W^B dx / ∫_{T^d} g W^T dz.
  double pullback_factor() const noexcept { return pullback_factor_; }

  /// ∫_{T^d} g W^T dz through the ball and the sphere.
  double integral(const Polynomial& g) const;
  /// Dirichlet-integral closed form; empty for the B variant unless κ is an
  /// even integer.
  std::optional<double> integral_direct(const Polynomial& g) const;
  double norm_squared(const Polynomial& g) const;

  /// (-Δ^T)^α g = 4^{-α} (-Δ^B)^α (g∘ψ), pushed forward.
  Polynomial fractional_laplacian(const Polynomial& g, double alpha) const;
  /// (-Δ^B)^α (g∘ψ) pushed forward, without the 4^{-α} factor.
  Polynomial ball_route(const Polynomial& g, double alpha) const;
  /// (n(n+λ))^α on an orthonormal basis of the simplex polynomials of each
  /// degree, built from W^T moments.
  Polynomial intrinsic_fractional_laplacian(const Polynomial& g, double alpha) const;

  Polynomial normalize(const Polynomial& g) const;

 private:
  double inner(const Polynomial& a, const Polynomial& b) const;

  SimplexVariant variant_;
  int dimension_;
  std::vector<double> parameters_;
  double pullback_factor_ = 1.0;
  double lambda_ = 0.0;
  std::unique_ptr<BallSpace> ball_;
};

/// 1 - ⟨ψ^{-1}(x), ψ^{-1}(y)⟩.
double simplex_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Uncertainty products; f (resp. g) must be normalized for the space.
/// `dirichlet_alternative` holds the Dirichlet term computed by a second
/// route (operator formula on the ball, intrinsic basis on the simplex).
struct TransferReport {
  UncertaintyReport report;
  double dirichlet_alternative = 0.0;
};
TransferReport ball_uncertainty_product(const BallSpace& ball, const Polynomial& f);
TransferReport simplex_uncertainty_product(const SimplexSpace& simplex, const Polynomial& g);

/// min over y ∈ T^d of mass - Σ a_i √y_i by grid search and local refinement.
Localization simplex_localization_search(const Eigen::VectorXd& abs_moments, double mass = 1.0);

}  // namespace dunkl
