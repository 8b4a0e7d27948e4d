#pragma once

// Spherical h-harmonics: orthonormal bases of H_n^d(h_κ²), h-harmonic
// expansions of polynomials, and spectral functions of Δ_{κ,0}.

#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include <Eigen/Dense>

#include "dunkl/dunkl_operators.hpp"
#include "dunkl/polynomial.hpp"
#include "dunkl/root_system.hpp"
#include "dunkl/weighted_integration.hpp"

namespace dunkl {

/// Orthonormal basis of H_n, as homogeneous polynomials of degree n.
struct HarmonicBasis {
  int degree = 0;
  std::vector<Polynomial> elements;
  // Coefficients of each element over exponents_of_degree(d, n) (columns).
  Eigen::MatrixXd coefficients;
  double gram_condition = 1.0;      // of the monomial Gram matrix in degree n
  double orthonormality_error = 0;  // max |⟨Y_i,Y_j⟩ - δ_ij|
  double smallest_pivot = 1.0;      // relative norm of the last accepted Gram-Schmidt vector
};

/// dim H_n^d = C(n+d-1, d-1) - C(n+d-3, d-1).
long long harmonic_dimension(int dimension, int n);

/// Lazily built, cached bases for one (G, κ).
class HarmonicSystem {
 public:
  static constexpr double kMaxGramCondition = 1e15;

  HarmonicSystem(std::shared_ptr<const SphereIntegrator> integrator, std::shared_ptr<const OperatorContext> operators);

  static std::shared_ptr<HarmonicSystem> create(const RootSystem& roots, const Multiplicity& kappa,
                                                IntegrationOptions options = {});

  int dimension() const noexcept { return integrator_->dimension(); }
  double lambda() const noexcept { return operators_->lambda(); }
  const SphereIntegrator& integrator() const noexcept { return *integrator_; }
  const OperatorContext& operators() const noexcept { return *operators_; }
  const RootSystem& roots() const noexcept { return integrator_->roots(); }
  const Multiplicity& kappa() const noexcept { return integrator_->kappa(); }

  /// n(n + 2λ_κ); Δ_{κ,0} acts on H_n as multiplication by its negative.
  double eigenvalue(int n) const { return n * (n + 2.0 * lambda()); }

  /// Throws std::runtime_error when the Gram matrix is too ill-conditioned.
  const HarmonicBasis& basis(int n) const;

  /// P_n(x, y) = Σ_i Y_i(x) Y_i(y).
  double reproducing_kernel(int n, const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

 private:
  HarmonicBasis build(int n) const;

  std::shared_ptr<const SphereIntegrator> integrator_;
  std::shared_ptr<const OperatorContext> operators_;
  mutable std::recursive_mutex mutex_;
  mutable std::vector<std::unique_ptr<HarmonicBasis>> bases_;
};

/// A function on S^{d-1} stored through its h-harmonic components
/// proj_0 f, ..., proj_N f (coefficient vectors over the orthonormal bases).
class SphereFunction {
 public:
  SphereFunction() = default;
  SphereFunction(std::shared_ptr<const HarmonicSystem> system, std::vector<Eigen::VectorXd> components);

  /// Expansion of the restriction of f to the sphere (degrees 0..deg f).
  static SphereFunction from_polynomial(std::shared_ptr<const HarmonicSystem> system, const Polynomial& f);

  const HarmonicSystem& system() const { return *system_; }
  const std::shared_ptr<const HarmonicSystem>& system_ptr() const noexcept { return system_; }
  int max_degree() const noexcept { return static_cast<int>(components_.size()) - 1; }
  const Eigen::VectorXd& component(int n) const { return components_.at(n); }
  const std::vector<Eigen::VectorXd>& components() const noexcept { return components_; }

  /// proj_n f as a homogeneous polynomial of degree n.
  Polynomial component_polynomial(int n) const;
  /// Σ_n proj_n f; agrees with the source polynomial on the sphere.
  Polynomial to_polynomial() const;

  double evaluate(const Eigen::VectorXd& x) const;

  /// ⟨f, g⟩_κ via Parseval.
  double inner_product(const SphereFunction& g) const;
  double norm_squared() const { return inner_product(*this); }
  double norm() const;

  /// Σ_n n(n+2λ) ‖proj_n f‖², the squared κ-norm of (-Δ_{κ,0})^{1/2} f.
  double dirichlet_energy() const;

  /// Multiplies component n by multiplier(n).
  SphereFunction spectral_map(const std::function<double(int)>& multiplier) const;

  SphereFunction& operator+=(const SphereFunction& g);
  SphereFunction& operator-=(const SphereFunction& g);
  SphereFunction& operator*=(double s);
  friend SphereFunction operator+(SphereFunction f, const SphereFunction& g) { return f += g; }
  friend SphereFunction operator-(SphereFunction f, const SphereFunction& g) { return f -= g; }
  friend SphereFunction operator*(double s, SphereFunction f) { return f *= s; }

 private:
  void check_compatible(const SphereFunction& g) const;

  std::shared_ptr<const HarmonicSystem> system_;
  std::vector<Eigen::VectorXd> components_;
};

/// proj_n f.
SphereFunction project(std::shared_ptr<const HarmonicSystem> system, const Polynomial& f, int n);

/// (-Δ_{κ,0})^α f: component n scaled by (n(n+2λ_κ))^α. For α < 0 the mean
/// proj_0 f must vanish (norm ≤ 1e-10), otherwise std::domain_error.
SphereFunction fractional_laplacian(const SphereFunction& f, double alpha);

/// Δ_{κ,0} f computed from the operator formula on homogeneous parts and
/// expanded in h-harmonics.
SphereFunction sphere_laplacian(std::shared_ptr<const HarmonicSystem> system, const Polynomial& f);

/// ∇_{κ,0} f, one SphereFunction per coordinate.
std::vector<SphereFunction> sphere_gradient(std::shared_ptr<const HarmonicSystem> system, const Polynomial& f);

}  // namespace dunkl
