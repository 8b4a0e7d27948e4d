#pragma once

// Dunkl operators and their spherical restrictions, acting on polynomials.
//
// With σ_v the reflection in v⊥,
//   𝒟_i f     = ∂_i f + Σ_v κ_v ⟨v,e_i⟩ (f - f∘σ_v)/⟨x,v⟩
//   Δ_κ f     = Σ_i 𝒟_i² f
//   E_v f     = (f - f∘σ_v)/⟨x,v⟩
//   D_{i,j} f = x_j ∂_i f - x_i ∂_j f
// The reflection term of 𝒟_i does not depend on the length of v, so in exact
// mode it is computed with the rational direction of each root.

#include <optional>
#include <vector>

#include "dunkl/polynomial.hpp"
#include "dunkl/root_system.hpp"

namespace dunkl {

class OperatorContext {
 public:
  OperatorContext(RootSystem roots, Multiplicity kappa);

  const RootSystem& roots() const noexcept { return roots_; }
  const Multiplicity& kappa() const noexcept { return kappa_; }
  int dimension() const noexcept { return roots_.dimension(); }
  double lambda() const noexcept { return lambda_; }

  /// True when every root with κ_v > 0 has a rational direction and every κ_v
  /// is a small-denominator rational, so operators can run in exact arithmetic.
  bool exact_capable() const noexcept { return exact_capable_; }
  /// Throws std::logic_error unless exact_capable().
  Rational rational_lambda() const;

  const LinearMap<double>& reflection(std::size_t root) const { return reflections_.at(root); }

  // Per-coefficient-type accessors used by the operator templates.
  template <class T>
  const LinearMap<T>& reflection_as(std::size_t root) const;
  template <class T>
  const std::vector<T>& direction_as(std::size_t root) const;
  template <class T>
  T kappa_as(std::size_t root) const;

  /// Tolerance for the division remainder, relative to the largest coefficient of f.
  static constexpr double kRemainderTolerance = 1e-9;

 private:
  RootSystem roots_;
  Multiplicity kappa_;
  double lambda_ = 0.0;
  bool exact_capable_ = false;
  std::vector<LinearMap<double>> reflections_;
  std::vector<std::vector<double>> directions_;  // the roots themselves
  std::vector<LinearMap<Rational>> rational_reflections_;
  std::vector<std::vector<Rational>> rational_directions_;
  std::vector<Rational> rational_kappa_;
};

template <>
const LinearMap<double>& OperatorContext::reflection_as<double>(std::size_t) const;
template <>
const LinearMap<Rational>& OperatorContext::reflection_as<Rational>(std::size_t) const;
template <>
const std::vector<double>& OperatorContext::direction_as<double>(std::size_t) const;
template <>
const std::vector<Rational>& OperatorContext::direction_as<Rational>(std::size_t) const;
template <>
double OperatorContext::kappa_as<double>(std::size_t) const;
template <>
Rational OperatorContext::kappa_as<Rational>(std::size_t) const;

/// Exact quotient (f - f∘σ_v)/⟨x,u⟩ for the direction u of root k used in
/// mode T (the root vector for double, its rational direction for Rational).
/// Throws std::runtime_error when the division leaves a remainder.
template <class T>
BasicPolynomial<T> reflection_quotient(const OperatorContext& ctx, std::size_t root, const BasicPolynomial<T>& f);

/// 𝒟_i f, i zero-based.
template <class T>
BasicPolynomial<T> dunkl_derivative(const OperatorContext& ctx, int i, const BasicPolynomial<T>& f);

/// ∇_κ f = (𝒟_1 f, ..., 𝒟_d f).
template <class T>
std::vector<BasicPolynomial<T>> dunkl_gradient(const OperatorContext& ctx, const BasicPolynomial<T>& f);

template <class T>
BasicPolynomial<T> dunkl_laplacian(const OperatorContext& ctx, const BasicPolynomial<T>& f);

/// D_{i,j} f = x_j ∂_i f - x_i ∂_j f, i and j zero-based.
template <class T>
BasicPolynomial<T> angular_derivative(int i, int j, const BasicPolynomial<T>& f);

/// E_v f for root k, with v normalized to ⟨v,v⟩ = 2.
Polynomial difference_operator(const OperatorContext& ctx, std::size_t root, const Polynomial& f);

/// A polynomial whose restriction to the sphere is Δ_{κ,0} f: for each
/// homogeneous part p_n, Δ_κ p_n - n(n+2λ_κ) p_n.
template <class T>
BasicPolynomial<T> sphere_laplacian_polynomial(const OperatorContext& ctx, const BasicPolynomial<T>& f);

/// Components whose restrictions give ∇_{κ,0} f: Σ_n (∇_κ p_n - n x p_n).
template <class T>
std::vector<BasicPolynomial<T>> sphere_gradient_polynomial(const OperatorContext& ctx, const BasicPolynomial<T>& f);

/// Σ_i x_i g_i for a vector field g (the radial component ξ·g on the sphere).
template <class T>
BasicPolynomial<T> radial_component(const std::vector<BasicPolynomial<T>>& field);

}  // namespace dunkl
