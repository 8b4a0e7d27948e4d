#pragma once

// Uncertainty products on S^{d-1} with respect to h_κ² dσ, the identities
// behind them, and a numerical estimate of the best constant.
//
// For f with ∫ f h² = 0 and ∫ f² h² = 1:
//   localization  L(f) = min_y ∫ (1 - ⟨x,y⟩) f² h² dσ = 1 - ‖m‖,  m_i = ∫ x_i f² h² dσ
//   Dirichlet     Q(f) = ‖(-Δ_{κ,0})^{1/2} f‖²
//   product       L(f) Q(f)

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dunkl/h_harmonics.hpp"

namespace dunkl {

using HarmonicSystemPtr = std::shared_ptr<const HarmonicSystem>;

/// Subtracts the mean and divides by the κ-norm. Throws std::domain_error
/// when nothing is left after removing the mean.
SphereFunction normalize_admissible(HarmonicSystemPtr system, const Polynomial& f);
SphereFunction normalize_admissible(const SphereFunction& f);

/// m_i = ∫ x_i f² h_κ² dσ.
Eigen::VectorXd moment_vector(const HarmonicSystem& system, const Polynomial& f);

struct Localization {
  double value = 0.0;
  // Minimizing direction m/‖m‖; empty when m = 0 (every y attains the minimum).
  std::optional<Eigen::VectorXd> direction;
};

/// min over y ∈ S^{d-1} of mass - ⟨m, y⟩, where mass = ∫ f² h².
Localization localization_min(const Eigen::VectorXd& moments, double mass = 1.0);
Localization localization_min(const HarmonicSystem& system, const Polynomial& f);

/// Same minimum found by a dense point search followed by local refinement
/// (Fibonacci lattice on S², angle grid on S¹, seeded random points otherwise).
Localization localization_grid_search(const Eigen::VectorXd& moments, double mass = 1.0, int points = 10000);

/// min over y ∈ {e_1, ..., e_d}.
double localization_axis_min(const Eigen::VectorXd& moments, double mass = 1.0);

/// 1 - ⟨x,y⟩ = 2 sin²(θ/2) with θ the geodesic distance.
double geodesic_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Identity checks. Residuals are absolute and quadratic in f.

/// ‖(-Δ_{κ,0})^{1/2} f‖² against Σ_{i<j} ‖D_{i,j} f‖² + Σ_v κ_v ‖E_v f‖².
struct DecompositionCheck {
  double dirichlet = 0.0;
  double rotation_sum = 0.0;
  double difference_sum = 0.0;
  double residual = 0.0;
};
DecompositionCheck verify_decomposition(HarmonicSystemPtr system, const Polynomial& f);

/// (|κ| + (d-1)/2) ∫⟨x,y⟩ f² h² = Σ_α κ_α ⟨y,α⟩ ∫ (E_α f) f h² + ∫ [Σ_{i,j} x_j y_i D_{i,j} f] f h².
/// The singular ∫ f² h²/⟨x,α⟩ is evaluated as ∫ (E_α f) f h², which equals it
/// by σ_α-symmetry. `opposite_sign_residual` is the residual with the rotation
/// term subtracted instead of added.
struct LemmaCheck {
  double lhs = 0.0;
  double difference_term = 0.0;
  double rotation_term = 0.0;
  double residual = 0.0;
  double opposite_sign_residual = 0.0;
};
LemmaCheck verify_lemma_identity(const HarmonicSystem& system, const Polynomial& f, const Eigen::VectorXd& y);

/// ‖√(-Δ_{κ,0}) f‖² = ‖∇_{κ,0} f‖² - 2λ_κ ∫ (ξ·∇_{κ,0} f) f h² with
/// ∫ (ξ·∇_{κ,0} f) f h² = Σ_v κ_v ∫ (f - f∘σ_v) f h².
struct GradientCheck {
  double dirichlet = 0.0;
  double gradient_norm_squared = 0.0;
  double radial_direct = 0.0;      // ∫ (ξ·∇_{κ,0} f) f h²
  double radial_reflection = 0.0;  // Σ_v κ_v ∫ (f - f∘σ_v) f h²
  double residual = 0.0;           // of the identity
  double radial_residual = 0.0;    // |radial_direct - radial_reflection|
  bool sign_holds = false;         // radial_direct ≥ -1e-10
  bool inequality_holds = false;   // ‖√(-Δ) f‖ ≤ ‖∇ f‖ (1 + 1e-10)
};
GradientCheck verify_gradient_identity(HarmonicSystemPtr system, const Polynomial& f);

/// Σ_{i,j} x_i x_j D_{i,j} f, computed term by term (identically zero).
RationalPolynomial radial_rotation(const RationalPolynomial& f);

/// Bound checks for the two estimates used to prove the uncertainty
/// inequality, at a normalized f, a direction y and a split parameter ε.
struct RootBound {
  std::size_t root = 0;
  double kappa = 0.0;
  double j2 = 0.0;       // |⟨y,α⟩ ∫ f² h²/⟨x,α⟩|
  double j2_outer = 0.0;  // part over |⟨x,α̂⟩| > (1-ε)|⟨y,α̂⟩|
  double j2_inner = 0.0;  // part over the complementary band
  double outer_bound = 0.0;           // 1/(1-ε)
  double inner_bound = 0.0;           // (2/ε) ‖E_α f‖ L^{1/2}
  double inner_bound_sqrt2 = 0.0;     // (√2/ε) ‖E_α f‖ L^{1/2}
  double margin = 0.0;                // outer_bound + inner_bound - j2
  double margin_sqrt2 = 0.0;          // same with the √2/ε constant
  double split_margin = 0.0;          // min of the two piecewise margins
};

struct ProofBoundsReport {
  double epsilon = 0.5;
  Eigen::VectorXd y;
  double localization = 0.0;  // ∫ f² (1 - ⟨x,y⟩) h²
  double rotation_energy = 0.0;  // Σ_{i<j} ‖D_{i,j} f‖²
  double j1 = 0.0;
  double j1_bound = 0.0;
  double j1_margin = 0.0;
  double pointwise_excess = 0.0;  // max over nodes of lhs - rhs of the Cauchy-Schwarz step
  bool radial_identity_exact = false;  // Σ_{i,j} x_i x_j D_{i,j} f is the zero polynomial
  std::vector<RootBound> roots;
  bool holds = false;
};

ProofBoundsReport verify_proof_bounds(const HarmonicSystem& system, const Polynomial& f, const Eigen::VectorXd& y,
                                      double epsilon = 0.5);

/// Lower bound on the product implied by the proof at a given ε:
/// min(ε(1 + 2λ), (A/B)²) with A = (1-ε)(|κ| + (d-1)/2) - |κ|/(1-ε),
/// B = 2 + c|κ|^{1/2}/ε, c = 2 (or √2 for the sharper printed constant); 0 if A ≤ 0.
double proof_side_constant(int dimension, double kappa_total, double epsilon, bool sqrt2_constant = false);

struct ProofSideBound {
  double value = 0.0;
  double epsilon = 0.0;
};
/// Best proof_side_constant over ε on a uniform grid in (0,1).
ProofSideBound best_proof_side_constant(int dimension, double kappa_total, bool sqrt2_constant = false,
                                        int grid = 999);

struct UncertaintyReport {
  std::string domain = "sphere";
  std::string group;
  std::vector<double> kappa;
  double mu = 0.0;
  int dimension = 0;
  int degree = 0;
  double tolerance = 1e-8;

  double localization = 0.0;
  std::optional<Eigen::VectorXd> minimizer;
  double localization_grid = 0.0;
  double localization_axis = 0.0;
  double dirichlet = 0.0;
  double product = 0.0;

  double decomposition_residual = 0.0;
  double lemma_residual = 0.0;
  double gradient_residual = 0.0;
  bool gradient_inequality = false;
  bool radial_sign = false;
};

/// Full report for a normalized f (the identity residuals use y = minimizer, or e_1).
UncertaintyReport uncertainty_product(const SphereFunction& f, bool with_identities = true);

struct OptimizerOptions {
  int restarts = 32;
  std::uint64_t seed = 0;
  double stationarity = 1e-10;
  int max_iterations = 20000;
};

struct ConstantEstimate {
  double value = 0.0;
  SphereFunction witness;
  std::vector<double> by_budget;  // best product over H_1 ⊕ ... ⊕ H_n, n = 1..N
  bool converged = true;
  double proof_side = 0.0;
  double proof_side_epsilon = 0.0;
  double proof_side_sqrt2 = 0.0;
};

/// Minimizes the product over unit-norm f in H_1 ⊕ ... ⊕ H_N by projected
/// gradient descent on the coefficient sphere. Each budget level also starts
/// from the previous level's optimum, so by_budget is non-increasing.
ConstantEstimate estimate_constant(HarmonicSystemPtr system, int degree_budget, const OptimizerOptions& options = {});

}  // namespace dunkl
