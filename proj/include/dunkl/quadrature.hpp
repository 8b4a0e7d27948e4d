#pragma once

// Quadrature primitives on intervals and spheres.

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace dunkl {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss–Jacobi rule for ∫_{-1}^{1} f(t) (1-t)^α (1+t)^β dt (Golub–Welsch).
GaussRule gauss_jacobi(int n, double alpha, double beta);

/// n-point Gauss–Legendre rule mapped to [a, b].
GaussRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Nodes and weights on S^{d-1} (points are the columns of `nodes`).
struct SphereRule {
  Eigen::MatrixXd nodes;
  Eigen::VectorXd weights;

  Eigen::Index size() const { return weights.size(); }
};

/// Surface area of S^{d-1}: 2π^{d/2}/Γ(d/2).
double sphere_area(int dimension);

/// Product rule on S^{d-1} (surface measure dσ), exact for polynomials of total
/// degree ≤ `degree`. For d = 1 returns the two points ±1 with unit weights.
SphereRule sphere_product_rule(int dimension, int degree);

/// Rule for the part of S^{d-1} whose polar angle θ from `axis` lies in
/// [theta_lo, theta_hi]; Gauss–Legendre in θ with `theta_points` nodes and a
/// product rule of degree `inner_degree` on each latitude sphere.
SphereRule sphere_band_rule(const Eigen::VectorXd& axis, double theta_lo, double theta_hi, int theta_points,
                            int inner_degree);

/// Vector-valued integrand on the sphere.
using SphereIntegrand = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct AdaptiveResult {
  Eigen::VectorXd value;
  double error_estimate = 0.0;
  long long evaluations = 0;
  bool converged = true;
};

struct AdaptiveOptions {
  double tolerance = 1e-12;  // absolute, per nested 1D integral, max-norm over components
  int panel_points = 16;
  int max_depth = 30;
  // Panels are also accepted once the difference is at rounding level.
  double relative_floor = 1e-14;
};

/// Nested adaptive integration over S^{d-1} in spherical angles. The angle
/// ranges are split wherever a hyperplane {⟨x,v⟩ = 0} for v in `hyperplanes`
/// enters or leaves the current slice, so integrands with |⟨x,v⟩|^s kinks are
/// integrated piecewise-smoothly.
AdaptiveResult adaptive_sphere_integrate(int dimension, int components, const SphereIntegrand& f,
                                         const std::vector<Eigen::VectorXd>& hyperplanes,
                                         const AdaptiveOptions& options = {});

struct MonteCarloResult {
  double mean = 0.0;            // estimate of ∫ f dσ
  double standard_error = 0.0;  // of the estimate
  std::int64_t samples = 0;
};

/// Plain Monte-Carlo on S^{d-1} with uniformly distributed points, seeded.
MonteCarloResult monte_carlo_sphere(int dimension, const std::function<double(const Eigen::VectorXd&)>& f,
                                    std::int64_t samples, std::uint64_t seed);

/// Uniform random point on S^{d-1}.
template <class Rng>
Eigen::VectorXd random_sphere_point(int dimension, Rng& rng);

}  // namespace dunkl

#include <random>

namespace dunkl {

template <class Rng>
Eigen::VectorXd random_sphere_point(int dimension, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x(dimension);
  double n = 0.0;
  do {
    for (int i = 0; i < dimension; ++i) x[i] = normal(rng);
    n = x.norm();
  } while (n < 1e-12);
  return x / n;
}

}  // namespace dunkl
