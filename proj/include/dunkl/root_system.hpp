#pragma once

// Root systems, finite reflection groups, multiplicity functions and the
// weight h_κ(x) = Π_{v∈R₊} |⟨x,v⟩|^{κ_v}.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dunkl/polynomial.hpp"

namespace dunkl {

enum class RootFamily {
  Trivial,   // no roots; G = {I}
  Z2,        // Z2^d: roots √2 e_i
  A,         // A_{d-1}: roots e_i - e_j
  B,         // B_d: roots √2 e_i and e_i ± e_j
  Dihedral,  // I2(m), d = 2
  Custom,    // explicit positive roots (e.g. products built by the ball lift)
};

std::string to_string(RootFamily family);
RootFamily parse_root_family(std::string_view name);

struct Root {
  Eigen::VectorXd vector;  // normalized so that ⟨v,v⟩ = 2
  // Rational vector parallel to `vector`, when one with small denominators exists.
  std::optional<std::vector<Rational>> rational_direction;
};

struct GroupElement {
  Eigen::MatrixXd matrix;
};

inline constexpr std::size_t kDefaultGroupCap = 10000;

class RootSystem {
 public:
  /// Catalog constructor. `dihedral_order` is only used for RootFamily::Dihedral.
  static RootSystem build(RootFamily family, int dimension, int dihedral_order = 0,
                          std::size_t group_cap = kDefaultGroupCap);

  /// Positive roots are rescaled to ⟨v,v⟩ = 2; the set must be closed under the
  /// reflections it generates (up to sign) and contain no pair ±v.
  static RootSystem from_roots(int dimension, const std::vector<Eigen::VectorXd>& positive_roots,
                               RootFamily family = RootFamily::Custom,
                               std::size_t group_cap = kDefaultGroupCap);

  int dimension() const noexcept { return dimension_; }
  RootFamily family() const noexcept { return family_; }
  int dihedral_order() const noexcept { return dihedral_order_; }
  std::span<const Root> positive_roots() const noexcept { return roots_; }
  std::size_t root_count() const noexcept { return roots_.size(); }

  /// Elements of G, identity first.
  const std::vector<GroupElement>& group() const noexcept { return group_; }

  /// orbit_index()[k] is the G-orbit of root k; orbits are numbered by first appearance.
  const std::vector<int>& orbit_index() const noexcept { return orbit_; }
  int orbit_count() const noexcept { return orbit_count_; }

  /// Index of the root parallel to w (either sign), or -1.
  int find_root(const Eigen::VectorXd& w, double tol = 1e-10) const;

 private:
  RootSystem() = default;

  int dimension_ = 0;
  RootFamily family_ = RootFamily::Custom;
  int dihedral_order_ = 0;
  std::vector<Root> roots_;
  std::vector<GroupElement> group_;
  std::vector<int> orbit_;
  int orbit_count_ = 0;
};

/// Non-negative G-invariant multiplicity, one value per positive root.
class Multiplicity {
 public:
  Multiplicity() = default;

  /// Values listed per orbit; a single value is broadcast to every orbit.
  static Multiplicity from_orbits(const RootSystem& rs, std::span<const double> per_orbit);
  /// Values listed per positive root; must be constant on orbits.
  static Multiplicity from_roots(const RootSystem& rs, std::span<const double> per_root);

  double operator[](std::size_t root) const { return values_.at(root); }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  /// |κ| = Σ κ_v.
  double total() const;
  bool is_zero() const;

  /// True when κ is constant on every G-orbit of roots.
  bool orbit_constant(const RootSystem& rs, double tol = 1e-14) const;

 private:
  std::vector<double> values_;
};

/// λ_κ = (d - 2)/2 + |κ|.
double lambda_kappa(const RootSystem& rs, const Multiplicity& kappa);

/// σ_v x = x - 2⟨x,v⟩/‖v‖² v.
Eigen::VectorXd reflect(const Eigen::VectorXd& v, const Eigen::VectorXd& x);

/// Reflection matrix I - 2 v vᵀ/‖v‖².
Eigen::MatrixXd reflection_matrix(const Eigen::VectorXd& v);

/// Closure of the reflections {σ_v}; throws std::runtime_error past `cap` elements.
std::vector<GroupElement> group_elements(const RootSystem& rs, std::size_t cap = kDefaultGroupCap);

/// h_κ(x).
double weight_eval(const RootSystem& rs, const Multiplicity& kappa, const Eigen::VectorXd& x);

/// h_κ(x)².
double weight_squared_eval(const RootSystem& rs, const Multiplicity& kappa, const Eigen::VectorXd& x);

/// Converts a matrix to the polynomial-module linear map (double or exact
/// rational; the rational form requires entries that are small-denominator rationals).
LinearMap<double> to_linear_map(const Eigen::MatrixXd& g);

/// Best small-denominator rational approximation of x when |x - p/q| ≤ tol, q ≤ max_den.
std::optional<Rational> recognize_rational(double x, int max_den = 64, double tol = 1e-12);

}  // namespace dunkl
