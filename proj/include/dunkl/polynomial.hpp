#pragma once

// Sparse multivariate polynomials over exact rationals or doubles.
//
// Exponents are stored densely (one entry per variable); variables are
// addressed by zero-based index, so x_1 in the usual notation is index 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace dunkl {

using Rational = boost::multiprecision::cpp_rational;
using Exponent = std::vector<int>;

inline int total_degree(const Exponent& e) {
  int s = 0;
  for (int a : e) s += a;
  return s;
}

struct ExponentHash {
  std::size_t operator()(const Exponent& e) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (int a : e) {
      h ^= static_cast<std::size_t>(a) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

template <class T>
struct CoefficientTraits;

template <>
struct CoefficientTraits<double> {
  static bool is_zero(double c) { return c == 0.0; }
  static double to_double(double c) { return c; }
  static double from_double(double c) { return c; }
  static constexpr const char* mode_name = "float";
};

template <>
struct CoefficientTraits<Rational> {
  static bool is_zero(const Rational& c) { return c == 0; }
  static double to_double(const Rational& c) { return c.convert_to<double>(); }
  // Exact: every finite double is a dyadic rational.
  static Rational from_double(double c) { return Rational(c); }
  static constexpr const char* mode_name = "rational";
};

template <class T>
class BasicPolynomial {
 public:
  using coefficient_type = T;
  using term_map = std::map<Exponent, T>;
  using traits = CoefficientTraits<T>;

  BasicPolynomial() = default;
  explicit BasicPolynomial(int dimension) : dimension_(dimension) {
    if (dimension < 0) throw std::invalid_argument("negative polynomial dimension");
  }

  static BasicPolynomial constant(int dimension, const T& value) {
    BasicPolynomial p(dimension);
    p.add_term(Exponent(dimension, 0), value);
    return p;
  }

  static BasicPolynomial variable(int dimension, int index) {
    if (index < 0 || index >= dimension) throw std::out_of_range("variable index out of range");
    Exponent e(dimension, 0);
    e[index] = 1;
    return monomial(std::move(e), T(1));
  }

  static BasicPolynomial monomial(Exponent exponent, const T& coefficient) {
    BasicPolynomial p(static_cast<int>(exponent.size()));
    p.add_term(exponent, coefficient);
    return p;
  }

  int dimension() const noexcept { return dimension_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }
  const term_map& terms() const noexcept { return terms_; }

  /// Maximum total degree of the stored terms; -1 for the zero polynomial.
  int degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
    return d;
  }

  bool is_homogeneous() const {
    if (terms_.empty()) return true;
    const int d = total_degree(terms_.begin()->first);
    return std::all_of(terms_.begin(), terms_.end(),
                       [d](const auto& t) { return total_degree(t.first) == d; });
  }

  T coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? T(0) : it->second;
  }

  void add_term(const Exponent& e, const T& c) {
    if (static_cast<int>(e.size()) != dimension_) {
      throw std::invalid_argument("exponent length does not match polynomial dimension");
    }
    if (traits::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (traits::is_zero(it->second)) terms_.erase(it);
    }
  }

  /// Largest coefficient magnitude, as a double.
  double max_coefficient() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(traits::to_double(c)));
    return m;
  }

  template <class U>
  U evaluate(std::span<const U> point) const {
    static_assert(std::is_same_v<U, T> || std::is_same_v<U, double>);
    if (static_cast<int>(point.size()) != dimension_) {
      throw std::invalid_argument("evaluation point has wrong dimension");
    }
    int max_exp = 0;
    for (const auto& [e, c] : terms_)
      for (int a : e) max_exp = std::max(max_exp, a);
    std::vector<std::vector<U>> powers(dimension_, std::vector<U>(max_exp + 1, U(1)));
    for (int i = 0; i < dimension_; ++i)
      for (int k = 1; k <= max_exp; ++k) powers[i][k] = powers[i][k - 1] * point[i];
    U sum(0);
    for (const auto& [e, c] : terms_) {
      U term;
      if constexpr (std::is_same_v<U, T>) {
        term = c;
      } else {
        term = traits::to_double(c);
      }
      for (int i = 0; i < dimension_; ++i)
        if (e[i] != 0) term *= powers[i][e[i]];
      sum += term;
    }
    return sum;
  }

  template <class U>
  U operator()(std::span<const U> point) const {
    return evaluate<U>(point);
  }

  BasicPolynomial& operator+=(const BasicPolynomial& q) {
    check_dimension(q);
    for (const auto& [e, c] : q.terms_) add_term(e, c);
    return *this;
  }

  BasicPolynomial& operator-=(const BasicPolynomial& q) {
    check_dimension(q);
    for (const auto& [e, c] : q.terms_) add_term(e, -c);
    return *this;
  }

  BasicPolynomial& operator*=(const T& s) {
    if (traits::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second *= s;
      if (traits::is_zero(it->second)) {
        it = terms_.erase(it);
      } else {
        ++it;
      }
    }
    return *this;
  }

  BasicPolynomial& operator*=(const BasicPolynomial& q) {
    *this = *this * q;
    return *this;
  }

  friend BasicPolynomial operator+(BasicPolynomial p, const BasicPolynomial& q) { return p += q; }
  friend BasicPolynomial operator-(BasicPolynomial p, const BasicPolynomial& q) { return p -= q; }
  friend BasicPolynomial operator-(BasicPolynomial p) { return p *= T(-1); }
  friend BasicPolynomial operator*(BasicPolynomial p, const T& s) { return p *= s; }
  friend BasicPolynomial operator*(const T& s, BasicPolynomial p) { return p *= s; }

  friend BasicPolynomial operator*(const BasicPolynomial& p, const BasicPolynomial& q) {
    p.check_dimension(q);
    BasicPolynomial r(p.dimension_);
    Exponent e(p.dimension_);
    for (const auto& [ep, cp] : p.terms_) {
      for (const auto& [eq, cq] : q.terms_) {
        for (int i = 0; i < p.dimension_; ++i) e[i] = ep[i] + eq[i];
        r.add_term(e, cp * cq);
      }
    }
    return r;
  }

  friend bool operator==(const BasicPolynomial& p, const BasicPolynomial& q) {
    return p.dimension_ == q.dimension_ && p.terms_ == q.terms_;
  }

 private:
  void check_dimension(const BasicPolynomial& q) const {
    if (q.dimension_ != dimension_) throw std::invalid_argument("polynomial dimension mismatch");
  }

  int dimension_ = 0;
  term_map terms_;
};

using Polynomial = BasicPolynomial<double>;
using RationalPolynomial = BasicPolynomial<Rational>;

Polynomial to_floating(const RationalPolynomial& p);
RationalPolynomial to_rational(const Polynomial& p);

/// Drops terms whose magnitude is at most tol * max_coefficient().
Polynomial pruned(const Polynomial& p, double relative_tol);

/// Row-major d×d matrix acting on points: (g x)_i = Σ_j g[i][j] x_j.
template <class T>
using LinearMap = std::vector<std::vector<T>>;

template <class T>
BasicPolynomial<T> partial_derivative(const BasicPolynomial<T>& p, int index);

/// Returns q with q(x) = p(g x).
template <class T>
BasicPolynomial<T> compose_linear(const BasicPolynomial<T>& p, const LinearMap<T>& g);

template <class T>
struct DivisionResult {
  BasicPolynomial<T> quotient;
  BasicPolynomial<T> remainder;
  int pivot = 0;  // the variable eliminated from the remainder
};

/// Divides p by the linear form ℓ(x) = Σ ℓ_i x_i, pivoting on the largest |ℓ_i|.
/// The remainder contains no power of the pivot variable.
template <class T>
DivisionResult<T> divide_exact(const BasicPolynomial<T>& p, std::span<const T> linear_form);

/// Component n of the result is the degree-n homogeneous part (possibly zero).
template <class T>
std::vector<BasicPolynomial<T>> homogeneous_components(const BasicPolynomial<T>& p);

/// Σ_i x_i ∂_i p.
template <class T>
BasicPolynomial<T> euler_operator(const BasicPolynomial<T>& p);

/// ‖x‖^{2k} as a polynomial.
template <class T>
BasicPolynomial<T> norm_squared_power(int dimension, int k);

/// All exponents of total degree exactly n in `dimension` variables, in
/// descending lexicographic order.
std::vector<Exponent> exponents_of_degree(int dimension, int n);

/// Number of monomials of degree exactly n in d variables.
long long homogeneous_dimension(int dimension, int n);

}  // namespace dunkl
