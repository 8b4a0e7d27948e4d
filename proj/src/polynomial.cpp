#include "dunkl/polynomial.hpp"

#include <numeric>

namespace dunkl {

Polynomial to_floating(const RationalPolynomial& p) {
  Polynomial r(p.dimension());
  for (const auto& [e, c] : p.terms()) r.add_term(e, c.convert_to<double>());
  return r;
}

RationalPolynomial to_rational(const Polynomial& p) {
  RationalPolynomial r(p.dimension());
  for (const auto& [e, c] : p.terms()) r.add_term(e, Rational(c));
  return r;
}

Polynomial pruned(const Polynomial& p, double relative_tol) {
  const double cutoff = relative_tol * p.max_coefficient();
  Polynomial r(p.dimension());
  for (const auto& [e, c] : p.terms())
    if (std::abs(c) > cutoff) r.add_term(e, c);
  return r;
}

template <class T>
BasicPolynomial<T> partial_derivative(const BasicPolynomial<T>& p, int index) {
  if (index < 0 || index >= p.dimension()) throw std::out_of_range("derivative index out of range");
  BasicPolynomial<T> r(p.dimension());
  for (const auto& [e, c] : p.terms()) {
    if (e[index] == 0) continue;
    Exponent f = e;
    f[index] -= 1;
    r.add_term(f, c * T(e[index]));
  }
  return r;
}

namespace {

// Nonzero pattern of a signed permutation matrix: row i has a single ±1 in column perm[i].
template <class T>
bool as_signed_permutation(const LinearMap<T>& g, std::vector<int>& perm, std::vector<int>& sign) {
  const int d = static_cast<int>(g.size());
  perm.assign(d, -1);
  sign.assign(d, 0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const T& v = g[i][j];
      if (CoefficientTraits<T>::is_zero(v)) continue;
      if (perm[i] != -1) return false;
      if (v == T(1)) {
        sign[i] = 1;
      } else if (v == T(-1)) {
        sign[i] = -1;
      } else {
        return false;
      }
      perm[i] = j;
    }
    if (perm[i] == -1) return false;
  }
  return true;
}

}  // namespace

template <class T>
BasicPolynomial<T> compose_linear(const BasicPolynomial<T>& p, const LinearMap<T>& g) {
  const int d = p.dimension();
  if (static_cast<int>(g.size()) != d) throw std::invalid_argument("linear map dimension mismatch");
  for (const auto& row : g)
    if (static_cast<int>(row.size()) != d) throw std::invalid_argument("linear map must be square");

  std::vector<int> perm, sign;
  if (as_signed_permutation(g, perm, sign)) {
    // x_i -> sign_i * x_{perm_i}
    BasicPolynomial<T> r(d);
    Exponent f(d);
    for (const auto& [e, c] : p.terms()) {
      std::fill(f.begin(), f.end(), 0);
      int s = 1;
      for (int i = 0; i < d; ++i) {
        f[perm[i]] += e[i];
        if (sign[i] < 0 && (e[i] & 1)) s = -s;
      }
      r.add_term(f, s > 0 ? c : T(-c));
    }
    return r;
  }

  // General case: expand products of the linear forms (g x)_i, caching powers.
  std::vector<BasicPolynomial<T>> forms;
  forms.reserve(d);
  for (int i = 0; i < d; ++i) {
    BasicPolynomial<T> form(d);
    for (int j = 0; j < d; ++j) {
      Exponent e(d, 0);
      e[j] = 1;
      form.add_term(e, g[i][j]);
    }
    forms.push_back(std::move(form));
  }
  std::vector<std::vector<BasicPolynomial<T>>> powers(d);
  auto power = [&](int i, int k) -> const BasicPolynomial<T>& {
    auto& cache = powers[i];
    if (cache.empty()) cache.push_back(BasicPolynomial<T>::constant(d, T(1)));
    while (static_cast<int>(cache.size()) <= k) cache.push_back(cache.back() * forms[i]);
    return cache[k];
  };
  BasicPolynomial<T> r(d);
  for (const auto& [e, c] : p.terms()) {
    BasicPolynomial<T> term = BasicPolynomial<T>::constant(d, c);
    for (int i = 0; i < d; ++i)
      if (e[i] != 0) term = term * power(i, e[i]);
    r += term;
  }
  return r;
}

template <class T>
DivisionResult<T> divide_exact(const BasicPolynomial<T>& p, std::span<const T> linear_form) {
  const int d = p.dimension();
  if (static_cast<int>(linear_form.size()) != d) {
    throw std::invalid_argument("linear form dimension mismatch");
  }
  int pivot = -1;
  double best = 0.0;
  for (int i = 0; i < d; ++i) {
    const double m = std::abs(CoefficientTraits<T>::to_double(linear_form[i]));
    if (m > best) {
      best = m;
      pivot = i;
    }
  }
  if (pivot < 0) throw std::invalid_argument("division by the zero linear form");
  const T& lead = linear_form[pivot];

  // Bucket the dividend by the pivot exponent and reduce from the top down.
  int top = 0;
  for (const auto& [e, c] : p.terms()) top = std::max(top, e[pivot]);
  std::vector<BasicPolynomial<T>> buckets(top + 1, BasicPolynomial<T>(d));
  for (const auto& [e, c] : p.terms()) buckets[e[pivot]].add_term(e, c);

  DivisionResult<T> out{BasicPolynomial<T>(d), BasicPolynomial<T>(d), pivot};
  for (int k = top; k >= 1; --k) {
    for (const auto& [e, c] : buckets[k].terms()) {
      Exponent qe = e;
      qe[pivot] -= 1;
      const T qc = c / lead;
      out.quotient.add_term(qe, qc);
      // Subtract qc * x^qe * (ℓ - lead x_pivot); the pivot term cancels c x^e exactly.
      for (int j = 0; j < d; ++j) {
        if (j == pivot || CoefficientTraits<T>::is_zero(linear_form[j])) continue;
        Exponent se = qe;
        se[j] += 1;
        buckets[k - 1].add_term(se, T(-(qc * linear_form[j])));
      }
    }
  }
  out.remainder = std::move(buckets[0]);
  return out;
}

template <class T>
std::vector<BasicPolynomial<T>> homogeneous_components(const BasicPolynomial<T>& p) {
  std::vector<BasicPolynomial<T>> parts(std::max(p.degree() + 1, 0), BasicPolynomial<T>(p.dimension()));
  for (const auto& [e, c] : p.terms()) parts[total_degree(e)].add_term(e, c);
  return parts;
}

template <class T>
BasicPolynomial<T> euler_operator(const BasicPolynomial<T>& p) {
  BasicPolynomial<T> r(p.dimension());
  for (const auto& [e, c] : p.terms()) r.add_term(e, c * T(total_degree(e)));
  return r;
}

template <class T>
BasicPolynomial<T> norm_squared_power(int dimension, int k) {
  BasicPolynomial<T> r2(dimension);
  for (int i = 0; i < dimension; ++i) {
    Exponent e(dimension, 0);
    e[i] = 2;
    r2.add_term(e, T(1));
  }
  BasicPolynomial<T> r = BasicPolynomial<T>::constant(dimension, T(1));
  for (int i = 0; i < k; ++i) r = r * r2;
  return r;
}

std::vector<Exponent> exponents_of_degree(int dimension, int n) {
  std::vector<Exponent> out;
  if (dimension == 0) {
    if (n == 0) out.emplace_back();
    return out;
  }
  Exponent e(dimension, 0);
  // Recursive fill: first coordinate descending.
  auto rec = [&](auto&& self, int index, int remaining) -> void {
    if (index == dimension - 1) {
      e[index] = remaining;
      out.push_back(e);
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      e[index] = a;
      self(self, index + 1, remaining - a);
    }
  };
  rec(rec, 0, n);
  return out;
}

long long homogeneous_dimension(int dimension, int n) {
  if (n < 0) return 0;
  // C(n + d - 1, d - 1)
  long long r = 1;
  for (int i = 1; i < dimension; ++i) r = r * (n + i) / i;
  return r;
}

#define DUNKL_INSTANTIATE(T)                                                                       \
  template BasicPolynomial<T> partial_derivative(const BasicPolynomial<T>&, int);                  \
  template BasicPolynomial<T> compose_linear(const BasicPolynomial<T>&, const LinearMap<T>&);      \
  template DivisionResult<T> divide_exact(const BasicPolynomial<T>&, std::span<const T>);          \
  template std::vector<BasicPolynomial<T>> homogeneous_components(const BasicPolynomial<T>&);      \
  template BasicPolynomial<T> euler_operator(const BasicPolynomial<T>&);                           \
  template BasicPolynomial<T> norm_squared_power(int, int);

DUNKL_INSTANTIATE(double)
DUNKL_INSTANTIATE(Rational)

#undef DUNKL_INSTANTIATE

}  // namespace dunkl
