#include "dunkl/dunkl_operators.hpp"

#include <stdexcept>

namespace dunkl {

namespace {

LinearMap<Rational> rational_reflection(const std::vector<Rational>& u) {
  const std::size_t d = u.size();
  Rational uu = 0;
  for (const auto& c : u) uu += c * c;
  LinearMap<Rational> m(d, std::vector<Rational>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m[i][j] = (i == j ? Rational(1) : Rational(0)) - 2 * u[i] * u[j] / uu;
  return m;
}

}  // namespace

OperatorContext::OperatorContext(RootSystem roots, Multiplicity kappa)
    : roots_(std::move(roots)), kappa_(std::move(kappa)) {
  if (kappa_.size() != roots_.root_count()) throw std::invalid_argument("multiplicity does not match root system");
  lambda_ = lambda_kappa(roots_, kappa_);
  exact_capable_ = true;
  const auto rs = roots_.positive_roots();
  for (std::size_t k = 0; k < rs.size(); ++k) {
    reflections_.push_back(to_linear_map(reflection_matrix(rs[k].vector)));
    directions_.emplace_back(rs[k].vector.data(), rs[k].vector.data() + rs[k].vector.size());
    const auto kr = recognize_rational(kappa_[k], 1024);
    if (!kr || (kappa_[k] > 0.0 && !rs[k].rational_direction)) exact_capable_ = false;
  }
  if (exact_capable_) {
    for (std::size_t k = 0; k < rs.size(); ++k) {
      rational_kappa_.push_back(*recognize_rational(kappa_[k], 1024));
      if (rs[k].rational_direction) {
        rational_directions_.push_back(*rs[k].rational_direction);
        rational_reflections_.push_back(rational_reflection(*rs[k].rational_direction));
      } else {
        // Unused: κ_v = 0 for this root.
        rational_directions_.emplace_back(dimension(), Rational(0));
        rational_reflections_.emplace_back();
      }
    }
  }
}

Rational OperatorContext::rational_lambda() const {
  if (!exact_capable_) throw std::logic_error("root data does not admit exact arithmetic");
  Rational s = Rational(dimension() - 2, 2);
  for (const auto& k : rational_kappa_) s += k;
  return s;
}

template <>
const LinearMap<double>& OperatorContext::reflection_as<double>(std::size_t root) const {
  return reflections_.at(root);
}
template <>
const LinearMap<Rational>& OperatorContext::reflection_as<Rational>(std::size_t root) const {
  if (!exact_capable_) throw std::logic_error("root data does not admit exact arithmetic");
  return rational_reflections_.at(root);
}
template <>
const std::vector<double>& OperatorContext::direction_as<double>(std::size_t root) const {
  return directions_.at(root);
}
template <>
const std::vector<Rational>& OperatorContext::direction_as<Rational>(std::size_t root) const {
  if (!exact_capable_) throw std::logic_error("root data does not admit exact arithmetic");
  return rational_directions_.at(root);
}
template <>
double OperatorContext::kappa_as<double>(std::size_t root) const {
  return kappa_[root];
}
template <>
Rational OperatorContext::kappa_as<Rational>(std::size_t root) const {
  if (!exact_capable_) throw std::logic_error("root data does not admit exact arithmetic");
  return rational_kappa_.at(root);
}

template <class T>
BasicPolynomial<T> reflection_quotient(const OperatorContext& ctx, std::size_t root, const BasicPolynomial<T>& f) {
  const BasicPolynomial<T> diff = f - compose_linear(f, ctx.reflection_as<T>(root));
  if (diff.is_zero()) return BasicPolynomial<T>(f.dimension());
  const auto& u = ctx.direction_as<T>(root);
  DivisionResult<T> r = divide_exact(diff, std::span<const T>(u));
  if constexpr (std::is_same_v<T, Rational>) {
    if (!r.remainder.is_zero()) throw std::runtime_error("reflection difference is not divisible by its root");
  } else {
    const double scale = std::max(f.max_coefficient(), 1e-300);
    if (r.remainder.max_coefficient() > OperatorContext::kRemainderTolerance * scale) {
      throw std::runtime_error("reflection difference is not divisible by its root (corrupted reflection data?)");
    }
  }
  return std::move(r.quotient);
}

namespace {

template <class T>
std::vector<BasicPolynomial<T>> quotients(const OperatorContext& ctx, const BasicPolynomial<T>& f) {
  std::vector<BasicPolynomial<T>> out;
  out.reserve(ctx.roots().root_count());
  for (std::size_t k = 0; k < ctx.roots().root_count(); ++k) {
    if (ctx.kappa()[k] == 0.0) {
      out.emplace_back(f.dimension());
    } else {
      out.push_back(reflection_quotient(ctx, k, f));
    }
  }
  return out;
}

template <class T>
BasicPolynomial<T> assemble(const OperatorContext& ctx, int i, const BasicPolynomial<T>& f,
                            const std::vector<BasicPolynomial<T>>& q) {
  BasicPolynomial<T> out = partial_derivative(f, i);
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (q[k].is_zero()) continue;
    const T ui = ctx.direction_as<T>(k)[i];
    if (ui == T(0)) continue;
    out += (ctx.kappa_as<T>(k) * ui) * q[k];
  }
  return out;
}

}  // namespace

template <class T>
BasicPolynomial<T> dunkl_derivative(const OperatorContext& ctx, int i, const BasicPolynomial<T>& f) {
  if (i < 0 || i >= ctx.dimension()) throw std::out_of_range("Dunkl operator index out of range");
  return assemble(ctx, i, f, quotients(ctx, f));
}

template <class T>
std::vector<BasicPolynomial<T>> dunkl_gradient(const OperatorContext& ctx, const BasicPolynomial<T>& f) {
  const auto q = quotients(ctx, f);
  std::vector<BasicPolynomial<T>> out;
  for (int i = 0; i < ctx.dimension(); ++i) out.push_back(assemble(ctx, i, f, q));
  return out;
}

template <class T>
BasicPolynomial<T> dunkl_laplacian(const OperatorContext& ctx, const BasicPolynomial<T>& f) {
  const auto grad = dunkl_gradient(ctx, f);
  BasicPolynomial<T> out(f.dimension());
  for (int i = 0; i < ctx.dimension(); ++i) out += dunkl_derivative(ctx, i, grad[i]);
  return out;
}

template <class T>
BasicPolynomial<T> angular_derivative(int i, int j, const BasicPolynomial<T>& f) {
  const int d = f.dimension();
  if (i < 0 || j < 0 || i >= d || j >= d) throw std::out_of_range("angular derivative index out of range");
  if (i == j) return BasicPolynomial<T>(d);
  return BasicPolynomial<T>::variable(d, j) * partial_derivative(f, i) -
         BasicPolynomial<T>::variable(d, i) * partial_derivative(f, j);
}

Polynomial difference_operator(const OperatorContext& ctx, std::size_t root, const Polynomial& f) {
  return reflection_quotient(ctx, root, f);
}

template <class T>
BasicPolynomial<T> sphere_laplacian_polynomial(const OperatorContext& ctx, const BasicPolynomial<T>& f) {
  T lambda;
  if constexpr (std::is_same_v<T, Rational>) {
    lambda = ctx.rational_lambda();
  } else {
    lambda = ctx.lambda();
  }
  BasicPolynomial<T> out(f.dimension());
  const auto parts = homogeneous_components(f);
  for (std::size_t n = 0; n < parts.size(); ++n) {
    if (parts[n].is_zero()) continue;
    const T nn = T(static_cast<long long>(n));
    out += dunkl_laplacian(ctx, parts[n]);
    out -= (nn * (nn + 2 * lambda)) * parts[n];
  }
  return out;
}

template <class T>
std::vector<BasicPolynomial<T>> sphere_gradient_polynomial(const OperatorContext& ctx, const BasicPolynomial<T>& f) {
  const int d = f.dimension();
  std::vector<BasicPolynomial<T>> out(d, BasicPolynomial<T>(d));
  const auto parts = homogeneous_components(f);
  for (std::size_t n = 0; n < parts.size(); ++n) {
    if (parts[n].is_zero()) continue;
    const auto grad = dunkl_gradient(ctx, parts[n]);
    const T nn = T(static_cast<long long>(n));
    for (int i = 0; i < d; ++i) {
      out[i] += grad[i];
      out[i] -= nn * (BasicPolynomial<T>::variable(d, i) * parts[n]);
    }
  }
  return out;
}

template <class T>
BasicPolynomial<T> radial_component(const std::vector<BasicPolynomial<T>>& field) {
  if (field.empty()) throw std::invalid_argument("empty vector field");
  const int d = field.front().dimension();
  BasicPolynomial<T> out(d);
  for (int i = 0; i < d; ++i) out += BasicPolynomial<T>::variable(d, i) * field[i];
  return out;
}

#define DUNKL_INSTANTIATE(T)                                                                                       \
  template BasicPolynomial<T> reflection_quotient(const OperatorContext&, std::size_t, const BasicPolynomial<T>&); \
  template BasicPolynomial<T> dunkl_derivative(const OperatorContext&, int, const BasicPolynomial<T>&);          \
  template std::vector<BasicPolynomial<T>> dunkl_gradient(const OperatorContext&, const BasicPolynomial<T>&);    \
  template BasicPolynomial<T> dunkl_laplacian(const OperatorContext&, const BasicPolynomial<T>&);                \
  template BasicPolynomial<T> angular_derivative(int, int, const BasicPolynomial<T>&);                           \
  template BasicPolynomial<T> sphere_laplacian_polynomial(const OperatorContext&, const BasicPolynomial<T>&);    \
  template std::vector<BasicPolynomial<T>> sphere_gradient_polynomial(const OperatorContext&,                    \
                                                                      const BasicPolynomial<T>&);                \
  template BasicPolynomial<T> radial_component(const std::vector<BasicPolynomial<T>>&);

DUNKL_INSTANTIATE(double)
DUNKL_INSTANTIATE(Rational)

#undef DUNKL_INSTANTIATE

}  // namespace dunkl
