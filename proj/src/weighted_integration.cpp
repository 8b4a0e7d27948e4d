#include "dunkl/weighted_integration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dunkl {

std::string to_string(IntegrationMode mode) {
  switch (mode) {
    case IntegrationMode::Automatic: return "automatic";
    case IntegrationMode::ExactMoments: return "exact-moments";
    case IntegrationMode::PolynomialWeightExact: return "polynomial-weight-exact";
    case IntegrationMode::Gauss: return "gauss";
    case IntegrationMode::Adaptive: return "adaptive-numeric";
  }
  return "automatic";
}

IntegrationMode parse_integration_mode(std::string_view name) {
  if (name == "auto" || name == "automatic") return IntegrationMode::Automatic;
  if (name == "exact" || name == "exact-moments") return IntegrationMode::ExactMoments;
  if (name == "polynomial-weight" || name == "polynomial-weight-exact") return IntegrationMode::PolynomialWeightExact;
  if (name == "gauss") return IntegrationMode::Gauss;
  if (name == "adaptive" || name == "adaptive-numeric") return IntegrationMode::Adaptive;
  throw std::invalid_argument("unknown integration mode '" + std::string(name) + "'");
}

double sphere_monomial_integral(const Exponent& e, std::span<const double> b) {
  const int d = static_cast<int>(e.size());
  if (static_cast<int>(b.size()) != d) throw std::invalid_argument("exponent size mismatch");
  double total = 0.0;
  for (int i = 0; i < d; ++i) {
    if (e[i] % 2 != 0) return 0.0;
    total += e[i] + b[i];
  }
  const double top = (total + d) / 2.0;
  if (top < 150.0) {
    double num = 2.0;
    for (int i = 0; i < d; ++i) num *= std::tgamma((e[i] + b[i] + 1.0) / 2.0);
    return num / std::tgamma(top);
  }
  double lg = std::log(2.0) - std::lgamma(top);
  for (int i = 0; i < d; ++i) lg += std::lgamma((e[i] + b[i] + 1.0) / 2.0);
  return std::exp(lg);
}

namespace {

bool is_integer(double k) { return k == std::floor(k); }

int axis_of(const Eigen::VectorXd& v) {
  int axis = -1;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-14) {
      if (axis >= 0) return -1;
      axis = static_cast<int>(i);
    }
  }
  return axis;
}

Polynomial linear_form(const Eigen::VectorXd& v) {
  const int d = static_cast<int>(v.size());
  Polynomial p(d);
  for (int i = 0; i < d; ++i) {
    Exponent e(d, 0);
    e[i] = 1;
    p.add_term(e, v[i]);
  }
  return p;
}

double monomial_value(const Exponent& e, const double* x) {
  double v = 1.0;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (int k = 0; k < e[i]; ++k) v *= x[i];
  return v;
}

}  // namespace

SphereIntegrator::SphereIntegrator(RootSystem roots, Multiplicity kappa, IntegrationOptions options)
    : roots_(std::move(roots)), kappa_(std::move(kappa)), options_(options) {
  const int d = roots_.dimension();
  if (kappa_.size() != roots_.root_count()) throw std::invalid_argument("multiplicity does not match root system");
  axis_exponent_.assign(d, 0.0);
  rest_ = Polynomial::constant(d, 1.0);
  const auto rs = roots_.positive_roots();
  double twice_total = 0.0;
  for (std::size_t k = 0; k < rs.size(); ++k) {
    const double kv = kappa_[k];
    if (kv == 0.0) continue;
    twice_total += 2.0 * kv;
    if (!is_integer(kv)) weight_polynomial_ = false;
    const int axis = axis_of(rs[k].vector);
    if (axis >= 0) {
      axis_exponent_[axis] += 2.0 * kv;
      axis_factor_ *= std::pow(std::abs(rs[k].vector[axis]), 2.0 * kv);
    } else if (is_integer(kv)) {
      const Polynomial l2 = [&] {
        Polynomial l = linear_form(rs[k].vector);
        return l * l;
      }();
      for (int i = 0; i < static_cast<int>(kv); ++i) rest_ = rest_ * l2;
    } else {
      closed_form_ = false;
    }
  }
  weight_degree_ = static_cast<int>(std::ceil(twice_total - 1e-12));

  const bool rest_constant = rest_.degree() <= 0;
  switch (options_.mode) {
    case IntegrationMode::Automatic:
      if (!closed_form_) {
        mode_ = IntegrationMode::Adaptive;
      } else {
        mode_ = rest_constant ? IntegrationMode::ExactMoments : IntegrationMode::PolynomialWeightExact;
      }
      break;
    case IntegrationMode::ExactMoments:
      if (!closed_form_ || !rest_constant) {
        throw std::invalid_argument("exact-moments mode requires a weight made of coordinate factors (Z2^d type)");
      }
      mode_ = IntegrationMode::ExactMoments;
      break;
    case IntegrationMode::PolynomialWeightExact:
      if (!closed_form_) {
        throw std::invalid_argument("polynomial-weight mode requires integer multiplicities off the coordinate axes");
      }
      mode_ = IntegrationMode::PolynomialWeightExact;
      break;
    default:
      mode_ = options_.mode;
  }
}

std::vector<Eigen::VectorXd> SphereIntegrator::singular_hyperplanes() const {
  std::vector<Eigen::VectorXd> out;
  const auto rs = roots_.positive_roots();
  for (std::size_t k = 0; k < rs.size(); ++k) {
    if (!is_integer(kappa_[k])) out.push_back(rs[k].vector);
  }
  return out;
}

double SphereIntegrator::closed_form_moment(const Exponent& alpha, int abs_coordinate) const {
  if (!closed_form_) throw std::logic_error("no closed-form moments for this weight");
  std::vector<double> b = axis_exponent_;
  if (abs_coordinate >= 0) b[abs_coordinate] += 1.0;
  const int d = dimension();
  Exponent e(d);
  double sum = 0.0;
  for (const auto& [t, c] : rest_.terms()) {
    for (int i = 0; i < d; ++i) e[i] = alpha[i] + t[i];
    sum += c * sphere_monomial_integral(e, b);
  }
  return axis_factor_ * sum;
}

const SphereRule& SphereIntegrator::weighted_rule(int degree) const {
  std::lock_guard lock(mutex_);
  auto it = rules_.find(degree);
  if (it != rules_.end()) return *it->second;
  auto rule = std::make_unique<SphereRule>(sphere_product_rule(dimension(), degree));
  for (Eigen::Index k = 0; k < rule->size(); ++k) {
    const Eigen::VectorXd x = rule->nodes.col(k);
    rule->weights[k] *= weight_squared_eval(roots_, kappa_, x);
  }
  return *rules_.emplace(degree, std::move(rule)).first->second;
}

void SphereIntegrator::fill_numeric_degree(int degree, int abs_coordinate) const {
  const int d = dimension();
  const std::vector<Exponent> exps = exponents_of_degree(d, degree);
  const int count = static_cast<int>(exps.size());
  Eigen::VectorXd values;
  if (mode_ == IntegrationMode::Gauss) {
    int rule_degree = degree + weight_degree_;
    if (!weight_polynomial_ || abs_coordinate >= 0) rule_degree += options_.gauss_extra_degree;
    const SphereRule& rule = weighted_rule(rule_degree);
    values = Eigen::VectorXd::Zero(count);
    for (Eigen::Index k = 0; k < rule.size(); ++k) {
      const double* x = rule.nodes.col(k).data();
      double w = rule.weights[k];
      if (abs_coordinate >= 0) w *= std::abs(x[abs_coordinate]);
      for (int j = 0; j < count; ++j) values[j] += w * monomial_value(exps[j], x);
    }
  } else {
    auto planes = singular_hyperplanes();
    if (abs_coordinate >= 0) planes.push_back(Eigen::VectorXd::Unit(d, abs_coordinate));
    auto f = [&](const Eigen::VectorXd& x) {
      Eigen::VectorXd out(count);
      double w = weight_squared_eval(roots_, kappa_, x);
      if (abs_coordinate >= 0) w *= std::abs(x[abs_coordinate]);
      for (int j = 0; j < count; ++j) out[j] = w * monomial_value(exps[j], x.data());
      return out;
    };
    AdaptiveOptions opts;
    opts.tolerance = options_.adaptive_tolerance;
    const AdaptiveResult r = adaptive_sphere_integrate(d, count, f, planes, opts);
    values = r.value;
    std::lock_guard lock(mutex_);
    adaptive_error_ = std::max(adaptive_error_, r.error_estimate);
  }
  std::lock_guard lock(mutex_);
  auto& table = abs_coordinate >= 0 ? abs_moments_[{abs_coordinate, degree}] : moments_;
  for (int j = 0; j < count; ++j) table[exps[j]] = values[j];
}

double SphereIntegrator::numeric_moment(const Exponent& alpha, int abs_coordinate) const {
  fill_numeric_degree(total_degree(alpha), abs_coordinate);
  std::lock_guard lock(mutex_);
  return abs_coordinate >= 0 ? abs_moments_[{abs_coordinate, total_degree(alpha)}].at(alpha) : moments_.at(alpha);
}

double SphereIntegrator::moment(const Exponent& alpha) const {
  if (static_cast<int>(alpha.size()) != dimension()) throw std::invalid_argument("moment exponent has wrong size");
  {
    std::lock_guard lock(mutex_);
    auto it = moments_.find(alpha);
    if (it != moments_.end()) return it->second;
  }
  if (mode_ == IntegrationMode::ExactMoments || mode_ == IntegrationMode::PolynomialWeightExact) {
    const double v = closed_form_moment(alpha, -1);
    std::lock_guard lock(mutex_);
    moments_.emplace(alpha, v);
    return v;
  }
  return numeric_moment(alpha, -1);
}

double SphereIntegrator::abs_moment(const Exponent& alpha, int abs_coordinate) const {
  if (abs_coordinate < 0 || abs_coordinate >= dimension()) throw std::out_of_range("coordinate out of range");
  const std::pair<int, int> key{abs_coordinate, total_degree(alpha)};
  {
    std::lock_guard lock(mutex_);
    auto t = abs_moments_.find(key);
    if (t != abs_moments_.end()) {
      auto it = t->second.find(alpha);
      if (it != t->second.end()) return it->second;
    }
  }
  if (closed_form_ && mode_ != IntegrationMode::Gauss && mode_ != IntegrationMode::Adaptive) {
    const double v = closed_form_moment(alpha, abs_coordinate);
    std::lock_guard lock(mutex_);
    abs_moments_[key].emplace(alpha, v);
    return v;
  }
  return numeric_moment(alpha, abs_coordinate);
}

double SphereIntegrator::integrate(const Polynomial& p) const {
  if (p.dimension() != dimension()) throw std::invalid_argument("integrand has wrong dimension");
  double sum = 0.0;
  for (const auto& [e, c] : p.terms()) sum += c * moment(e);
  return sum;
}

double SphereIntegrator::inner_product(const Polynomial& f, const Polynomial& g) const {
  return integrate(f * g);
}

double SphereIntegrator::norm_squared(const Polynomial& f) const {
  if (f.is_zero()) return 0.0;
  const std::span<const double>::size_type d = dimension();
  if (weight_polynomial_) {
    const SphereRule& rule = weighted_rule(2 * f.degree() + weight_degree_);
    double sum = 0.0;
    for (Eigen::Index k = 0; k < rule.size(); ++k) {
      const double v = f.evaluate<double>(std::span<const double>(rule.nodes.col(k).data(), d));
      sum += rule.weights[k] * v * v;
    }
    return sum;
  }
  if (closed_form_) {
    // Moments of f², unless cancellation could cost more than ~1e-10 relative
    // (or 1e-13 absolute in the norm).
    double sum = 0.0, magnitude = 0.0;
    const Polynomial square = f * f;
    for (const auto& [e, c] : square.terms()) {
      const double term = c * moment(e);
      sum += term;
      magnitude += std::abs(term);
    }
    const double error = 64 * std::numeric_limits<double>::epsilon() * magnitude;
    if (error <= std::max(1e-10 * std::abs(sum), 1e-26)) return sum;
  }
  auto g = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd out(1);
    const double v = f.evaluate<double>(std::span<const double>(x.data(), d));
    out[0] = weight_squared_eval(roots_, kappa_, x) * v * v;
    return out;
  };
  AdaptiveOptions opts;
  opts.tolerance = options_.adaptive_tolerance * 1e-3;
  return adaptive_sphere_integrate(dimension(), 1, g, singular_hyperplanes(), opts).value[0];
}

double SphereIntegrator::norm(const Polynomial& f) const { return std::sqrt(std::max(0.0, norm_squared(f))); }

double SphereIntegrator::normalization_constant() const { return moment(Exponent(dimension(), 0)); }

double SphereIntegrator::integrate_closed_form(const Polynomial& p) const {
  double sum = 0.0;
  for (const auto& [e, c] : p.terms()) sum += c * closed_form_moment(e, -1);
  return sum;
}

double SphereIntegrator::integrate_gauss(const Polynomial& p) const {
  int degree = std::max(p.degree(), 0) + weight_degree_;
  if (!weight_polynomial_) degree += options_.gauss_extra_degree;
  const SphereRule& rule = weighted_rule(degree);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < rule.size(); ++k) {
    sum += rule.weights[k] * p.evaluate<double>(std::span<const double>(rule.nodes.col(k).data(), dimension()));
  }
  return sum;
}

AdaptiveResult SphereIntegrator::integrate_adaptive(const Polynomial& p) const {
  auto f = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd out(1);
    out[0] = weight_squared_eval(roots_, kappa_, x) * p.evaluate<double>(std::span<const double>(x.data(), x.size()));
    return out;
  };
  AdaptiveOptions opts;
  opts.tolerance = options_.adaptive_tolerance;
  return adaptive_sphere_integrate(dimension(), 1, f, singular_hyperplanes(), opts);
}

MonteCarloResult SphereIntegrator::integrate_monte_carlo(const Polynomial& p, std::int64_t samples,
                                                         std::uint64_t seed) const {
  auto f = [&](const Eigen::VectorXd& x) {
    return weight_squared_eval(roots_, kappa_, x) * p.evaluate<double>(std::span<const double>(x.data(), x.size()));
  };
  return monte_carlo_sphere(dimension(), f, samples, seed);
}

double SphereIntegrator::cross_validate(int max_degree) const {
  double worst = 0.0;
  for (int n = 0; n <= max_degree; ++n) {
    for (const Exponent& e : exponents_of_degree(dimension(), n)) {
      const Polynomial p = Polynomial::monomial(e, 1.0);
      const double active = moment(e);
      double other;
      if (mode_ == IntegrationMode::ExactMoments || mode_ == IntegrationMode::PolynomialWeightExact) {
        other = weight_polynomial_ ? integrate_gauss(p) : integrate_adaptive(p).value[0];
      } else if (closed_form_) {
        other = integrate_closed_form(p);
      } else if (mode_ == IntegrationMode::Gauss) {
        other = integrate_adaptive(p).value[0];
      } else {
        other = integrate_gauss(p);
      }
      worst = std::max(worst, std::abs(active - other));
    }
  }
  return worst;
}

double SphereIntegrator::accuracy_estimate() const {
  const double scale = std::max(1.0, normalization_constant());
  switch (mode_) {
    case IntegrationMode::ExactMoments:
    case IntegrationMode::PolynomialWeightExact:
      return 1e-14 * scale;
    case IntegrationMode::Gauss:
      if (weight_polynomial_) return 1e-13 * scale;
      return std::abs(integrate_gauss(Polynomial::constant(dimension(), 1.0)) -
                      integrate_adaptive(Polynomial::constant(dimension(), 1.0)).value[0]);
    default: {
      std::lock_guard lock(mutex_);
      return std::max(adaptive_error_, options_.adaptive_tolerance);
    }
  }
}

}  // namespace dunkl
