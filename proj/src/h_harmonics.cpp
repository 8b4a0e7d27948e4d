#include "dunkl/h_harmonics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace dunkl {

namespace {

long long binomial(long long n, long long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  long long r = 1;
  for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

long long harmonic_dimension(int dimension, int n) {
  if (n < 0) return 0;
  return binomial(n + dimension - 1, dimension - 1) - binomial(n + dimension - 3, dimension - 1);
}

HarmonicSystem::HarmonicSystem(std::shared_ptr<const SphereIntegrator> integrator,
                               std::shared_ptr<const OperatorContext> operators)
    : integrator_(std::move(integrator)), operators_(std::move(operators)) {
  if (!integrator_ || !operators_) throw std::invalid_argument("harmonic system needs an integrator and operators");
  if (integrator_->dimension() != operators_->dimension()) throw std::invalid_argument("dimension mismatch");
}

std::shared_ptr<HarmonicSystem> HarmonicSystem::create(const RootSystem& roots, const Multiplicity& kappa,
                                                       IntegrationOptions options) {
  return std::make_shared<HarmonicSystem>(std::make_shared<const SphereIntegrator>(roots, kappa, options),
                                          std::make_shared<const OperatorContext>(roots, kappa));
}

const HarmonicBasis& HarmonicSystem::basis(int n) const {
  if (n < 0) throw std::invalid_argument("negative harmonic degree");
  std::lock_guard lock(mutex_);
  if (static_cast<int>(bases_.size()) <= n) bases_.resize(n + 1);
  if (!bases_[n]) bases_[n] = std::make_unique<HarmonicBasis>(build(n));
  return *bases_[n];
}

HarmonicBasis HarmonicSystem::build(int n) const {
  const int d = dimension();
  const std::vector<Exponent> exps = exponents_of_degree(d, n);
  const int m = static_cast<int>(exps.size());
  std::map<Exponent, int> index;
  for (int a = 0; a < m; ++a) index.emplace(exps[a], a);

  Eigen::MatrixXd gram(m, m);
  Exponent sum(d);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      for (int i = 0; i < d; ++i) sum[i] = exps[a][i] + exps[b][i];
      gram(a, b) = gram(b, a) = integrator_->moment(sum);
    }

  HarmonicBasis out;
  out.degree = n;
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff(), hi = eig.eigenvalues().maxCoeff();
    out.gram_condition = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
  }
  if (!(out.gram_condition <= kMaxGramCondition)) {
    throw std::runtime_error("Gram matrix of degree " + std::to_string(n) +
                             " monomials is too ill-conditioned; lower the degree or use smaller multiplicities");
  }

  // Lower-degree harmonics lifted to degree n by powers of ‖x‖².
  std::vector<Eigen::VectorXd> lower;
  for (int k = 1; 2 * k <= n; ++k) {
    const Polynomial r2k = norm_squared_power<double>(d, k);
    for (const Polynomial& y : basis(n - 2 * k).elements) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
      const Polynomial lifted = r2k * y;
      for (const auto& [e, c] : lifted.terms()) v[index.at(e)] += c;
      lower.push_back(std::move(v));
    }
  }
  Eigen::MatrixXd low(m, static_cast<Eigen::Index>(lower.size()));
  for (std::size_t j = 0; j < lower.size(); ++j) low.col(static_cast<Eigen::Index>(j)) = lower[j];

  auto ip = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v) { return u.dot(gram * v); };

  Eigen::MatrixXd residual = Eigen::MatrixXd::Identity(m, m);
  for (int pass = 0; pass < 2; ++pass) residual -= low * (low.transpose() * gram * residual);

  const int target = static_cast<int>(harmonic_dimension(d, n));
  std::vector<bool> used(m, false);
  std::vector<Eigen::VectorXd> accepted;
  out.smallest_pivot = 1.0;
  for (int step = 0; step < target; ++step) {
    int best = -1;
    double best_rel = -1.0;
    for (int a = 0; a < m; ++a) {
      if (used[a]) continue;
      const double rel = std::sqrt(std::max(0.0, ip(residual.col(a), residual.col(a))) / gram(a, a));
      if (rel > best_rel) {
        best_rel = rel;
        best = a;
      }
    }
    if (best < 0) break;
    used[best] = true;
    Eigen::VectorXd q = residual.col(best);
    // Reorthogonalization pass against everything accepted so far.
    q -= low * (low.transpose() * (gram * q));
    for (const auto& p : accepted) q -= ip(p, q) * p;
    const double norm = std::sqrt(std::max(0.0, ip(q, q)));
    out.smallest_pivot = std::min(out.smallest_pivot, norm / std::sqrt(gram(best, best)));
    if (out.smallest_pivot < 1e-11) {
      throw std::runtime_error("h-harmonic construction lost rank at degree " + std::to_string(n));
    }
    q /= norm;
    for (int a = 0; a < m; ++a) {
      if (used[a]) continue;
      residual.col(a) -= ip(q, residual.col(a)) * q;
    }
    accepted.push_back(std::move(q));
  }

  out.coefficients.resize(m, static_cast<Eigen::Index>(accepted.size()));
  for (std::size_t j = 0; j < accepted.size(); ++j) {
    out.coefficients.col(static_cast<Eigen::Index>(j)) = accepted[j];
    Polynomial y(d);
    const double scale = accepted[j].cwiseAbs().maxCoeff();
    for (int a = 0; a < m; ++a) {
      if (std::abs(accepted[j][a]) > 1e-15 * scale) y.add_term(exps[a], accepted[j][a]);
    }
    out.elements.push_back(std::move(y));
  }
  const Eigen::MatrixXd q = out.coefficients;
  out.orthonormality_error =
      q.cols() == 0 ? 0.0
                    : (q.transpose() * gram * q - Eigen::MatrixXd::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
  return out;
}

double HarmonicSystem::reproducing_kernel(int n, const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  double s = 0.0;
  for (const Polynomial& p : basis(n).elements) {
    s += p.evaluate<double>(std::span<const double>(x.data(), x.size())) *
         p.evaluate<double>(std::span<const double>(y.data(), y.size()));
  }
  return s;
}

SphereFunction::SphereFunction(std::shared_ptr<const HarmonicSystem> system, std::vector<Eigen::VectorXd> components)
    : system_(std::move(system)), components_(std::move(components)) {
  if (!system_) throw std::invalid_argument("sphere function needs a harmonic system");
  if (components_.empty()) components_.push_back(Eigen::VectorXd::Zero(1));
  for (std::size_t n = 0; n < components_.size(); ++n) {
    if (components_[n].size() != harmonic_dimension(system_->dimension(), static_cast<int>(n))) {
      throw std::invalid_argument("component size does not match dim H_n");
    }
  }
}

SphereFunction SphereFunction::from_polynomial(std::shared_ptr<const HarmonicSystem> system, const Polynomial& f) {
  if (f.dimension() != system->dimension()) throw std::invalid_argument("polynomial has wrong dimension");
  const int top = std::max(f.degree(), 0);
  std::vector<Eigen::VectorXd> comps;
  for (int n = 0; n <= top; ++n) {
    const auto& b = system->basis(n);
    Eigen::VectorXd c(static_cast<Eigen::Index>(b.elements.size()));
    for (std::size_t i = 0; i < b.elements.size(); ++i) {
      c[static_cast<Eigen::Index>(i)] = system->integrator().inner_product(f, b.elements[i]);
    }
    comps.push_back(std::move(c));
  }
  return SphereFunction(std::move(system), std::move(comps));
}

Polynomial SphereFunction::component_polynomial(int n) const {
  Polynomial p(system_->dimension());
  if (n > max_degree()) return p;
  const auto& b = system_->basis(n);
  for (std::size_t i = 0; i < b.elements.size(); ++i) {
    const double c = components_[n][static_cast<Eigen::Index>(i)];
    if (c != 0.0) p += c * b.elements[i];
  }
  return p;
}

Polynomial SphereFunction::to_polynomial() const {
  Polynomial p(system_->dimension());
  for (int n = 0; n <= max_degree(); ++n) p += component_polynomial(n);
  return p;
}

double SphereFunction::evaluate(const Eigen::VectorXd& x) const {
  double s = 0.0;
  const std::span<const double> pt(x.data(), x.size());
  for (int n = 0; n <= max_degree(); ++n) {
    const auto& b = system_->basis(n);
    for (std::size_t i = 0; i < b.elements.size(); ++i) {
      const double c = components_[n][static_cast<Eigen::Index>(i)];
      if (c != 0.0) s += c * b.elements[i].evaluate<double>(pt);
    }
  }
  return s;
}

void SphereFunction::check_compatible(const SphereFunction& g) const {
  if (system_ != g.system_) throw std::invalid_argument("sphere functions belong to different harmonic systems");
}

double SphereFunction::inner_product(const SphereFunction& g) const {
  check_compatible(g);
  double s = 0.0;
  const int top = std::min(max_degree(), g.max_degree());
  for (int n = 0; n <= top; ++n) s += components_[n].dot(g.components_[n]);
  return s;
}

double SphereFunction::norm() const { return std::sqrt(std::max(0.0, norm_squared())); }

double SphereFunction::dirichlet_energy() const {
  double s = 0.0;
  for (int n = 1; n <= max_degree(); ++n) s += system_->eigenvalue(n) * components_[n].squaredNorm();
  return s;
}

SphereFunction SphereFunction::spectral_map(const std::function<double(int)>& multiplier) const {
  SphereFunction out = *this;
  for (int n = 0; n <= max_degree(); ++n) out.components_[n] *= multiplier(n);
  return out;
}

SphereFunction& SphereFunction::operator+=(const SphereFunction& g) {
  check_compatible(g);
  for (int n = max_degree() + 1; n <= g.max_degree(); ++n) {
    components_.push_back(Eigen::VectorXd::Zero(g.components_[n].size()));
  }
  for (int n = 0; n <= g.max_degree(); ++n) components_[n] += g.components_[n];
  return *this;
}

SphereFunction& SphereFunction::operator-=(const SphereFunction& g) {
  SphereFunction neg = g;
  neg *= -1.0;
  return *this += neg;
}

SphereFunction& SphereFunction::operator*=(double s) {
  for (auto& c : components_) c *= s;
  return *this;
}

SphereFunction project(std::shared_ptr<const HarmonicSystem> system, const Polynomial& f, int n) {
  SphereFunction full = SphereFunction::from_polynomial(std::move(system), f);
  return full.spectral_map([n](int k) { return k == n ? 1.0 : 0.0; });
}

SphereFunction fractional_laplacian(const SphereFunction& f, double alpha) {
  if (alpha < 0.0 && f.component(0).norm() > 1e-10) {
    throw std::domain_error("negative fractional power of a function with nonzero mean");
  }
  const HarmonicSystem& sys = f.system();
  return f.spectral_map([&](int n) {
    if (n == 0) return alpha == 0.0 ? 1.0 : 0.0;
    return std::pow(sys.eigenvalue(n), alpha);
  });
}

SphereFunction sphere_laplacian(std::shared_ptr<const HarmonicSystem> system, const Polynomial& f) {
  const Polynomial lap = sphere_laplacian_polynomial(system->operators(), f);
  return SphereFunction::from_polynomial(std::move(system), lap);
}

std::vector<SphereFunction> sphere_gradient(std::shared_ptr<const HarmonicSystem> system, const Polynomial& f) {
  std::vector<SphereFunction> out;
  for (const Polynomial& g : sphere_gradient_polynomial(system->operators(), f)) {
    out.push_back(SphereFunction::from_polynomial(system, g));
  }
  return out;
}

}  // namespace dunkl
