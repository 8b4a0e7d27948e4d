#include "dunkl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace dunkl {

GaussRule gauss_jacobi(int n, double alpha, double beta) {
  if (n < 0) throw std::invalid_argument("negative rule size");
  if (alpha <= -1.0 || beta <= -1.0) throw std::invalid_argument("Jacobi parameters must exceed -1");
  GaussRule rule;
  if (n == 0) return rule;
  const double s = alpha + beta;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  J(0, 0) = (beta - alpha) / (s + 2.0);
  for (int k = 1; k < n; ++k) {
    const double c = 2.0 * k + s;
    J(k, k) = (beta * beta - alpha * alpha) / (c * (c + 2.0));
    double b2;
    if (k == 1) {
      b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + s) * (2.0 + s) * (3.0 + s));
    } else {
      b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + s) / (c * c * (c + 1.0) * (c - 1.0));
    }
    J(k, k - 1) = J(k - 1, k) = std::sqrt(b2);
  }
  const double mu0 = std::exp((s + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                              std::lgamma(s + 2.0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = eig.eigenvalues()[i];
    const double v0 = eig.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

GaussRule gauss_legendre(int n, double a, double b) {
  GaussRule rule = gauss_jacobi(n, 0.0, 0.0);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

double sphere_area(int dimension) {
  return 2.0 * std::pow(std::numbers::pi, dimension / 2.0) / std::tgamma(dimension / 2.0);
}

SphereRule sphere_product_rule(int dimension, int degree) {
  if (dimension < 1) throw std::invalid_argument("sphere dimension must be positive");
  degree = std::max(degree, 0);
  SphereRule rule;
  if (dimension == 1) {
    rule.nodes.resize(1, 2);
    rule.nodes << 1.0, -1.0;
    rule.weights = Eigen::VectorXd::Ones(2);
    return rule;
  }
  if (dimension == 2) {
    const int m = degree + 1;
    rule.nodes.resize(2, m);
    rule.weights = Eigen::VectorXd::Constant(m, 2.0 * std::numbers::pi / m);
    for (int k = 0; k < m; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / m;
      rule.nodes(0, k) = std::cos(phi);
      rule.nodes(1, k) = std::sin(phi);
    }
    return rule;
  }
  const double a = (dimension - 3) / 2.0;
  const GaussRule t = gauss_jacobi(degree / 2 + 1, a, a);
  const SphereRule inner = sphere_product_rule(dimension - 1, degree);
  const Eigen::Index total = static_cast<Eigen::Index>(t.nodes.size()) * inner.size();
  rule.nodes.resize(dimension, total);
  rule.weights.resize(total);
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const double s = std::sqrt(std::max(0.0, 1.0 - t.nodes[i] * t.nodes[i]));
    for (Eigen::Index j = 0; j < inner.size(); ++j, ++col) {
      rule.nodes(0, col) = t.nodes[i];
      rule.nodes.col(col).tail(dimension - 1) = s * inner.nodes.col(j);
      rule.weights[col] = t.weights[i] * inner.weights[j];
    }
  }
  return rule;
}

namespace {

// Orthonormal basis of the complement of the unit vector u (columns).
Eigen::MatrixXd orthogonal_complement(const Eigen::VectorXd& u) {
  const auto d = u.size();
  Eigen::Index k = 0;
  u.cwiseAbs().maxCoeff(&k);
  Eigen::MatrixXd m(d, d);
  m.col(0) = u;
  Eigen::Index c = 1;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (j == k) continue;
    m.col(c++) = Eigen::VectorXd::Unit(d, j);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(d - 1);
}

}  // namespace

SphereRule sphere_band_rule(const Eigen::VectorXd& axis, double theta_lo, double theta_hi, int theta_points,
                            int inner_degree) {
  const int d = static_cast<int>(axis.size());
  if (d < 2) throw std::invalid_argument("band rules need d >= 2");
  const Eigen::VectorXd u = axis.normalized();
  const Eigen::MatrixXd q = orthogonal_complement(u);
  const GaussRule th = gauss_legendre(theta_points, theta_lo, theta_hi);
  const SphereRule inner = sphere_product_rule(d - 1, inner_degree);
  SphereRule rule;
  const Eigen::Index total = static_cast<Eigen::Index>(th.nodes.size()) * inner.size();
  rule.nodes.resize(d, total);
  rule.weights.resize(total);
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < th.nodes.size(); ++i) {
    const double c = std::cos(th.nodes[i]), s = std::sin(th.nodes[i]);
    const double jac = std::pow(s, d - 2);
    for (Eigen::Index j = 0; j < inner.size(); ++j, ++col) {
      rule.nodes.col(col) = c * u + s * (q * inner.nodes.col(j));
      rule.weights[col] = th.weights[i] * jac * inner.weights[j];
    }
  }
  return rule;
}

namespace {

struct Adaptive1D {
  const AdaptiveOptions& options;
  GaussRule base;  // on [-1, 1]
  long long* evaluations;
  bool* converged;

  template <class G>
  Eigen::VectorXd panel(const G& g, double a, double b, int components) const {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(components);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
      sum += base.weights[i] * g(mid + half * base.nodes[i]);
      ++*evaluations;
    }
    return half * sum;
  }

  template <class G>
  Eigen::VectorXd refine(const G& g, double a, double b, const Eigen::VectorXd& whole, double tol, int depth,
                         double& error) const {
    const double m = 0.5 * (a + b);
    const int comps = static_cast<int>(whole.size());
    Eigen::VectorXd left = panel(g, a, m, comps);
    Eigen::VectorXd right = panel(g, m, b, comps);
    Eigen::VectorXd sum = left + right;
    const double err = comps == 0 ? 0.0 : (sum - whole).cwiseAbs().maxCoeff();
    const double floor = comps == 0 ? 0.0 : options.relative_floor * sum.cwiseAbs().maxCoeff();
    if (err <= std::max(tol, floor) || depth >= options.max_depth || b - a < 1e-15) {
      if (err > tol) *converged = false;
      error += err;
      return sum;
    }
    return refine(g, a, m, left, 0.5 * tol, depth + 1, error) + refine(g, m, b, right, 0.5 * tol, depth + 1, error);
  }

  template <class G>
  Eigen::VectorXd integrate(const G& g, std::vector<double> breaks, int components, double& error) const {
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(), [](double x, double y) { return std::abs(x - y) < 1e-14; }),
                 breaks.end());
    Eigen::VectorXd total = Eigen::VectorXd::Zero(components);
    const double length = breaks.back() - breaks.front();
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      const double a = breaks[i], b = breaks[i + 1];
      if (b - a <= 0.0) continue;
      const double tol = options.tolerance * (b - a) / length;
      total += refine(g, a, b, panel(g, a, b, components), tol, 0, error);
    }
    return total;
  }
};

// Angles in [lo, hi] where A cos t + B sin t = C.
void trig_roots(double A, double B, double C, double lo, double hi, std::vector<double>& out) {
  const double R = std::hypot(A, B);
  if (R < 1e-300 || std::abs(C) > R) return;
  const double phi = std::atan2(B, A);
  const double delta = std::acos(std::clamp(C / R, -1.0, 1.0));
  for (double t : {phi + delta, phi - delta}) {
    for (int k = -2; k <= 2; ++k) {
      const double u = t + 2.0 * std::numbers::pi * k;
      if (u > lo && u < hi) out.push_back(u);
    }
  }
}

struct NestedSphere {
  int dimension;
  int components;
  const SphereIntegrand& f;
  const std::vector<Eigen::VectorXd>& planes;
  Adaptive1D adapt;
  double error = 0.0;

  Eigen::VectorXd slice(Eigen::VectorXd& x, int j, double s) {
    const int k = dimension - j;
    // Offsets c_v = Σ_{i<j} x_i v_i of each hyperplane within this slice.
    auto offset = [&](const Eigen::VectorXd& v) { return x.head(j).dot(v.head(j)); };
    if (k == 1) {
      x[j] = s;
      Eigen::VectorXd r = f(x);
      x[j] = -s;
      r += f(x);
      return r;
    }
    if (k == 2) {
      std::vector<double> breaks{0.0, 2.0 * std::numbers::pi};
      for (const auto& v : planes) trig_roots(s * v[j], s * v[j + 1], -offset(v), 0.0, 2.0 * std::numbers::pi, breaks);
      auto g = [&](double phi) -> Eigen::VectorXd {
        x[j] = s * std::cos(phi);
        x[j + 1] = s * std::sin(phi);
        return f(x);
      };
      double scratch = 0.0;
      return adapt.integrate(g, breaks, components, j == 0 ? error : scratch);
    }
    std::vector<double> breaks{0.0, std::numbers::pi};
    for (const auto& v : planes) {
      const double tail = v.tail(k - 1).norm();
      const double c = offset(v);
      trig_roots(s * v[j], -s * tail, -c, 0.0, std::numbers::pi, breaks);
      trig_roots(s * v[j], s * tail, -c, 0.0, std::numbers::pi, breaks);
    }
    auto g = [&](double theta) -> Eigen::VectorXd {
      const double st = std::sin(theta);
      x[j] = s * std::cos(theta);
      Eigen::VectorXd inner = slice(x, j + 1, s * st);
      return std::pow(st, k - 2) * inner;
    };
    double scratch = 0.0;
    return adapt.integrate(g, breaks, components, j == 0 ? error : scratch);
  }
};

}  // namespace

AdaptiveResult adaptive_sphere_integrate(int dimension, int components, const SphereIntegrand& f,
                                         const std::vector<Eigen::VectorXd>& hyperplanes,
                                         const AdaptiveOptions& options) {
  if (dimension < 2) throw std::invalid_argument("adaptive sphere integration needs d >= 2");
  AdaptiveResult result;
  Adaptive1D adapt{options, gauss_jacobi(options.panel_points, 0.0, 0.0), &result.evaluations, &result.converged};
  NestedSphere nested{dimension, components, f, hyperplanes, adapt};
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dimension);
  result.value = nested.slice(x, 0, 1.0);
  result.error_estimate = nested.error;
  return result;
}

MonteCarloResult monte_carlo_sphere(int dimension, const std::function<double(const Eigen::VectorXd&)>& f,
                                    std::int64_t samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("Monte-Carlo needs at least two samples");
  std::mt19937_64 rng(seed);
  // Welford accumulation.
  double mean = 0.0, m2 = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const double v = f(random_sphere_point(dimension, rng));
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  const double area = sphere_area(dimension);
  const double variance = m2 / static_cast<double>(samples - 1);
  MonteCarloResult r;
  r.mean = area * mean;
  r.standard_error = area * std::sqrt(variance / static_cast<double>(samples));
  r.samples = samples;
  return r;
}

}  // namespace dunkl
