#include "dunkl/root_system.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace dunkl {

std::string to_string(RootFamily family) {
  switch (family) {
    case RootFamily::Trivial: return "trivial";
    case RootFamily::Z2: return "Z2";
    case RootFamily::A: return "A";
    case RootFamily::B: return "B";
    case RootFamily::Dihedral: return "I2";
    case RootFamily::Custom: return "custom";
  }
  return "custom";
}

RootFamily parse_root_family(std::string_view name) {
  std::string s(name);
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (s == "trivial" || s == "none") return RootFamily::Trivial;
  if (s == "z2" || s == "z2^d" || s == "zz2") return RootFamily::Z2;
  if (s == "a" || s == "a_{d-1}" || s == "sym" || s == "symmetric") return RootFamily::A;
  if (s == "b" || s == "b_d" || s == "hyperoctahedral" || s == "h") return RootFamily::B;
  if (s == "i2" || s == "dihedral" || s == "i2(m)") return RootFamily::Dihedral;
  throw std::invalid_argument("unsupported root family '" + std::string(name) + "'");
}

std::optional<Rational> recognize_rational(double x, int max_den, double tol) {
  for (int q = 1; q <= max_den; ++q) {
    const double p = std::round(x * q);
    if (std::abs(x - p / q) <= tol) {
      return Rational(static_cast<long long>(p), q);
    }
  }
  return std::nullopt;
}

namespace {

std::optional<std::vector<Rational>> rational_direction(const Eigen::VectorXd& v) {
  // Scale so the largest entry is ±1, then recognize each entry.
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  const Eigen::VectorXd w = v / std::abs(v[k]);
  std::vector<Rational> out;
  out.reserve(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    auto r = recognize_rational(w[i]);
    if (!r) return std::nullopt;
    out.push_back(*r);
  }
  return out;
}

bool parallel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
  return (a - b).norm() <= tol || (a + b).norm() <= tol;
}

// Quantized key for hashing orthogonal matrices up to rounding.
std::vector<long long> matrix_key(const Eigen::MatrixXd& m) {
  std::vector<long long> key(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) key[i] = std::llround(m.data()[i] * 1e8);
  return key;
}

}  // namespace

Eigen::VectorXd reflect(const Eigen::VectorXd& v, const Eigen::VectorXd& x) {
  const double vv = v.squaredNorm();
  if (vv == 0.0) throw std::invalid_argument("reflection through the zero vector");
  return x - (2.0 * x.dot(v) / vv) * v;
}

Eigen::MatrixXd reflection_matrix(const Eigen::VectorXd& v) {
  const double vv = v.squaredNorm();
  if (vv == 0.0) throw std::invalid_argument("reflection through the zero vector");
  const auto d = v.size();
  return Eigen::MatrixXd::Identity(d, d) - (2.0 / vv) * v * v.transpose();
}

std::vector<GroupElement> group_elements(const RootSystem& rs, std::size_t cap) {
  const int d = rs.dimension();
  std::vector<Eigen::MatrixXd> generators;
  for (const auto& r : rs.positive_roots()) generators.push_back(reflection_matrix(r.vector));

  std::vector<GroupElement> elements{GroupElement{Eigen::MatrixXd::Identity(d, d)}};
  std::map<std::vector<long long>, std::size_t> seen{{matrix_key(elements[0].matrix), 0}};
  for (std::size_t next = 0; next < elements.size(); ++next) {
    for (const auto& s : generators) {
      Eigen::MatrixXd g = s * elements[next].matrix;
      auto key = matrix_key(g);
      if (seen.count(key)) continue;
      if (elements.size() >= cap) {
        throw std::runtime_error("reflection group closure exceeded " + std::to_string(cap) +
                                 " elements; root data is likely corrupted");
      }
      seen.emplace(std::move(key), elements.size());
      elements.push_back(GroupElement{std::move(g)});
    }
  }
  return elements;
}

RootSystem RootSystem::from_roots(int dimension, const std::vector<Eigen::VectorXd>& positive_roots,
                                  RootFamily family, std::size_t group_cap) {
  if (dimension < 1) throw std::invalid_argument("root system dimension must be positive");
  RootSystem rs;
  rs.dimension_ = dimension;
  rs.family_ = family;
  for (const auto& v : positive_roots) {
    if (v.size() != dimension) throw std::invalid_argument("root has wrong dimension");
    const double n = v.norm();
    if (n == 0.0) throw std::invalid_argument("zero root");
    Root r;
    r.vector = v * (std::sqrt(2.0) / n);
    r.rational_direction = rational_direction(r.vector);
    for (const auto& existing : rs.roots_) {
      if (parallel(existing.vector, r.vector, 1e-10)) {
        throw std::invalid_argument("positive roots must not contain a pair ±v");
      }
    }
    rs.roots_.push_back(std::move(r));
  }
  // Closure: σ_u(v) must again be ± a root.
  for (const auto& u : rs.roots_) {
    for (const auto& v : rs.roots_) {
      if (rs.find_root(reflect(u.vector, v.vector)) < 0) {
        throw std::invalid_argument("positive roots are not closed under their reflections");
      }
    }
  }
  rs.group_ = group_elements(rs, group_cap);

  rs.orbit_.assign(rs.roots_.size(), -1);
  for (std::size_t k = 0; k < rs.roots_.size(); ++k) {
    if (rs.orbit_[k] >= 0) continue;
    const int id = rs.orbit_count_++;
    for (const auto& g : rs.group_) {
      const int j = rs.find_root(g.matrix * rs.roots_[k].vector);
      if (j >= 0) rs.orbit_[j] = id;
    }
  }
  return rs;
}

RootSystem RootSystem::build(RootFamily family, int d, int m, std::size_t group_cap) {
  if (d < 1) throw std::invalid_argument("root systems require d >= 1");
  if (d < 2 && family != RootFamily::Trivial && family != RootFamily::Z2)
    throw std::invalid_argument("this root family requires d >= 2");
  const double s2 = std::sqrt(2.0);
  std::vector<Eigen::VectorXd> roots;
  auto unit = [d](int i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    e[i] = 1.0;
    return e;
  };
  switch (family) {
    case RootFamily::Trivial:
      break;
    case RootFamily::Z2:
      for (int i = 0; i < d; ++i) roots.push_back(s2 * unit(i));
      break;
    case RootFamily::A:
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) roots.push_back(unit(i) - unit(j));
      break;
    case RootFamily::B:
      // Short orbit first, then the long orbit e_i ± e_j.
      for (int i = 0; i < d; ++i) roots.push_back(s2 * unit(i));
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
          roots.push_back(unit(i) - unit(j));
          roots.push_back(unit(i) + unit(j));
        }
      break;
    case RootFamily::Dihedral: {
      if (d != 2) throw std::invalid_argument("I2(m) requires d = 2");
      if (m < 2) throw std::invalid_argument("I2(m) requires m >= 2");
      for (int j = 0; j < m; ++j) {
        const double t = std::numbers::pi * j / m;
        Eigen::VectorXd v(2);
        v << -std::sin(t), std::cos(t);
        roots.push_back(s2 * v);
      }
      break;
    }
    case RootFamily::Custom:
      throw std::invalid_argument("custom root systems are built with from_roots");
  }
  RootSystem rs = from_roots(d, roots, family, group_cap);
  rs.dihedral_order_ = family == RootFamily::Dihedral ? m : 0;
  return rs;
}

int RootSystem::find_root(const Eigen::VectorXd& w, double tol) const {
  for (std::size_t k = 0; k < roots_.size(); ++k) {
    if (parallel(roots_[k].vector, w, tol)) return static_cast<int>(k);
  }
  return -1;
}

Multiplicity Multiplicity::from_orbits(const RootSystem& rs, std::span<const double> per_orbit) {
  const int orbits = rs.orbit_count();
  std::vector<double> values(orbits);
  if (per_orbit.size() == 1) {
    std::fill(values.begin(), values.end(), per_orbit[0]);
  } else if (static_cast<int>(per_orbit.size()) == orbits) {
    values.assign(per_orbit.begin(), per_orbit.end());
  } else if (orbits == 0 && per_orbit.empty()) {
  } else {
    throw std::invalid_argument("expected " + std::to_string(orbits) + " multiplicity values (one per orbit), got " +
                                std::to_string(per_orbit.size()));
  }
  for (double k : values) {
    if (!(k >= 0.0) || !std::isfinite(k)) throw std::invalid_argument("multiplicities must be finite and non-negative");
  }
  Multiplicity kappa;
  kappa.values_.resize(rs.root_count());
  for (std::size_t k = 0; k < rs.root_count(); ++k) kappa.values_[k] = values[rs.orbit_index()[k]];
  return kappa;
}

Multiplicity Multiplicity::from_roots(const RootSystem& rs, std::span<const double> per_root) {
  if (per_root.size() != rs.root_count()) throw std::invalid_argument("one multiplicity per positive root expected");
  Multiplicity kappa;
  kappa.values_.assign(per_root.begin(), per_root.end());
  for (double k : kappa.values_) {
    if (!(k >= 0.0) || !std::isfinite(k)) throw std::invalid_argument("multiplicities must be finite and non-negative");
  }
  if (!kappa.orbit_constant(rs)) throw std::invalid_argument("multiplicity is not constant on root orbits");
  return kappa;
}

double Multiplicity::total() const {
  double s = 0.0;
  for (double k : values_) s += k;
  return s;
}

bool Multiplicity::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double k) { return k == 0.0; });
}

bool Multiplicity::orbit_constant(const RootSystem& rs, double tol) const {
  const auto roots = rs.positive_roots();
  for (const auto& g : rs.group()) {
    for (std::size_t k = 0; k < roots.size(); ++k) {
      const int j = rs.find_root(g.matrix * roots[k].vector);
      if (j < 0 || std::abs(values_[k] - values_[j]) > tol) return false;
    }
  }
  return true;
}

double lambda_kappa(const RootSystem& rs, const Multiplicity& kappa) {
  return (rs.dimension() - 2) / 2.0 + kappa.total();
}

double weight_eval(const RootSystem& rs, const Multiplicity& kappa, const Eigen::VectorXd& x) {
  double h = 1.0;
  const auto roots = rs.positive_roots();
  for (std::size_t k = 0; k < roots.size(); ++k) {
    if (kappa[k] == 0.0) continue;
    h *= std::pow(std::abs(x.dot(roots[k].vector)), kappa[k]);
  }
  return h;
}

double weight_squared_eval(const RootSystem& rs, const Multiplicity& kappa, const Eigen::VectorXd& x) {
  double h = 1.0;
  const auto roots = rs.positive_roots();
  for (std::size_t k = 0; k < roots.size(); ++k) {
    const double kv = kappa[k];
    if (kv == 0.0) continue;
    const double t = x.dot(roots[k].vector);
    if (kv == std::floor(kv) && kv <= 8) {
      double p = 1.0;
      const double t2 = t * t;
      for (int i = 0; i < static_cast<int>(kv); ++i) p *= t2;
      h *= p;
    } else {
      h *= std::pow(std::abs(t), 2.0 * kv);
    }
  }
  return h;
}

LinearMap<double> to_linear_map(const Eigen::MatrixXd& g) {
  LinearMap<double> out(g.rows(), std::vector<double>(g.cols()));
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) out[i][j] = g(i, j);
  return out;
}

}  // namespace dunkl
