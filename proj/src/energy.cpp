#include "dislo/energy.hpp"

#include <random>

namespace dislo {

PotentialPair PotentialPair::quadratic(double alpha1, double alpha2) { return potential_by_name("quadratic", alpha1, alpha2); }

void PotentialPair::validate() const {
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw std::invalid_argument("potential curvatures alpha1, alpha2 must be positive");
  if (!quadratic_ && !(custom_psi1 && custom_dpsi1 && custom_psi2 && custom_dpsi2))
    throw std::invalid_argument("custom potential needs psi1, dpsi1, psi2, dpsi2");
}

PotentialPair potential_by_name(const std::string& name, double alpha1, double alpha2) {
  if (name != "quadratic") throw std::invalid_argument("unknown potential '" + name + "' (available: quadratic)");
  PotentialPair p;
  p.name = name;
  p.alpha1 = alpha1;
  p.alpha2 = alpha2;
  p.growth_a = alpha1 / 4.0;  // (alpha/2)(t-1)^2 - (alpha/4)t^2 + alpha/2 = (alpha/4)(t-2)^2
  p.growth_b = alpha1 / 2.0;
  p.quadratic_ = true;
  p.validate();
  return p;
}

PotentialPair custom_potential(std::function<double(double)> psi1, std::function<double(double)> dpsi1,
                               std::function<double(double)> psi2, std::function<double(double)> dpsi2,
                               double alpha1, double alpha2) {
  PotentialPair p = PotentialPair::quadratic(alpha1, alpha2);
  p.name = "custom";
  p.custom_psi1 = std::move(psi1);
  p.custom_dpsi1 = std::move(dpsi1);
  p.custom_psi2 = std::move(psi2);
  p.custom_dpsi2 = std::move(dpsi2);
  p.quadratic_ = false;
  p.validate();
  return p;
}

namespace {

inline Vec2 wedge_grad_first(const Vec2& b) { return {b.y(), -b.x()}; }
inline Vec2 wedge_grad_second(const Vec2& a) { return {-a.y(), a.x()}; }

/// Shared kernel. bond_weight == null means weight 1 on every bond;
/// tri_mask == null means every triangle.
double energy_kernel(const LatticeDomain& dom, const Eigen::Matrix2Xd& v, const PotentialPair& pot,
                     const std::vector<double>* bond_weight, const std::vector<char>* tri_mask,
                     Eigen::Matrix2Xd* grad) {
  const double eps = dom.epsilon();
  const double eps2 = eps * eps;
  const double wscale = 2.0 / (kSqrt3 * eps2);
  if (grad) grad->setZero(2, dom.num_bonds());

  double bond_sum = 0.0;
  for (int b = 0; b < dom.num_bonds(); ++b) {
    const double w = bond_weight ? (*bond_weight)[b] : 1.0;
    if (w == 0.0) continue;
    const Vec2 x = v.col(b);
    const double len = x.norm();
    bond_sum += w * eps2 * pot.psi1(len / eps);
    if (grad && len >= 1e-14 * eps) grad->col(b) += (w * eps * pot.dpsi1(len / eps) / len) * x;
  }

  double wedge_sum = 0.0;
  for (int t = 0; t < dom.num_triangles(); ++t) {
    if (tri_mask && !(*tri_mask)[t]) continue;
    const auto& bi = dom.triangle_bonds(t);
    const auto& s = dom.triangle_signs(t);
    const Vec2 e[3] = {s[0] * v.col(bi[0]), s[1] * v.col(bi[1]), s[2] * v.col(bi[2])};
    // Corner k spans edges e[k] and -e[k+2]: beta(i,j)^beta(i,k) = e[k+2] ^ e[k].
    for (int k = 0; k < 3; ++k) {
      const Vec2& a = e[(k + 2) % 3];
      const Vec2& c = e[k];
      const double arg = wscale * wedge(a, c);
      wedge_sum += eps2 * pot.psi2(arg);
      if (grad) {
        const double f = eps2 * pot.dpsi2(arg) * wscale;
        grad->col(bi[(k + 2) % 3]) += (f * s[(k + 2) % 3]) * wedge_grad_first(c);
        grad->col(bi[k]) += (f * s[k]) * wedge_grad_second(a);
      }
    }
  }
  return bond_sum + wedge_sum;
}

}  // namespace

double energy_and_strain_gradient(const LatticeDomain& dom, const Eigen::Matrix2Xd& values, const PotentialPair& pot,
                                  Eigen::Matrix2Xd* grad) {
  return energy_kernel(dom, values, pot, nullptr, nullptr, grad);
}

double energy_and_strain_gradient(const DiscreteStrain& beta, const PotentialPair& pot, Eigen::Matrix2Xd* grad) {
  return energy_kernel(beta.domain(), beta.values(), pot, nullptr, nullptr, grad);
}

double total_energy(const DiscreteStrain& beta, const PotentialPair& pot) {
  return energy_and_strain_gradient(beta, pot, nullptr);
}

double total_energy(const DiscreteStrain& beta, const PotentialPair& pot, const Polygon& region) {
  const auto& dom = beta.domain();
  std::vector<char> mask(static_cast<std::size_t>(dom.num_triangles()), 0);
  std::vector<double> weight(static_cast<std::size_t>(dom.num_bonds()), 0.0);
  for (int t = 0; t < dom.num_triangles(); ++t) {
    if (!polygon_contains(region.vertices, dom.barycenter(t), 0.0)) continue;
    mask[t] = 1;
    for (int b : dom.triangle_bonds(t)) weight[b] += dom.bond_triangle_count(b) == 1 ? 1.0 : 0.5;
  }
  return energy_kernel(dom, beta.values(), pot, &weight, &mask, nullptr);
}

double triangle_energy(const DiscreteStrain& beta, int t, const PotentialPair& pot) {
  const auto& dom = beta.domain();
  const double eps = dom.epsilon();
  const double eps2 = eps * eps;
  const auto& bi = dom.triangle_bonds(t);
  const auto& s = dom.triangle_signs(t);
  const Vec2 e[3] = {s[0] * beta.value(bi[0]), s[1] * beta.value(bi[1]), s[2] * beta.value(bi[2])};
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    sum += 0.5 * eps2 * pot.psi1(e[k].norm() / eps);
    sum += eps2 * pot.psi2(2.0 / (kSqrt3 * eps2) * wedge(e[(k + 2) % 3], e[k]));
  }
  return sum;
}

void IsotropicTensor::validate() const {
  if (!(mu > 0.0) || !(lambda + mu > 0.0))
    throw std::invalid_argument("isotropic tensor needs mu > 0 and lambda + mu > 0");
}

IsotropicTensor linearized_tensor(const PotentialPair& pot) {
  if (!(pot.alpha1 > 0.0) || !(pot.alpha2 > 0.0)) throw std::invalid_argument("alpha1, alpha2 must be positive");
  return {kSqrt3 / 4.0 * pot.alpha1 + 4.0 * kSqrt3 * pot.alpha2, kSqrt3 / 4.0 * pot.alpha1};
}

double linearized_form(const Mat2& d, double alpha1, double alpha2) {
  const double lambda = kSqrt3 / 4.0 * alpha1 + 4.0 * kSqrt3 * alpha2;
  const Mat2 s = 0.5 * (d + d.transpose());
  return lambda * d.trace() * d.trace() + kSqrt3 / 2.0 * alpha1 * s.squaredNorm();
}

HessianCheckReport density_hessian_check(const PotentialPair& pot, int directions, double h, double tol,
                                         unsigned seed) {
  HessianCheckReport rep;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const Mat2 id = Mat2::Identity();
  const double w0 = continuum_density(id, pot);
  Eigen::MatrixXd a(directions, 2);
  Eigen::VectorXd y(directions);
  for (int k = 0; k < directions; ++k) {
    Mat2 d;
    d << g(rng), g(rng), g(rng), g(rng);
    d /= d.norm();
    const double fd = (continuum_density(id + h * d, pot) - 2.0 * w0 + continuum_density(id - h * d, pot)) / (h * h);
    const double ex = linearized_form(d, pot.alpha1, pot.alpha2);
    const double err = std::abs(fd - ex) / std::max(std::abs(ex), 1e-300);
    if (err > rep.max_relative_error) {
      rep.max_relative_error = err;
      rep.worst_direction = d;
    }
    rep.finite_difference.push_back(fd);
    rep.exact.push_back(ex);
    const Mat2 s = 0.5 * (d + d.transpose());
    a(k, 0) = d.trace() * d.trace();
    a(k, 1) = 2.0 * s.squaredNorm();
    y(k) = fd;
  }
  const Eigen::Vector2d fit = a.colPivHouseholderQr().solve(y);
  rep.fitted_lambda = fit(0);
  rep.fitted_mu = fit(1);
  rep.pass = rep.max_relative_error <= tol;
  return rep;
}

}  // namespace dislo
