#pragma once

#include "dislo/strain.hpp"

#include <functional>
#include <string>

namespace dislo {

/// Two-body and three-body potentials with single wells at 1.
/// The built-in "quadratic" pair is psi_i(t) = (alpha_i / 2)(t - 1)^2.
struct PotentialPair {
  std::string name = "quadratic";
  double alpha1 = 2.0;  // psi1''(1)
  double alpha2 = 2.0;  // psi2''(1)
  double growth_a = 0.5;  // psi1(t) >= a t^2 - b
  double growth_b = 1.0;

  // Used only when name == "custom".
  std::function<double(double)> custom_psi1, custom_dpsi1, custom_psi2, custom_dpsi2;

  static PotentialPair quadratic(double alpha1 = 2.0, double alpha2 = 2.0);

  double psi1(double t) const {
    if (quadratic_) return 0.5 * alpha1 * (t - 1.0) * (t - 1.0);
    return custom_psi1(t);
  }
  double dpsi1(double t) const {
    if (quadratic_) return alpha1 * (t - 1.0);
    return custom_dpsi1(t);
  }
  double psi2(double t) const {
    if (quadratic_) return 0.5 * alpha2 * (t - 1.0) * (t - 1.0);
    return custom_psi2(t);
  }
  double dpsi2(double t) const {
    if (quadratic_) return alpha2 * (t - 1.0);
    return custom_dpsi2(t);
  }

  /// Throws std::invalid_argument on nonpositive curvatures or missing callables.
  void validate() const;

 private:
  friend PotentialPair potential_by_name(const std::string&, double, double);
  friend PotentialPair custom_potential(std::function<double(double)>, std::function<double(double)>,
                                        std::function<double(double)>, std::function<double(double)>, double, double);
  bool quadratic_ = true;
};

/// "quadratic" with the given curvatures; other names are rejected.
PotentialPair potential_by_name(const std::string& name, double alpha1, double alpha2);

/// Custom pair; the curvatures must match the callables' second derivatives at 1.
PotentialPair custom_potential(std::function<double(double)> psi1, std::function<double(double)> dpsi1,
                               std::function<double(double)> psi2, std::function<double(double)> dpsi2,
                               double alpha1, double alpha2);

/// E_eps(beta) = sum over bonds eps^2 psi1(|beta|/eps)
///             + sum over triangle corners eps^2 psi2(2/(sqrt3 eps^2) beta(i,j)^beta(i,k)).
double total_energy(const DiscreteStrain& beta, const PotentialPair& pot);

/// Localized energy: full triangle energies of the triangles whose barycenter
/// lies in `region`, plus half the bond term of their boundary bonds.
double total_energy(const DiscreteStrain& beta, const PotentialPair& pot, const Polygon& region);

/// Energy and its gradient with respect to the canonical bond values. `grad`
/// may be null. total_energy evaluates exactly this sum.
double energy_and_strain_gradient(const DiscreteStrain& beta, const PotentialPair& pot, Eigen::Matrix2Xd* grad);
double energy_and_strain_gradient(const LatticeDomain& dom, const Eigen::Matrix2Xd& values, const PotentialPair& pot,
                                  Eigen::Matrix2Xd* grad);

/// Half the three bond terms plus the three corner terms of triangle t.
double triangle_energy(const DiscreteStrain& beta, int t, const PotentialPair& pot);

/// W(M) = 4/sqrt3 [ (psi1(|M e1|) + psi1(|M nu|) + psi1(|M eta|)) / 2 + 3 psi2(det M) ].
template <typename Derived>
double continuum_density(const Eigen::MatrixBase<Derived>& m, const PotentialPair& pot) {
  const Mat2 a = m;
  const double bonds = pot.psi1((a * e1()).norm()) + pot.psi1((a * nu()).norm()) + pot.psi1((a * eta()).norm());
  return 4.0 / kSqrt3 * (0.5 * bonds + 3.0 * pot.psi2(a.determinant()));
}

/// Isotropic tensor C d = lambda tr(d) Id + 2 mu sym(d).
struct IsotropicTensor {
  double lambda = 0.0;
  double mu = 0.0;

  template <typename Derived>
  Mat2 apply(const Eigen::MatrixBase<Derived>& d) const {
    const Mat2 s = 0.5 * (d + d.transpose());
    return lambda * d.trace() * Mat2::Identity() + 2.0 * mu * s;
  }
  /// C d : d.
  template <typename Derived>
  double contract(const Eigen::MatrixBase<Derived>& d) const {
    const Mat2 s = 0.5 * (d + d.transpose());
    return lambda * d.trace() * d.trace() + 2.0 * mu * s.squaredNorm();
  }

  /// Throws std::invalid_argument unless mu > 0 and lambda + mu > 0.
  void validate() const;
};

/// lambda = sqrt3/4 alpha1 + 4 sqrt3 alpha2, mu = sqrt3/4 alpha1.
IsotropicTensor linearized_tensor(const PotentialPair& pot);

/// lambda |tr d|^2 + sqrt3/2 alpha1 |sym d|^2, written directly in the curvatures.
double linearized_form(const Mat2& d, double alpha1, double alpha2);

struct HessianCheckReport {
  bool pass = false;
  double max_relative_error = 0.0;
  Mat2 worst_direction = Mat2::Zero();
  /// Least-squares Lame moduli from the finite-difference second derivatives.
  double fitted_lambda = 0.0;
  double fitted_mu = 0.0;
  std::vector<double> finite_difference;
  std::vector<double> exact;
};

/// Central second differences of W at Id along `directions` random unit
/// directions, compared with the linearized form.
HessianCheckReport density_hessian_check(const PotentialPair& pot, int directions = 20, double h = 1e-5,
                                         double tol = 1e-4, unsigned seed = 12345);

}  // namespace dislo
