#pragma once

#include "dislo/energy.hpp"

#include <vector>

namespace dislo {

/// Fourth-order tensor acting on 2x2 matrices, stored as a 4x4 matrix on
/// column-major vec(d) = (d00, d10, d01, d11).
struct ElasticityTensor {
  Eigen::Matrix4d c = Eigen::Matrix4d::Zero();

  static ElasticityTensor isotropic(const IsotropicTensor& iso);
  static ElasticityTensor isotropic(double lambda, double mu) { return isotropic(IsotropicTensor{lambda, mu}); }

  Mat2 apply(const Mat2& d) const {
    const Eigen::Vector4d v = c * Eigen::Map<const Eigen::Vector4d>(d.data());
    return Eigen::Map<const Mat2>(v.data());
  }
  double contract(const Mat2& a, const Mat2& b) const {
    return Eigen::Map<const Eigen::Vector4d>(a.data()).dot(c * Eigen::Map<const Eigen::Vector4d>(b.data()));
  }
  double contract(const Mat2& d) const { return contract(d, d); }

  /// Throws std::invalid_argument unless c is symmetric, vanishes on skew
  /// matrices and is positive definite on symmetric ones.
  void validate() const;
};

/// Classical isotropic edge-dislocation strain with circulation zeta around
/// the origin. Throws SingularityError at x = 0.
Mat2 isotropic_edge_strain(const Vec2& zeta, const IsotropicTensor& tensor, const Vec2& x);

/// Gamma(theta) = f(theta) (x) t + g (x) n, with t = (-sin, cos), n = (cos, sin) and
/// f(theta) = zeta / 2pi + sum_k a_k cos k theta + b_k sin k theta.
struct AngularProfile {
  Vec2 zeta = Vec2::Zero();
  Vec2 g = Vec2::Zero();
  Eigen::Matrix2Xd a;  // column k-1 holds a_k
  Eigen::Matrix2Xd b;

  int order() const { return static_cast<int>(a.cols()); }
  Vec2 f(double theta) const;
  Mat2 gamma(double theta) const;
  /// Gamma(theta) / rho at x = rho n(theta). Throws SingularityError at 0.
  Mat2 strain(const Vec2& x) const;
  /// F(theta) + g log rho with theta in [0, 2pi) measured from the positive
  /// x-axis; the jump F(2pi) - F(0) across that ray is zeta.
  Vec2 displacement(const Vec2& x) const;
  /// Integral over [0, 2pi] of C Gamma : Gamma / 2.
  double energy(const ElasticityTensor& tensor) const;
};

/// Minimizer of the angular energy over profiles of order N (one SPD solve).
AngularProfile minimize_angular_profile(const Vec2& zeta, const ElasticityTensor& tensor, int order = 8);

/// psi(zeta) = min over profiles of int_0^2pi C Gamma : Gamma / 2; 0 for zeta = 0.
double psi(const Vec2& zeta, const ElasticityTensor& tensor, int order = 8);

/// The 2x2 symmetric P with psi(zeta) = zeta^T P zeta.
Mat2 psi_quadratic_form(const ElasticityTensor& tensor, int order = 8);

/// Closed form for isotropic tensors: psi(zeta) = mu (lambda + mu) / (2 pi (lambda + 2 mu)) |zeta|^2.
double isotropic_self_energy_coefficient(const IsotropicTensor& tensor);

/// psi(zeta) from the classical field: int_0^2pi C beta(n) : beta(n) / 2 on the unit circle.
double isotropic_field_energy(const Vec2& zeta, const IsotropicTensor& tensor, int points = 1024);

struct AnnulusOptions {
  int points_per_decade = 64;  // radial nodes per factor 10 in r2 / r1
  int modes = 6;               // angular Fourier modes of the single-valued part
};

/// min (1 / log(r2/r1)) int_{r1 < |x| < r2} C beta : beta / 2 over curl-free fields
/// with circulation zeta, discretized by Fourier modes in theta and P2 elements
/// in log r. Throws std::invalid_argument unless 0 < r1 < r2.
double psi_annulus(const Vec2& zeta, const ElasticityTensor& tensor, double r1, double r2,
                   const AnnulusOptions& opt = {});

struct PhiStep {
  Eigen::Vector2i burgers;  // lattice coordinates of b_i
  int multiplicity;         // z_i, nonzero
};

struct PhiResult {
  double value = 0.0;
  std::vector<PhiStep> certificate;
  int search_bound = 0;
  long long nodes_visited = 0;
};

/// phi(b) = min sum |z_i| psi(b_i) over integer decompositions b = sum z_i b_i,
/// b_i lattice vectors, at most `search_bound` unit steps (0 selects the
/// default ceil(psi(b) / psi_min)). Throws BoundTooSmallError when the bound
/// cannot certify optimality.
PhiResult phi(const Eigen::Vector2i& b, const ElasticityTensor& tensor, int search_bound = 0, int order = 8);
PhiResult phi(const Eigen::Vector2i& b, const Mat2& psi_form, int search_bound = 0);

}  // namespace dislo
