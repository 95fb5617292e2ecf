#pragma once

#include "dislo/elasticity.hpp"

#include <functional>

namespace dislo {

/// Slip variable: one value per canonical bond, in units of the lattice
/// (the strain subtracts eps * slip).
using SlipField = Eigen::Matrix2Xd;

/// Curl-free far field beta^cf with a Lipschitz potential u^cf.
struct FarField {
  std::function<Vec2(const Vec2&)> potential;
  std::function<Mat2(const Vec2&)> gradient;
  bool uniform = true;
  Mat2 matrix = Mat2::Zero();

  static FarField zero() { return uniform_field(Mat2::Zero()); }
  static FarField uniform_field(const Mat2& m);
  static FarField custom(std::function<Vec2(const Vec2&)> potential, std::function<Mat2(const Vec2&)> gradient);

  Vec2 u(const Vec2& x) const { return uniform ? Vec2(matrix * x) : potential(x); }
  Mat2 grad(const Vec2& x) const { return uniform ? matrix : gradient(x); }
  bool is_zero() const { return uniform && matrix.isZero(0.0); }
};

struct RecoveryInput {
  /// Limit measure sum xi^k delta_{x^k}; entry frames must lie in R I(T).
  DislocationMeasure mu;
  double frame_angle = 0.0;  // the global rotation R
  FarField far_field = FarField::zero();
  PotentialPair potentials = PotentialPair::quadratic();
  int profile_order = 8;
};

/// Moves every atom to the nearest triangle barycenter. Throws
/// SeparationViolation when the snapped atoms break the separation rules.
DislocationMeasure snap_positions(const DislocationMeasure& mu, const LatticeDomain& dom);

/// -xi^k on bonds [i,j] crossing the ray x^k + {(s,0): s >= 0} with i below
/// the ray, +xi^k with i above; summed over k and stored in canonical orientation.
SlipField build_slip(const DislocationMeasure& snapped, const LatticeDomain& dom);

/// C^1 cutoff: 1 on [0,1], 0 on [2,inf), cubic smoothstep in between.
double cutoff(double s);

/// beta(i,j) = R(angle)(x_j - x_i) + eps (u_j - u_i - slip(i,j)).
DiscreteStrain strain_from_displacement(DomainPtr dom, double angle, const Eigen::Matrix2Xd& u, const SlipField& slip);

struct Recovery {
  DiscreteStrain beta;
  DislocationMeasure snapped;
  Eigen::Matrix2Xd displacement;
  SlipField slip;
  double inner_radius = 0.0;  // eps^gamma + eps
};

/// Recovery strain for the measure eps * sum xi^k delta_{x^k,eps}. Throws
/// PreconditionViolation when the blending annuli overlap or leave the domain,
/// or an atom's frame is not in R I(T).
Recovery build_recovery(const RecoveryInput& input, DomainPtr dom);

}  // namespace dislo
