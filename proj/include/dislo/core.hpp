#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dislo {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

inline constexpr double kSqrt3 = std::numbers::sqrt3;
inline constexpr double kPi = std::numbers::pi;

/// Lattice generators: e1, nu = e1 rotated by pi/3, eta = nu - e1.
template <typename Scalar = double>
Vector2<Scalar> e1() { return {Scalar(1), Scalar(0)}; }
template <typename Scalar = double>
Vector2<Scalar> nu() { return {Scalar(0.5), Scalar(std::sqrt(3.0) / 2)}; }
template <typename Scalar = double>
Vector2<Scalar> eta() { return {Scalar(-0.5), Scalar(std::sqrt(3.0) / 2)}; }

/// Counter-clockwise rotation by `angle`.
template <typename Scalar>
Matrix2<Scalar> rotation(Scalar angle) {
  using std::cos;
  using std::sin;
  Matrix2<Scalar> r;
  r << cos(angle), -sin(angle), sin(angle), cos(angle);
  return r;
}

/// Scalar cross product <a ^ b, e3>.
template <typename DerivedA, typename DerivedB>
auto wedge(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return a(0) * b(1) - a(1) * b(0);
}

/// Cartesian vector of the lattice coordinates (b1, b2) in the basis {e1, nu}.
template <typename Scalar = double>
Vector2<Scalar> lattice_vector(Scalar b1, Scalar b2) {
  return b1 * e1<Scalar>() + b2 * nu<Scalar>();
}

/// Inverse of lattice_vector (real-valued coordinates).
inline Vec2 lattice_coordinates(const Vec2& v) {
  const double b2 = v.y() / (kSqrt3 / 2);
  return {v.x() - 0.5 * b2, b2};
}

/// Distance of a 2x2 matrix from SO(2) (Frobenius).
template <typename Derived>
double dist_so2(const Eigen::MatrixBase<Derived>& f) {
  const double c = f(0, 0) + f(1, 1);
  const double s = f(1, 0) - f(0, 1);
  const double d2 = f.squaredNorm() + 2.0 - 2.0 * std::hypot(c, s);
  return std::sqrt(std::max(d2, 0.0));
}

class EmptyDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotCompatibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SeparationViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class BoundTooSmallError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dislo
