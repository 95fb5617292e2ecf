#pragma once

#include "dislo/lattice.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

namespace dislo {

using DomainPtr = std::shared_ptr<const LatticeDomain>;

inline DomainPtr make_domain(const LatticeSpec& spec) {
  return std::make_shared<const LatticeDomain>(build_domain(spec));
}

/// Antisymmetric bond field. One value per unordered bond, stored in the
/// canonical orientation (smaller node index first); beta(j,i) = -beta(i,j)
/// is implied rather than stored.
class DiscreteStrain {
 public:
  explicit DiscreteStrain(DomainPtr dom);
  DiscreteStrain(DomainPtr dom, Eigen::Matrix2Xd values);

  /// beta(i,j) = M (x_j - x_i).
  static DiscreteStrain from_matrix(DomainPtr dom, const Mat2& m);

  const LatticeDomain& domain() const { return *dom_; }
  const DomainPtr& domain_ptr() const { return dom_; }

  Vec2 value(int bond) const { return values_.col(bond); }
  /// Oriented value beta(i,j); throws std::out_of_range if (i,j) is not a bond.
  Vec2 operator()(int i, int j) const;

  Eigen::Matrix2Xd& values() { return values_; }
  const Eigen::Matrix2Xd& values() const { return values_; }

 private:
  DomainPtr dom_;
  Eigen::Matrix2Xd values_;
};

/// Counter-clockwise sum beta(i,j) + beta(j,k) + beta(k,i) over triangle t.
Vec2 circulation(const DiscreteStrain& beta, int t);
Vec2 circulation(const DiscreteStrain& beta, TriangleId t);

/// One atom x^n with Burgers vector b^n in lattice coordinates and frame R(theta).
/// Its weight is eps * R(theta) * (b1 e1 + b2 nu).
struct Dislocation {
  Vec2 position = Vec2::Zero();
  Eigen::Vector2i burgers = Eigen::Vector2i::Zero();
  double theta = 0.0;

  Vec2 lattice_burgers() const { return lattice_vector<double>(burgers.x(), burgers.y()); }
  /// xi = R(theta) b, the limit-measure weight.
  Vec2 xi() const { return rotation(theta) * lattice_burgers(); }
};

struct DislocationMeasure {
  std::vector<Dislocation> entries;
  double epsilon = 0.0;
  double gamma = 0.5;

  /// Throws SeparationViolation when two atoms are closer than 4 eps^gamma or
  /// one is closer than 2 eps^gamma to the boundary of `domain`.
  void validate(const Polygon& domain) const;
};

struct BurgersAtom {
  int triangle = -1;
  Vec2 position = Vec2::Zero();
  Vec2 weight = Vec2::Zero();
  /// Weight rounded to eps*T when within the snap tolerance.
  bool snapped = false;
  Eigen::Vector2i lattice = Eigen::Vector2i::Zero();
};

struct BurgersOptions {
  double tol_circ = 1e-10;  // relative to eps
  double tol_snap = 1e-6;   // relative to eps
};

/// Atoms (barycenter, d beta(T)) of every triangle with |d beta| > tol_circ * eps,
/// in triangle order.
std::vector<BurgersAtom> burgers_measure(const DiscreteStrain& beta, const BurgersOptions& opt = {});

struct MeasureComparison {
  bool matches = false;
  double max_weight_error = 0.0;  // absolute
  int missing = 0;                // prescribed atoms with no matching triangle
  int spurious = 0;               // extracted atoms not prescribed
};

/// Compares extracted atoms against eps * xi^n placed at the triangles whose
/// barycenters are nearest to x^n (atoms sharing a triangle are summed).
MeasureComparison compare_measure(const std::vector<BurgersAtom>& atoms, const DislocationMeasure& mu,
                                  const LatticeDomain& dom, double tol);

/// The unique M with beta(i,j) = M (x_j - x_i) on the three edges of t.
/// Throws NotCompatibleError when |d beta(t)| > tol_circ * eps.
Mat2 triangle_matrix(const DiscreteStrain& beta, int t, double tol_circ = 1e-10);

struct Core {
  Vec2 center;
  double radius;
};

/// Piecewise-constant matrix field: triangle_matrix on compatible triangles,
/// zero on incompatible ones and on the cores B_eps(x^n).
class PiecewiseField {
 public:
  PiecewiseField(DomainPtr dom, std::vector<Mat2> matrices, std::vector<Core> cores = {});

  const LatticeDomain& domain() const { return *dom_; }
  const Mat2& matrix(int t) const { return matrices_[t]; }
  const std::vector<Core>& cores() const { return cores_; }

  /// Integral of the field and the area of its support inside
  /// {r < |x - center| < R}.
  std::pair<Mat2, double> integrate_annulus(const Vec2& center, double r, double R) const;
  /// Same over a simple polygon.
  std::pair<Mat2, double> integrate_polygon(const Polygon& region) const;

 private:
  double core_overlap(int t, const Vec2& center, double r, double R) const;

  DomainPtr dom_;
  std::vector<Mat2> matrices_;
  std::vector<Core> cores_;
};

PiecewiseField piecewise_field(const DiscreteStrain& beta, const DislocationMeasure& mu, double tol_circ = 1e-10);

/// Average of the field over the part of {r < |x - center| < R} where it is
/// defined. Throws std::invalid_argument for r >= R or an empty intersection.
Mat2 annulus_average(const PiecewiseField& field, const Vec2& center, double r, double R);

/// Continuum variant: tensor-product Gauss-Legendre (radial) x trapezoid
/// (angular) quadrature on the full annulus.
template <typename Field>
Mat2 annulus_average(const Field& field, const Vec2& center, double r, double R, int n_radial = 64,
                     int n_angular = 512);

/// Distance of m from R(theta) I(T), I(T) the six rotations by multiples of pi/3.
double distance_to_frame_group(const Mat2& m, double theta);

struct AdmissibilityReport {
  MeasureComparison measure;
  std::vector<Mat2> averages;
  std::vector<double> distances;
  double delta = 0.0;
  bool pass = false;
};

double default_admissibility_delta(double eps, double gamma);

/// Annulus averages over A_{eps, eps^gamma}(x^n) tested against R^n I(T).
/// A negative delta selects default_admissibility_delta.
AdmissibilityReport check_admissible(const DiscreteStrain& beta, const DislocationMeasure& mu, double delta = -1.0);

/// Rows "p1,q1,p2,q2,bx,by" in canonical bond order.
void write_strain_csv(const DiscreteStrain& beta, const std::filesystem::path& path);
DiscreteStrain read_strain_csv(DomainPtr dom, const std::filesystem::path& path);

/// Rows "x,y,b1,b2,theta".
void write_measure_csv(const DislocationMeasure& mu, const std::filesystem::path& path);
DislocationMeasure read_measure_csv(const std::filesystem::path& path, double epsilon, double gamma);

namespace detail {
/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);
}  // namespace detail

template <typename Field>
Mat2 annulus_average(const Field& field, const Vec2& center, double r, double R, int n_radial, int n_angular) {
  if (!(r >= 0.0 && r < R)) throw std::invalid_argument("annulus_average requires 0 <= r < R");
  std::vector<double> gx, gw;
  detail::gauss_legendre(n_radial, gx, gw);
  Mat2 sum = Mat2::Zero();
  double area = 0.0;
  const double h = 2.0 * kPi / n_angular;
  for (int a = 0; a < n_radial; ++a) {
    const double rho = 0.5 * (R + r) + 0.5 * (R - r) * gx[a];
    const double wr = 0.5 * (R - r) * gw[a] * rho * h;
    for (int k = 0; k < n_angular; ++k) {
      const double th = k * h;
      sum += wr * field(Vec2(center.x() + rho * std::cos(th), center.y() + rho * std::sin(th)));
      area += wr;
    }
  }
  return sum / area;
}

}  // namespace dislo
