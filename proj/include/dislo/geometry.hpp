#pragma once

#include "dislo/core.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace dislo {

/// Simple polygon, vertices counter-clockwise, no repeated closing vertex.
struct Polygon {
  std::vector<Vec2> vertices;

  double area() const;
  double diameter() const;
  Vec2 centroid() const;
  bool is_convex() const;
};

double signed_area(std::span<const Vec2> poly);

/// Throws std::invalid_argument unless the polygon has >= 3 vertices, nonzero
/// area and no self-intersections. Clockwise input is reversed in place.
void normalize_polygon(Polygon& poly);

Polygon regular_polygon(int sides, double circumradius, Vec2 center = Vec2::Zero(), double phase = 0.0);
Polygon axis_square(double lo, double hi);

/// Plain text, one "x y" pair per line; '#' starts a comment.
Polygon read_polygon(const std::filesystem::path& path);

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b);

/// Closed-set membership with absolute tolerance `tol` on the boundary.
bool polygon_contains(std::span<const Vec2> poly, const Vec2& p, double tol);

/// Exact area of poly ∩ B_r(center); poly counter-clockwise (any simple polygon).
double disk_intersection_area(std::span<const Vec2> poly, const Vec2& center, double radius);

/// Exact area of poly ∩ {r < |x - center| < R}.
double annulus_intersection_area(std::span<const Vec2> poly, const Vec2& center, double r, double R);

/// Sutherland-Hodgman clip of `subject` against a convex counter-clockwise `clip`.
std::vector<Vec2> clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip);

/// Polygon with `sides` vertices and the same area as the disk B_r(center).
std::vector<Vec2> equal_area_disk(const Vec2& center, double radius, int sides);

namespace detail {

/// Spatial index over polygon edges used by the lattice builder.
class PolygonIndex {
 public:
  PolygonIndex(const Polygon& poly, double cell, double tol);

  bool on_boundary(const Vec2& p) const;
  /// Sorted x-coordinates where the horizontal line at height y crosses the
  /// boundary (half-open rule).
  std::vector<double> row_crossings(double y) const;
  /// Closed membership for a point on a row with precomputed crossings.
  bool contains(const Vec2& p, std::span<const double> crossings) const;
  /// True when some boundary edge passes through the open triangle (a,b,c),
  /// given counter-clockwise.
  bool cuts_open_triangle(const Vec2& a, const Vec2& b, const Vec2& c) const;

  double tolerance() const { return tol_; }

 private:
  std::span<const int> cell_edges(long ix, long iy) const;
  long cell_x(double x) const;
  long cell_y(double y) const;

  std::vector<Vec2> v_;
  double cell_;
  double tol_;
  Vec2 origin_;
  long nx_ = 0;
  long ny_ = 0;
  std::vector<int> offsets_;
  std::vector<int> edges_;
};

}  // namespace detail
}  // namespace dislo
