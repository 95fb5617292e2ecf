#include "dislo/geometry.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace dislo {

double signed_area(std::span<const Vec2> poly) {
  double a = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) a += wedge(poly[i], poly[(i + 1) % n]);
  return 0.5 * a;
}

double Polygon::area() const { return std::abs(signed_area(vertices)); }

double Polygon::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    for (std::size_t j = i + 1; j < vertices.size(); ++j) d = std::max(d, (vertices[i] - vertices[j]).norm());
  return d;
}

Vec2 Polygon::centroid() const {
  Vec2 c = Vec2::Zero();
  double a = 0.0;
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = vertices[i];
    const Vec2& q = vertices[(i + 1) % n];
    const double w = wedge(p, q);
    a += w;
    c += w * (p + q);
  }
  return c / (3.0 * a);
}

bool Polygon::is_convex() const {
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices[i];
    const Vec2& b = vertices[(i + 1) % n];
    const Vec2& c = vertices[(i + 2) % n];
    if (wedge(b - a, c - b) < 0.0) return false;
  }
  return true;
}

namespace {

int orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double w = wedge(b - a, c - a);
  return (w > 0) - (w < 0);
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= p.y() &&
         p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const int o1 = orient(p1, p2, q1);
  const int o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1);
  const int o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace

void normalize_polygon(Polygon& poly) {
  auto& v = poly.vertices;
  if (v.size() >= 2 && (v.front() - v.back()).norm() == 0.0) v.pop_back();
  if (v.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  const double a = signed_area(v);
  if (!(std::abs(a) > 0.0)) throw std::invalid_argument("polygon has zero area");
  if (a < 0.0) std::reverse(v.begin(), v.end());
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
        throw std::invalid_argument("polygon is not simple (edges " + std::to_string(i) + " and " +
                                    std::to_string(j) + " intersect)");
    }
  }
}

Polygon regular_polygon(int sides, double circumradius, Vec2 center, double phase) {
  Polygon p;
  p.vertices.reserve(sides);
  for (int k = 0; k < sides; ++k) {
    const double t = phase + 2.0 * kPi * k / sides;
    p.vertices.push_back(center + circumradius * Vec2(std::cos(t), std::sin(t)));
  }
  return p;
}

Polygon axis_square(double lo, double hi) {
  return Polygon{{Vec2(lo, lo), Vec2(hi, lo), Vec2(hi, hi), Vec2(lo, hi)}};
}

Polygon read_polygon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open polygon file " + path.string());
  Polygon poly;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double x = 0, y = 0;
    if (!(ss >> x)) continue;
    if (!(ss >> y))
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": expected 'x y'");
    poly.vertices.emplace_back(x, y);
  }
  normalize_polygon(poly);
  return poly;
}

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  double t = len2 > 0 ? (p - a).dot(d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * d - p).norm();
}

bool polygon_contains(std::span<const Vec2> poly, const Vec2& p, double tol) {
  const std::size_t n = poly.size();
  bool inside = false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    if (distance_to_segment(p, a, b) <= tol) return true;
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (x > p.x()) inside = !inside;
    }
  }
  return inside;
}

namespace {

// Signed area of triangle (0, a, b) ∩ B_r(0).
double triangle_disk_area(const Vec2& a, const Vec2& b, double r) {
  const double r2 = r * r;
  const Vec2 d = b - a;
  const double A = d.squaredNorm();
  double ts[4] = {0.0, 0.0, 0.0, 1.0};
  int nt = 1;
  if (A > 0.0) {
    const double B = a.dot(d);
    const double C = a.squaredNorm() - r2;
    const double disc = B * B - A * C;
    if (disc > 0.0) {
      const double sq = std::sqrt(disc);
      const double t1 = (-B - sq) / A;
      const double t2 = (-B + sq) / A;
      if (t1 > 0.0 && t1 < 1.0) ts[nt++] = t1;
      if (t2 > 0.0 && t2 < 1.0) ts[nt++] = t2;
    }
  }
  ts[nt++] = 1.0;
  double area = 0.0;
  for (int k = 0; k + 1 < nt; ++k) {
    const Vec2 p = a + ts[k] * d;
    const Vec2 q = a + ts[k + 1] * d;
    const Vec2 mid = 0.5 * (p + q);
    if (mid.squaredNorm() <= r2) {
      area += 0.5 * wedge(p, q);
    } else {
      area += 0.5 * r2 * std::atan2(wedge(p, q), p.dot(q));
    }
  }
  return area;
}

}  // namespace

double disk_intersection_area(std::span<const Vec2> poly, const Vec2& center, double radius) {
  if (radius <= 0.0) return 0.0;
  double a = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) a += triangle_disk_area(poly[i] - center, poly[(i + 1) % n] - center, radius);
  return a;
}

double annulus_intersection_area(std::span<const Vec2> poly, const Vec2& center, double r, double R) {
  return disk_intersection_area(poly, center, R) - disk_intersection_area(poly, center, r);
}

std::vector<Vec2> clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip) {
  std::vector<Vec2> out(subject.begin(), subject.end());
  const std::size_t m = clip.size();
  for (std::size_t e = 0; e < m && !out.empty(); ++e) {
    const Vec2& a = clip[e];
    const Vec2& b = clip[(e + 1) % m];
    std::vector<Vec2> in;
    in.swap(out);
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& p = in[i];
      const Vec2& q = in[(i + 1) % n];
      const double sp = wedge(b - a, p - a);
      const double sq = wedge(b - a, q - a);
      if (sp >= 0) out.push_back(p);
      if ((sp >= 0) != (sq >= 0)) out.push_back(p + (sp / (sp - sq)) * (q - p));
    }
  }
  return out;
}

std::vector<Vec2> equal_area_disk(const Vec2& center, double radius, int sides) {
  const double scale = std::sqrt(2.0 * kPi / (sides * std::sin(2.0 * kPi / sides)));
  std::vector<Vec2> v;
  v.reserve(sides);
  for (int k = 0; k < sides; ++k) {
    const double t = 2.0 * kPi * k / sides;
    v.push_back(center + radius * scale * Vec2(std::cos(t), std::sin(t)));
  }
  return v;
}

namespace detail {

PolygonIndex::PolygonIndex(const Polygon& poly, double cell, double tol) : v_(poly.vertices), cell_(cell), tol_(tol) {
  Vec2 lo = v_.front();
  Vec2 hi = v_.front();
  for (const auto& p : v_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  origin_ = lo - Vec2::Constant(cell_);
  nx_ = static_cast<long>(std::ceil((hi.x() - origin_.x()) / cell_)) + 2;
  ny_ = static_cast<long>(std::ceil((hi.y() - origin_.y()) / cell_)) + 2;
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(nx_ * ny_));
  const std::size_t n = v_.size();
  const double reach = cell_ * std::sqrt(0.5) + tol_;
  for (std::size_t e = 0; e < n; ++e) {
    const Vec2& a = v_[e];
    const Vec2& b = v_[(e + 1) % n];
    const long x0 = cell_x(std::min(a.x(), b.x()) - tol_), x1 = cell_x(std::max(a.x(), b.x()) + tol_);
    const long y0 = cell_y(std::min(a.y(), b.y()) - tol_), y1 = cell_y(std::max(a.y(), b.y()) + tol_);
    for (long iy = y0; iy <= y1; ++iy) {
      for (long ix = x0; ix <= x1; ++ix) {
        const Vec2 c = origin_ + cell_ * Vec2(ix + 0.5, iy + 0.5);
        if (distance_to_segment(c, a, b) <= reach) buckets[static_cast<std::size_t>(iy * nx_ + ix)].push_back(int(e));
      }
    }
  }
  offsets_.assign(buckets.size() + 1, 0);
  for (std::size_t i = 0; i < buckets.size(); ++i) offsets_[i + 1] = offsets_[i] + int(buckets[i].size());
  edges_.reserve(static_cast<std::size_t>(offsets_.back()));
  for (const auto& b : buckets) edges_.insert(edges_.end(), b.begin(), b.end());
}

long PolygonIndex::cell_x(double x) const {
  return std::clamp(static_cast<long>(std::floor((x - origin_.x()) / cell_)), 0L, nx_ - 1);
}

long PolygonIndex::cell_y(double y) const {
  return std::clamp(static_cast<long>(std::floor((y - origin_.y()) / cell_)), 0L, ny_ - 1);
}

std::span<const int> PolygonIndex::cell_edges(long ix, long iy) const {
  const auto k = static_cast<std::size_t>(iy * nx_ + ix);
  return {edges_.data() + offsets_[k], static_cast<std::size_t>(offsets_[k + 1] - offsets_[k])};
}

bool PolygonIndex::on_boundary(const Vec2& p) const {
  const std::size_t n = v_.size();
  for (int e : cell_edges(cell_x(p.x()), cell_y(p.y()))) {
    if (distance_to_segment(p, v_[e], v_[(e + 1) % n]) <= tol_) return true;
  }
  return false;
}

std::vector<double> PolygonIndex::row_crossings(double y) const {
  std::vector<double> xs;
  const std::size_t n = v_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = v_[i];
    const Vec2& b = v_[(i + 1) % n];
    if ((a.y() > y) != (b.y() > y)) xs.push_back(a.x() + (y - a.y()) * (b.x() - a.x()) / (b.y() - a.y()));
  }
  std::sort(xs.begin(), xs.end());
  return xs;
}

bool PolygonIndex::contains(const Vec2& p, std::span<const double> crossings) const {
  if (on_boundary(p)) return true;
  const auto right = crossings.end() - std::upper_bound(crossings.begin(), crossings.end(), p.x());
  return (right % 2) == 1;
}

bool PolygonIndex::cuts_open_triangle(const Vec2& a, const Vec2& b, const Vec2& c) const {
  const Vec2 lo = a.cwiseMin(b).cwiseMin(c);
  const Vec2 hi = a.cwiseMax(b).cwiseMax(c);
  const std::size_t n = v_.size();
  const Vec2 corners[3] = {a, b, c};
  std::vector<int> seen;
  for (long iy = cell_y(lo.y()); iy <= cell_y(hi.y()); ++iy) {
    for (long ix = cell_x(lo.x()); ix <= cell_x(hi.x()); ++ix) {
      for (int e : cell_edges(ix, iy)) {
        if (std::find(seen.begin(), seen.end(), e) != seen.end()) continue;
        seen.push_back(e);
        const Vec2& p = v_[e];
        const Vec2 d = v_[(e + 1) % n] - p;
        double t0 = 0.0, t1 = 1.0;
        bool empty = false;
        for (int k = 0; k < 3 && !empty; ++k) {
          const Vec2& s = corners[k];
          const Vec2 edge = corners[(k + 1) % 3] - s;
          const double len = edge.norm();
          // Strict interior shrunk by tol: wedge(edge, x - s)/len > tol.
          const double alpha = wedge(edge, p - s) / len - tol_;
          const double beta = wedge(edge, d) / len;
          if (beta == 0.0) {
            if (alpha <= 0.0) empty = true;
          } else if (beta > 0.0) {
            t0 = std::max(t0, -alpha / beta);
          } else {
            t1 = std::min(t1, -alpha / beta);
          }
          if (t1 <= t0) empty = true;
        }
        if (!empty) return true;
      }
    }
  }
  return false;
}

}  // namespace detail
}  // namespace dislo
