#include "dislo/lattice.hpp"

#include <algorithm>
#include <limits>

namespace dislo {

namespace {

std::uint64_t key(NodeId n) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(n.p)) << 32) |
         static_cast<std::uint32_t>(n.q);
}

std::uint64_t key(int i, int j) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) | static_cast<std::uint32_t>(j);
}

std::uint64_t key(TriangleId t) { return key(t.base) * 2 + (t.orientation == Orientation::Down ? 1 : 0); }

}  // namespace

std::array<NodeId, 3> triangle_vertices(TriangleId t) {
  const NodeId b = t.base;
  if (t.orientation == Orientation::Up) return {b, NodeId{b.p + 1, b.q}, NodeId{b.p, b.q + 1}};
  return {b, NodeId{b.p + 1, b.q - 1}, NodeId{b.p + 1, b.q}};
}

Vec2 barycenter(TriangleId t, double eps) {
  const auto v = triangle_vertices(t);
  return (node_position(v[0], eps) + node_position(v[1], eps) + node_position(v[2], eps)) / 3.0;
}

std::optional<int> LatticeDomain::find_node(NodeId n) const {
  if (auto it = node_lookup_.find(key(n)); it != node_lookup_.end()) return it->second;
  return std::nullopt;
}

std::optional<LatticeDomain::OrientedBond> LatticeDomain::find_bond(int i, int j) const {
  const int sign = i < j ? 1 : -1;
  if (auto it = bond_lookup_.find(key(std::min(i, j), std::max(i, j))); it != bond_lookup_.end())
    return OrientedBond{it->second, sign};
  return std::nullopt;
}

std::optional<int> LatticeDomain::find_triangle(TriangleId t) const {
  if (auto it = triangle_lookup_.find(key(t)); it != triangle_lookup_.end()) return it->second;
  return std::nullopt;
}

void LatticeDomain::index() {
  const double eps = spec_.epsilon;
  std::sort(triangles_.begin(), triangles_.end());

  nodes_.clear();
  nodes_.reserve(triangles_.size());
  for (const auto& t : triangles_)
    for (const auto& v : triangle_vertices(t)) nodes_.push_back(v);
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());

  const int n = num_nodes();
  positions_.resize(2, n);
  node_lookup_.reserve(nodes_.size());
  for (int i = 0; i < n; ++i) {
    positions_.col(i) = node_position(nodes_[i], eps);
    node_lookup_.emplace(key(nodes_[i]), i);
  }

  const int nt = num_triangles();
  tri_nodes_.resize(nt);
  std::vector<std::pair<int, int>> edges;
  edges.reserve(3 * static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    const auto v = triangle_vertices(triangles_[t]);
    for (int k = 0; k < 3; ++k) tri_nodes_[t][k] = node_lookup_.at(key(v[k]));
    for (int k = 0; k < 3; ++k) {
      const int a = tri_nodes_[t][k], b = tri_nodes_[t][(k + 1) % 3];
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(edges.begin(), edges.end());
  bonds_.clear();
  bond_triangles_.clear();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (k > 0 && edges[k] == edges[k - 1]) {
      ++bond_triangles_.back();
      continue;
    }
    bonds_.push_back(Bond{edges[k].first, edges[k].second});
    bond_triangles_.push_back(1);
  }
  bond_lookup_.reserve(bonds_.size());
  for (int b = 0; b < num_bonds(); ++b) bond_lookup_.emplace(key(bonds_[b].first, bonds_[b].second), b);

  tri_bonds_.resize(nt);
  tri_signs_.resize(nt);
  barycenters_.resize(2, nt);
  triangle_lookup_.reserve(triangles_.size());
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      const auto ob = *find_bond(tri_nodes_[t][k], tri_nodes_[t][(k + 1) % 3]);
      tri_bonds_[t][k] = ob.index;
      tri_signs_[t][k] = ob.sign;
    }
    barycenters_.col(t) = (positions_.col(tri_nodes_[t][0]) + positions_.col(tri_nodes_[t][1]) +
                           positions_.col(tri_nodes_[t][2])) /
                          3.0;
    triangle_lookup_.emplace(key(triangles_[t]), t);
  }

  node_bond_offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& b : bonds_) {
    ++node_bond_offsets_[b.first + 1];
    ++node_bond_offsets_[b.second + 1];
  }
  for (int i = 0; i < n; ++i) node_bond_offsets_[i + 1] += node_bond_offsets_[i];
  node_bonds_.assign(static_cast<std::size_t>(node_bond_offsets_.back()), 0);
  std::vector<int> fill(node_bond_offsets_.begin(), node_bond_offsets_.end() - 1);
  for (int b = 0; b < num_bonds(); ++b) {
    node_bonds_[fill[bonds_[b].first]++] = b;
    node_bonds_[fill[bonds_[b].second]++] = b;
  }
}

LatticeDomain build_domain(const LatticeSpec& spec) {
  if (!(spec.epsilon > 0.0) || !std::isfinite(spec.epsilon))
    throw std::invalid_argument("lattice spacing epsilon must be positive");
  LatticeDomain dom;
  dom.spec_ = spec;
  normalize_polygon(dom.spec_.domain);
  const Polygon& poly = dom.spec_.domain;
  const double eps = spec.epsilon;
  const double diam = poly.diameter();
  const double tol = 1e-12 * diam;

  Vec2 lo = poly.vertices.front(), hi = poly.vertices.front();
  for (const auto& p : poly.vertices) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double cell = std::max(2.0 * eps, diam / 2048.0);
  const detail::PolygonIndex index(poly, cell, tol);

  const double h = 0.5 * kSqrt3 * eps;
  const long qmin = static_cast<long>(std::floor(lo.y() / h)) - 1;
  const long qmax = static_cast<long>(std::ceil(hi.y() / h)) + 1;

  auto inside = [&](NodeId n, const std::vector<double>& xs) { return index.contains(node_position(n, eps), xs); };

  std::vector<double> below = index.row_crossings((qmin - 1) * h);
  std::vector<double> row = index.row_crossings(qmin * h);
  for (long q = qmin; q <= qmax; ++q) {
    std::vector<double> above = index.row_crossings((q + 1) * h);
    const std::vector<double> up_bary = index.row_crossings(q * h + h / 3.0);
    const std::vector<double> down_bary = index.row_crossings(q * h - h / 3.0);
    const long pmin = static_cast<long>(std::floor(lo.x() / eps - 0.5 * q)) - 2;
    const long pmax = static_cast<long>(std::ceil(hi.x() / eps - 0.5 * q)) + 2;
    for (long p = pmin; p <= pmax; ++p) {
      const NodeId b{int(p), int(q)};
      if (!inside(b, row)) continue;
      for (Orientation o : {Orientation::Up, Orientation::Down}) {
        const TriangleId t{b, o};
        const auto v = triangle_vertices(t);
        const auto& other_row = o == Orientation::Up ? above : below;
        if (!inside(v[1], o == Orientation::Up ? row : below)) continue;
        if (!inside(v[2], o == Orientation::Up ? other_row : row)) continue;
        const Vec2 c = barycenter(t, eps);
        if (!index.contains(c, o == Orientation::Up ? up_bary : down_bary)) continue;
        if (index.cuts_open_triangle(node_position(v[0], eps), node_position(v[1], eps), node_position(v[2], eps)))
          continue;
        dom.triangles_.push_back(t);
      }
    }
    below = std::move(row);
    row = std::move(above);
  }
  if (dom.triangles_.empty())
    throw EmptyDomainError("domain too small: no lattice triangle of spacing " + std::to_string(eps) + " fits");
  dom.index();
  return dom;
}

std::optional<int> nearest_triangle(const LatticeDomain& dom, const Vec2& x) {
  const double eps = dom.epsilon();
  const Vec2 c = lattice_coordinates(x / eps);
  const int p0 = static_cast<int>(std::floor(c.x())), q0 = static_cast<int>(std::floor(c.y()));
  std::optional<int> best;
  double best_d = std::numeric_limits<double>::infinity();
  const double tie = 1e-12 * eps;
  for (int q = q0 - 2; q <= q0 + 2; ++q)
    for (int p = p0 - 2; p <= p0 + 2; ++p)
      for (Orientation o : {Orientation::Up, Orientation::Down}) {
        const auto t = dom.find_triangle(TriangleId{NodeId{p, q}, o});
        if (!t) continue;
        const double d = (dom.barycenter(*t) - x).norm();
        if (d < best_d - tie || (d <= best_d + tie && best && dom.triangle(*t) < dom.triangle(*best))) {
          best = t;
          best_d = std::min(d, best_d);
        }
      }
  if (best && best_d > 2.0 * eps) return std::nullopt;
  return best;
}

std::vector<int> nodes_in_annulus(const LatticeDomain& dom, const Vec2& center, double r, double R) {
  if (!(r >= 0.0) || !(r < R)) throw std::invalid_argument("nodes_in_annulus requires 0 <= r < R");
  std::vector<int> out;
  const double r2 = r * r, R2 = R * R;
  for (int i = 0; i < dom.num_nodes(); ++i) {
    const double d2 = (dom.position(i) - center).squaredNorm();
    if (d2 > r2 && d2 < R2) out.push_back(i);
  }
  return out;
}

}  // namespace dislo
