#pragma once

#include "dislo/geometry.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace dislo {

/// Lattice point eps * (p * e1 + q * nu).
struct NodeId {
  int p = 0;
  int q = 0;
  auto operator<=>(const NodeId&) const = default;
};

enum class Orientation : std::uint8_t { Up, Down };

/// Translate of T+ = conv{0, e1, nu} or T- = conv{0, e1, -eta} by `base`.
struct TriangleId {
  NodeId base;
  Orientation orientation = Orientation::Up;
  auto operator<=>(const TriangleId&) const = default;
};

inline Vec2 node_position(NodeId n, double eps) {
  return eps * Vec2(n.p + 0.5 * n.q, 0.5 * kSqrt3 * n.q);
}

/// Counter-clockwise vertices. Up: (b, b+e1, b+nu). Down: (b, b+e1-nu, b+e1).
std::array<NodeId, 3> triangle_vertices(TriangleId t);

Vec2 barycenter(TriangleId t, double eps);

struct LatticeSpec {
  double epsilon = 0.0;
  Polygon domain;
};

/// The eps-triangular lattice restricted to a polygon: every lattice triangle
/// contained in the closed polygon, with the nodes and bonds they span.
/// Immutable after construction. Nodes are sorted lexicographically by (p, q);
/// bonds are stored once with the smaller node index first.
class LatticeDomain {
 public:
  struct Bond {
    int first;
    int second;
  };
  struct OrientedBond {
    int index;
    int sign;  // +1 when (i, j) matches the stored orientation
  };

  const LatticeSpec& spec() const { return spec_; }
  double epsilon() const { return spec_.epsilon; }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }

  NodeId node(int i) const { return nodes_[i]; }
  std::span<const NodeId> nodes() const { return nodes_; }
  Vec2 position(int i) const { return positions_.col(i); }
  const Eigen::Matrix2Xd& positions() const { return positions_; }
  std::optional<int> find_node(NodeId n) const;

  const Bond& bond(int b) const { return bonds_[b]; }
  std::span<const Bond> bonds() const { return bonds_; }
  std::optional<OrientedBond> find_bond(int i, int j) const;
  /// Number of domain triangles having this bond as an edge (1 or 2).
  int bond_triangle_count(int b) const { return bond_triangles_[b]; }
  /// Reference bond vector x_second - x_first.
  Vec2 bond_vector(int b) const { return position(bonds_[b].second) - position(bonds_[b].first); }

  TriangleId triangle(int t) const { return triangles_[t]; }
  std::span<const TriangleId> triangles() const { return triangles_; }
  const std::array<int, 3>& triangle_nodes(int t) const { return tri_nodes_[t]; }
  const std::array<int, 3>& triangle_bonds(int t) const { return tri_bonds_[t]; }
  const std::array<int, 3>& triangle_signs(int t) const { return tri_signs_[t]; }
  Vec2 barycenter(int t) const { return barycenters_.col(t); }
  const Eigen::Matrix2Xd& barycenters() const { return barycenters_; }
  std::optional<int> find_triangle(TriangleId t) const;

  /// Bonds incident to node i.
  std::span<const int> node_bonds(int i) const {
    return {node_bonds_.data() + node_bond_offsets_[i],
            static_cast<std::size_t>(node_bond_offsets_[i + 1] - node_bond_offsets_[i])};
  }

  double triangle_area() const { return 0.25 * kSqrt3 * epsilon() * epsilon(); }
  /// |Omega_T|, the area covered by the domain triangles.
  double covered_area() const { return triangle_area() * num_triangles(); }

 private:
  friend LatticeDomain build_domain(const LatticeSpec& spec);
  void index();

  LatticeSpec spec_;
  std::vector<NodeId> nodes_;
  Eigen::Matrix2Xd positions_;
  std::unordered_map<std::uint64_t, int> node_lookup_;
  std::vector<Bond> bonds_;
  std::unordered_map<std::uint64_t, int> bond_lookup_;
  std::vector<std::uint8_t> bond_triangles_;
  std::vector<TriangleId> triangles_;
  std::unordered_map<std::uint64_t, int> triangle_lookup_;
  std::vector<std::array<int, 3>> tri_nodes_;
  std::vector<std::array<int, 3>> tri_bonds_;
  std::vector<std::array<int, 3>> tri_signs_;
  Eigen::Matrix2Xd barycenters_;
  std::vector<int> node_bond_offsets_;
  std::vector<int> node_bonds_;
};

/// Throws EmptyDomainError when no lattice triangle fits inside the polygon,
/// std::invalid_argument for eps <= 0 or a non-simple polygon.
LatticeDomain build_domain(const LatticeSpec& spec);

/// Domain triangle whose barycenter is nearest to x; ties go to the smaller
/// TriangleId. Empty when no domain triangle lies within 2 eps of x.
std::optional<int> nearest_triangle(const LatticeDomain& dom, const Vec2& x);

/// Indices of nodes x with r < |x - center| < R, ascending.
std::vector<int> nodes_in_annulus(const LatticeDomain& dom, const Vec2& center, double r, double R);

}  // namespace dislo
