#include "helpers.hpp"

#include <doctest.h>

using namespace testing;

TEST_SUITE("lattice") {

TEST_CASE("node (1,1) on the unit square lattice") {
  const auto dom = build_domain({1.0, axis_square(0.0, 10.0)});
  const auto i = dom.find_node({1, 1});
  REQUIRE(i);
  CHECK(dom.position(*i).x() == doctest::Approx(1.5));
  CHECK(dom.position(*i).y() == doctest::Approx(std::sqrt(3.0) / 2));
  // Interior rhombi come as up/down pairs.
  int up = 0, down = 0;
  for (const auto& t : dom.triangles()) (t.orientation == Orientation::Up ? up : down)++;
  CHECK(std::abs(up - down) <= 10);
  CHECK(up > 0);
}

TEST_CASE("a small disk holds no triangle") {
  CHECK_THROWS_AS(build_domain({1.0, regular_polygon(64, 0.4)}), EmptyDomainError);
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(build_domain({0.0, axis_square(0, 1)}), std::invalid_argument);
  CHECK_THROWS_AS(build_domain({-1.0, axis_square(0, 1)}), std::invalid_argument);
}

TEST_CASE("equilateral triangle of side 4 holds 10 up and 6 down triangles") {
  Polygon tri{{Vec2(0, 0), 4.0 * e1(), 4.0 * nu()}};
  const auto dom = build_domain({1.0, tri});
  int up = 0, down = 0;
  for (const auto& t : dom.triangles()) (t.orientation == Orientation::Up ? up : down)++;
  CHECK(up == 10);
  CHECK(down == 6);
  CHECK(dom.num_nodes() == 15);
  CHECK(dom.num_bonds() == 30);
}

TEST_CASE("triangle vertices are counter-clockwise") {
  const auto up = triangle_vertices({{0, 0}, Orientation::Up});
  CHECK(up[0] == NodeId{0, 0});
  CHECK(up[1] == NodeId{1, 0});
  CHECK(up[2] == NodeId{0, 1});
  const auto down = triangle_vertices({{0, 0}, Orientation::Down});
  const Vec2 a = node_position(down[0], 1.0), b = node_position(down[1], 1.0), c = node_position(down[2], 1.0);
  CHECK(wedge(b - a, c - a) > 0.0);
  // T- = conv{0, e1, -eta}
  std::vector<Vec2> pts = {a, b, c};
  for (const Vec2& want : {Vec2(0, 0), Vec2(e1()), Vec2(-eta())})
    CHECK(std::any_of(pts.begin(), pts.end(), [&](const Vec2& p) { return (p - want).norm() < 1e-14; }));
}

TEST_CASE("barycenter of T+ at the origin") {
  const Vec2 b = barycenter({{0, 0}, Orientation::Up}, 1.0);
  CHECK(b.x() == doctest::Approx(0.5));
  CHECK(b.y() == doctest::Approx(std::sqrt(3.0) / 6));
}

TEST_CASE("nodes_in_annulus") {
  const auto dom = build_domain({0.1, regular_polygon(6, 1.0)});
  // The annulus is open, so a node sitting on the center is left out.
  CHECK(nodes_in_annulus(dom, Vec2::Zero(), 0.0, 100.0).size() == static_cast<std::size_t>(dom.num_nodes() - 1));
  CHECK(nodes_in_annulus(dom, Vec2(0.01, 0.0), 0.0, 100.0).size() == static_cast<std::size_t>(dom.num_nodes()));

  const int c = *dom.find_node({0, 0});
  const auto ring = nodes_in_annulus(dom, dom.position(c), 0.05, 0.15);
  CHECK(ring.size() == 6);

  const int t = *dom.find_triangle({{0, 0}, Orientation::Up});
  auto three = nodes_in_annulus(dom, dom.barycenter(t), 0.0, 0.06);
  std::vector<int> verts(dom.triangle_nodes(t).begin(), dom.triangle_nodes(t).end());
  std::sort(verts.begin(), verts.end());
  CHECK(three == verts);

  CHECK_THROWS_AS(nodes_in_annulus(dom, Vec2::Zero(), 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("bond symmetry, coordination and triangle areas") {
  const auto dom = build_domain({0.125, regular_polygon(6, 1.0)});
  for (int b = 0; b < dom.num_bonds(); ++b) {
    const auto& bd = dom.bond(b);
    CHECK(bd.first < bd.second);
    const auto fwd = dom.find_bond(bd.first, bd.second);
    const auto rev = dom.find_bond(bd.second, bd.first);
    REQUIRE(fwd);
    REQUIRE(rev);
    CHECK(fwd->index == rev->index);
    CHECK(fwd->sign == -rev->sign);
    CHECK(dom.bond_vector(b).norm() == doctest::Approx(0.125));
  }
  // Nodes well inside the hexagon have six bonds; their bonds sit in two triangles.
  const double inradius = std::sqrt(3.0) / 2;
  int interior = 0;
  for (int i = 0; i < dom.num_nodes(); ++i) {
    if (dom.position(i).norm() > inradius - 0.3) continue;
    ++interior;
    CHECK(dom.node_bonds(i).size() == 6);
    for (int b : dom.node_bonds(i)) CHECK(dom.bond_triangle_count(b) == 2);
  }
  CHECK(interior > 50);
  for (int t = 0; t < dom.num_triangles(); ++t) {
    const auto& n = dom.triangle_nodes(t);
    const double area = 0.5 * wedge(dom.position(n[1]) - dom.position(n[0]), dom.position(n[2]) - dom.position(n[0]));
    CHECK(area == doctest::Approx(dom.triangle_area()).epsilon(1e-12));
  }
}

TEST_CASE("every triangle lies in the domain and every node is a triangle vertex") {
  const Polygon poly{{Vec2(0, 0), Vec2(1.3, 0.1), Vec2(1.1, 1.2), Vec2(0.4, 0.8), Vec2(-0.2, 1.0)}};
  const auto dom = build_domain({0.05, poly});
  std::vector<int> used(dom.num_nodes(), 0);
  for (int t = 0; t < dom.num_triangles(); ++t) {
    for (int i : dom.triangle_nodes(t)) {
      CHECK(polygon_contains(poly.vertices, dom.position(i), 1e-12));
      used[i] = 1;
    }
    CHECK(polygon_contains(poly.vertices, dom.barycenter(t), 0.0));
  }
  CHECK(std::all_of(used.begin(), used.end(), [](int u) { return u == 1; }));
}

TEST_CASE("build_domain is deterministic") {
  const LatticeSpec spec{0.07, regular_polygon(7, 1.0, Vec2(0.1, -0.2), 0.3)};
  const auto a = build_domain(spec);
  const auto b = build_domain(spec);
  REQUIRE(a.num_nodes() == b.num_nodes());
  REQUIRE(a.num_bonds() == b.num_bonds());
  REQUIRE(a.num_triangles() == b.num_triangles());
  CHECK(std::equal(a.nodes().begin(), a.nodes().end(), b.nodes().begin()));
  CHECK(std::equal(a.triangles().begin(), a.triangles().end(), b.triangles().begin()));
  for (int k = 0; k < a.num_bonds(); ++k) {
    CHECK(a.bond(k).first == b.bond(k).first);
    CHECK(a.bond(k).second == b.bond(k).second);
  }
}

TEST_CASE("nearest_triangle finds the containing triangle") {
  const auto dom = build_domain({0.1, regular_polygon(6, 1.0)});
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int k = 0; k < 200; ++k) {
    const Vec2 x(u(rng), u(rng));
    const auto t = nearest_triangle(dom, x);
    REQUIRE(t);
    double best = 1e300;
    for (int s = 0; s < dom.num_triangles(); ++s) best = std::min(best, (dom.barycenter(s) - x).norm());
    CHECK((dom.barycenter(*t) - x).norm() == doctest::Approx(best).epsilon(1e-12));
    CHECK((dom.barycenter(*t) - x).norm() <= 0.1 / std::sqrt(3.0) + 1e-12);
  }
  CHECK_FALSE(nearest_triangle(dom, Vec2(5.0, 5.0)));
}

}  // TEST_SUITE
