#include "helpers.hpp"

#include <doctest.h>

using namespace testing;

namespace {

RecoveryInput input_for(std::vector<Dislocation> d, double eps, double frame = 0.0) {
  RecoveryInput in;
  in.mu = measure(std::move(d), eps);
  in.frame_angle = frame;
  return in;
}

}  // namespace

TEST_SUITE("constructor") {

TEST_CASE("cutoff") {
  CHECK(cutoff(0.0) == 1.0);
  CHECK(cutoff(0.5) == 1.0);
  CHECK(cutoff(1.5) == doctest::Approx(0.5));
  CHECK(cutoff(2.7) == 0.0);
  // C^1 at both joints.
  const double h = 1e-7;
  CHECK(std::abs((cutoff(1.0 + h) - cutoff(1.0)) / h) < 1e-5);
  CHECK(std::abs((cutoff(2.0) - cutoff(2.0 - h)) / h) < 1e-5);
  for (double s = 0.0; s < 3.0; s += 0.01) CHECK(cutoff(s + 0.01) <= cutoff(s));
}

TEST_CASE("snapping moves atoms to the nearest barycenter") {
  const double eps = 1.0 / 32;
  const auto dom = hexagon(eps);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (int k = 0; k < 50; ++k) {
    const Vec2 x(u(rng), u(rng));
    const auto s = snap_positions(measure({dislocation(x, 1, 0)}, eps), *dom);
    const Vec2 y = s.entries[0].position;
    CHECK((y - x).norm() <= eps / std::sqrt(3.0) + 1e-12);
    const int t = *nearest_triangle(*dom, x);
    CHECK((y - dom->barycenter(t)).norm() < 1e-15);
    // Snapping is idempotent.
    const auto again = snap_positions(s, *dom);
    CHECK((again.entries[0].position - y).norm() < 1e-15);
  }
  CHECK_THROWS_AS(snap_positions(measure({dislocation(Vec2(4.0, 0.0), 1, 0)}, eps), *dom), SeparationViolation);
}

TEST_CASE("slip reproduces the prescribed circulation") {
  const double eps = 1.0 / 64;
  const auto dom = hexagon(eps);
  const auto snapped = snap_positions(
      measure({dislocation(Vec2(-0.3, 0.1), 1, 0), dislocation(Vec2(0.3, -0.2), 0, 1), dislocation(Vec2(0.05, 0.55), -1, 1)},
              eps),
      *dom);
  const auto slip = build_slip(snapped, *dom);
  const auto beta = strain_from_displacement(dom, 0.0, Eigen::Matrix2Xd::Zero(2, dom->num_nodes()), slip);
  const auto atoms = burgers_measure(beta);
  REQUIRE(atoms.size() == 3);
  for (const auto& e : snapped.entries) {
    const int t = *nearest_triangle(*dom, e.position);
    const auto it = std::find_if(atoms.begin(), atoms.end(), [&](const BurgersAtom& a) { return a.triangle == t; });
    REQUIRE(it != atoms.end());
    CHECK((it->weight - eps * e.xi()).norm() < 1e-14);
    CHECK(it->snapped);
  }
}

TEST_CASE("slip of a single atom runs to the boundary") {
  const double eps = 1.0 / 32;
  const auto dom = hexagon(eps);
  const auto snapped = snap_positions(measure({dislocation(Vec2(0.0, 0.01), 1, 0)}, eps), *dom);
  const auto slip = build_slip(snapped, *dom);
  const Vec2 x = snapped.entries[0].position;
  int cut = 0;
  for (int b = 0; b < dom->num_bonds(); ++b) {
    if (slip.col(b).isZero(0.0)) continue;
    ++cut;
    const Vec2 p = dom->position(dom->bond(b).first), q = dom->position(dom->bond(b).second);
    CHECK((p.y() - x.y()) * (q.y() - x.y()) < 0.0);
    CHECK(0.5 * (p.x() + q.x()) > x.x());
    CHECK(slip.col(b).norm() == doctest::Approx(1.0));
  }
  // Two slanted bonds cross the cut per lattice spacing.
  const double wall = 1.0 - x.y() / std::sqrt(3.0);
  CHECK(std::abs(cut - 2.0 * (wall - x.x()) / eps) <= 3.0);
}

TEST_CASE("opposite atoms on one row cancel beyond the pair") {
  const double eps = 1.0 / 64;
  const auto dom = hexagon(eps);
  const auto snapped =
      snap_positions(measure({dislocation(Vec2(-0.3, 0.01), 1, 0), dislocation(Vec2(0.3, 0.01), -1, 0)}, eps), *dom);
  REQUIRE(snapped.entries[0].position.y() == doctest::Approx(snapped.entries[1].position.y()));
  const auto slip = build_slip(snapped, *dom);
  int cut = 0;
  for (int b = 0; b < dom->num_bonds(); ++b) {
    if (slip.col(b).isZero(0.0)) continue;
    ++cut;
    const double mx = 0.5 * (dom->position(dom->bond(b).first).x() + dom->position(dom->bond(b).second).x());
    CHECK(mx > snapped.entries[0].position.x());
    CHECK(mx < snapped.entries[1].position.x());
  }
  CHECK(std::abs(cut - 2.0 * 0.6 / eps) <= 3.0);
}

TEST_CASE("recovery quantizes the measure") {
  const double eps = 1.0 / 64;
  const std::vector<std::vector<Dislocation>> layouts = {
      {dislocation(Vec2::Zero(), 1, 0)},
      {dislocation(Vec2(-0.3, 0.0), 1, 0), dislocation(Vec2(0.3, 0.05), 0, -1)},
      {dislocation(Vec2(-0.3, -0.2), 1, 0), dislocation(Vec2(0.3, -0.2), -1, 1), dislocation(Vec2(0.0, 0.35), 0, 1)},
  };
  for (const auto& layout : layouts) {
    const auto dom = hexagon(eps);
    const auto in = input_for(layout, eps);
    const auto rec = build_recovery(in, dom);
    const auto atoms = burgers_measure(rec.beta);
    const auto cmp = compare_measure(atoms, rec.snapped, *dom, 1e-10 * eps);
    CHECK(cmp.matches);
    CHECK(cmp.missing == 0);
    CHECK(cmp.spurious == 0);
    CHECK(atoms.size() == layout.size());
    CHECK(rec.inner_radius == doctest::Approx(std::sqrt(eps) + eps));
  }
}

TEST_CASE("annulus averages approach the frame as eps shrinks") {
  std::vector<double> dist;
  for (double eps : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    const auto dom = hexagon(eps);
    const auto rec = build_recovery(input_for({dislocation(Vec2::Zero(), 1, 0)}, eps), dom);
    const auto rep = check_admissible(rec.beta, rec.snapped);
    REQUIRE(rep.distances.size() == 1);
    CHECK(rep.pass);
    dist.push_back(rep.distances[0]);
  }
  CHECK(dist[1] < dist[0]);
  CHECK(dist[2] < dist[1]);
}

TEST_CASE("rotating the frame rotates the recovery") {
  const double eps = 1.0 / 32;
  const auto dom = hexagon(eps);
  const double th = 0.4;
  const auto a = build_recovery(input_for({dislocation(Vec2(0.05, 0.0), 1, 0)}, eps), dom);
  const auto b = build_recovery(input_for({dislocation(Vec2(0.05, 0.0), 1, 0, th)}, eps, th), dom);
  CHECK((b.beta.values() - rotation(th) * a.beta.values()).norm() < 1e-12 * a.beta.values().norm());
  const auto pot = PotentialPair::quadratic();
  CHECK(total_energy(b.beta, pot) == doctest::Approx(total_energy(a.beta, pot)).epsilon(1e-12));
}

TEST_CASE("recovery of a uniform far field") {
  const double eps = 1.0 / 32;
  const auto dom = hexagon(eps);
  RecoveryInput in = input_for({}, eps);
  const Mat2 m = (Mat2() << 0.1, 0.05, 0.05, -0.02).finished();
  in.far_field = FarField::uniform_field(m);
  const auto rec = build_recovery(in, dom);
  const auto iso = linearized_tensor(in.potentials);
  const double limit = 0.5 * iso.contract(m) * regular_polygon(6, 1.0).area();
  const double normalized = total_energy(rec.beta, in.potentials) / (eps * eps * std::abs(std::log(eps)));
  CHECK(std::abs(normalized - limit) < 0.1 * limit);
  CHECK(burgers_measure(rec.beta).empty());
}

TEST_CASE("recovery preconditions") {
  const double eps = 1.0 / 64;
  const auto dom = hexagon(eps);
  SUBCASE("frame outside R I(T)") {
    CHECK_THROWS_AS(build_recovery(input_for({dislocation(Vec2::Zero(), 1, 0, 0.3)}, eps), dom), PreconditionViolation);
  }
  SUBCASE("frame rotated by pi/3 is fine") {
    CHECK_NOTHROW(build_recovery(input_for({dislocation(Vec2::Zero(), 1, 0, kPi / 3)}, eps), dom));
  }
  SUBCASE("blending annulus leaves the domain") {
    CHECK_THROWS_AS(build_recovery(input_for({dislocation(Vec2(0.7, 0.0), 1, 0)}, eps), dom), PreconditionViolation);
  }
  SUBCASE("atoms closer than the separation rule") {
    CHECK_THROWS_AS(
        build_recovery(input_for({dislocation(Vec2(-0.2, 0.0), 1, 0), dislocation(Vec2(0.2, 0.0), -1, 0)}, eps), dom),
        SeparationViolation);
  }
  SUBCASE("blending annuli overlap") {
    CHECK_THROWS_AS(
        build_recovery(input_for({dislocation(Vec2(-0.26, 0.01), 1, 0), dislocation(Vec2(0.27, 0.01), -1, 0)}, eps), dom),
        PreconditionViolation);
  }
}

TEST_CASE("strain_from_displacement") {
  const double eps = 0.1;
  const auto dom = hexagon(eps);
  const SlipField no_slip = SlipField::Zero(2, dom->num_bonds());
  const Mat2 a = (Mat2() << 0.2, -0.1, 0.4, 0.3).finished();
  Eigen::Matrix2Xd u(2, dom->num_nodes());
  for (int i = 0; i < dom->num_nodes(); ++i) u.col(i) = a * dom->position(i);
  const auto beta = strain_from_displacement(dom, 0.3, u, no_slip);
  const auto expect = DiscreteStrain::from_matrix(dom, rotation(0.3) + eps * a);
  CHECK((beta.values() - expect.values()).norm() < 1e-13);
  CHECK_THROWS_AS(strain_from_displacement(dom, 0.0, u.leftCols(3), no_slip), std::invalid_argument);
}

}  // TEST_SUITE
