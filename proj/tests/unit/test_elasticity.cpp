#include "helpers.hpp"

#include <doctest.h>

#include <map>
#include <queue>

using namespace testing;

namespace {

const IsotropicTensor kIso = linearized_tensor(PotentialPair::quadratic());
const ElasticityTensor kC = ElasticityTensor::isotropic(kIso);

// Trapezoidal circulation of a strain field around the circle |x - c| = r.
template <typename F>
Vec2 loop_circulation(F&& field, const Vec2& c, double r, int n = 2048) {
  Vec2 sum = Vec2::Zero();
  for (int k = 0; k < n; ++k) {
    const double t = 2 * kPi * k / n;
    const Vec2 tangent(-std::sin(t), std::cos(t));
    sum += field(Vec2(c + r * Vec2(std::cos(t), std::sin(t)))) * tangent * r;
  }
  return sum * (2 * kPi / n);
}

// Shortest path over lattice steps with |coordinates| <= 3, edge cost psi(step).
double dijkstra_phi(const Eigen::Vector2i& target, const Mat2& form) {
  const int box = 10;
  std::map<std::pair<int, int>, double> dist;
  using Item = std::pair<double, std::pair<int, int>>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[{0, 0}] = 0.0;
  pq.push({0.0, {0, 0}});
  while (!pq.empty()) {
    const auto [d, p] = pq.top();
    pq.pop();
    if (d > dist[p]) continue;
    if (p == std::make_pair(target.x(), target.y())) return d;
    for (int a = -3; a <= 3; ++a)
      for (int b = -3; b <= 3; ++b) {
        if (a == 0 && b == 0) continue;
        const std::pair<int, int> q{p.first + a, p.second + b};
        if (std::abs(q.first) > box || std::abs(q.second) > box) continue;
        const Vec2 v = lattice_vector<double>(a, b);
        const double nd = d + v.dot(form * v);
        auto it = dist.find(q);
        if (it == dist.end() || nd < it->second) {
          dist[q] = nd;
          pq.push({nd, q});
        }
      }
  }
  return -1.0;
}

}  // namespace

TEST_SUITE("linear_elasticity") {

TEST_CASE("tensor validation") {
  CHECK_NOTHROW(kC.validate());
  CHECK_THROWS_AS(ElasticityTensor::isotropic(1.0, -1.0).validate(), std::invalid_argument);
  ElasticityTensor bad = kC;
  bad.c(0, 1) += 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  std::mt19937 rng(21);
  const Mat2 d = random_matrix(rng);
  CHECK(kC.contract(d) == doctest::Approx(kIso.contract(d)).epsilon(1e-13));
  CHECK((kC.apply(d) - kIso.apply(d)).norm() < 1e-12);
}

TEST_CASE("edge field circulation on circles of any radius") {
  const Vec2 zeta(0.7, -0.4);
  const auto f = [&](const Vec2& x) { return isotropic_edge_strain(zeta, kIso, x); };
  for (double r : {0.1, 1.0, 10.0}) CHECK((loop_circulation(f, Vec2::Zero(), r) - zeta).norm() < 1e-12);
  // A loop that does not enclose the core has no circulation.
  CHECK(loop_circulation(f, Vec2(3.0, 0.0), 1.0).norm() < 1e-12);
  CHECK_THROWS_AS(f(Vec2::Zero()), SingularityError);
}

TEST_CASE("edge field is homogeneous of degree -1 and odd") {
  const Vec2 zeta(1.0, 0.0);
  std::mt19937 rng(22);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const Vec2 x(u(rng), u(rng));
    const Mat2 b = isotropic_edge_strain(zeta, kIso, x);
    CHECK((isotropic_edge_strain(zeta, kIso, Vec2(3.0 * x)) - b / 3.0).norm() < 1e-13 * b.norm() + 1e-15);
    CHECK((isotropic_edge_strain(zeta, kIso, Vec2(-x)) + b).norm() < 1e-13 * b.norm() + 1e-15);
  }
}

TEST_CASE("edge field is curl free and in equilibrium") {
  const Vec2 zeta(0.3, 1.1);
  const double h = 1e-5;
  for (const Vec2& x : {Vec2(0.3, -0.7), Vec2(-1.2, 0.4), Vec2(0.05, 0.2)}) {
    const auto b = [&](double dx, double dy) { return isotropic_edge_strain(zeta, kIso, Vec2(x + Vec2(dx, dy))); };
    const Mat2 d1 = (b(h, 0) - b(-h, 0)) / (2 * h);
    const Mat2 d2 = (b(0, h) - b(0, -h)) / (2 * h);
    const double scale = b(0, 0).norm() / x.norm();
    const Vec2 curl = d1.col(1) - d2.col(0);
    CHECK(curl.norm() < 1e-6 * scale);
    const Mat2 s1 = (kIso.apply(b(h, 0)) - kIso.apply(b(-h, 0))) / (2 * h);
    const Mat2 s2 = (kIso.apply(b(0, h)) - kIso.apply(b(0, -h))) / (2 * h);
    const Vec2 div = s1.col(0) + s2.col(1);
    CHECK(div.norm() < 1e-6 * scale * kIso.lambda);
  }
}

TEST_CASE("optimal angular profile") {
  const Vec2 zeta(1.0, 0.0);
  const auto prof = minimize_angular_profile(zeta, kC, 8);
  CHECK(prof.order() == 8);
  const double p = psi(zeta, kC, 8);
  CHECK(prof.energy(kC) == doctest::Approx(p).epsilon(1e-12));
  CHECK(isotropic_field_energy(zeta, kIso) == doctest::Approx(p).epsilon(1e-10));
  // The optimal profile is the classical field.
  for (double t : {0.1, 1.0, 2.5, 4.0}) {
    const Vec2 x(std::cos(t), std::sin(t));
    CHECK((prof.strain(x) - isotropic_edge_strain(zeta, kIso, x)).norm() < 1e-10);
    CHECK((prof.strain(Vec2(2.0 * x)) - 0.5 * prof.strain(x)).norm() < 1e-14);
  }
  const auto circ = [&](const Vec2& x) { return prof.strain(x); };
  CHECK((loop_circulation(circ, Vec2::Zero(), 0.7) - zeta).norm() < 1e-12);
  // Displacement jumps by zeta across the positive x-axis.
  const Vec2 above = prof.displacement(Vec2(0.5, 1e-12)), below = prof.displacement(Vec2(0.5, -1e-12));
  CHECK((below - above - zeta).norm() < 1e-9);
  CHECK_THROWS_AS(prof.strain(Vec2::Zero()), SingularityError);
}

TEST_CASE("self-energy psi") {
  const Vec2 zeta = e1();
  const double k = isotropic_self_energy_coefficient(kIso);
  CHECK(k == doctest::Approx(kIso.mu * (kIso.lambda + kIso.mu) / (2 * kPi * (kIso.lambda + 2 * kIso.mu))));
  CHECK(psi(zeta, kC) == doctest::Approx(0.13057789628410865).epsilon(1e-12));
  CHECK(psi(zeta, kC) == doctest::Approx(k).epsilon(1e-12));
  CHECK(psi(Vec2(3.0 * zeta), kC) == doctest::Approx(9.0 * psi(zeta, kC)).epsilon(1e-12));
  CHECK(psi(nu(), kC) == doctest::Approx(psi(zeta, kC)).epsilon(1e-12));
  CHECK(psi(Vec2::Zero(), kC) == 0.0);
  const Mat2 form = psi_quadratic_form(kC);
  CHECK((form - k * Mat2::Identity()).norm() < 1e-12);
  // Orders beyond the first odd modes change nothing for an isotropic tensor.
  CHECK(psi(zeta, kC, 2) == doctest::Approx(psi(zeta, kC, 12)).epsilon(1e-12));
}

TEST_CASE("psi_annulus") {
  const Vec2 zeta(1.0, 0.0);
  const double k = isotropic_self_energy_coefficient(kIso);
  const double a = psi_annulus(zeta, kC, 0.1, 1.0);
  SUBCASE("depends only on the radius ratio") {
    CHECK(psi_annulus(zeta, kC, 1.0, 10.0) == doctest::Approx(a).epsilon(1e-10));
  }
  SUBCASE("quadratic in zeta") {
    CHECK(psi_annulus(Vec2(2.0 * zeta), kC, 0.1, 1.0) == doctest::Approx(4.0 * a).epsilon(1e-10));
  }
  SUBCASE("resolution doubling") {
    AnnulusOptions fine;
    fine.points_per_decade = 128;
    CHECK(std::abs(psi_annulus(zeta, kC, 0.1, 1.0, fine) - a) < 1e-4);
  }
  SUBCASE("hollow cylinder closed form") {
    // Traction-free hollow cylinder: log r - (r^2 - 1) / (r^2 + 1), times K |zeta|^2.
    for (double ratio : {2.0, 10.0, 100.0}) {
      const double exact = k * (std::log(ratio) - (ratio * ratio - 1) / (ratio * ratio + 1)) / std::log(ratio);
      CHECK(psi_annulus(zeta, kC, 1.0, ratio) == doctest::Approx(exact).epsilon(1e-5));
    }
  }
  SUBCASE("bounded by the whole-plane value") { CHECK(a < psi(zeta, kC)); }
  SUBCASE("invalid radii") {
    CHECK_THROWS_AS(psi_annulus(zeta, kC, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(psi_annulus(zeta, kC, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(psi_annulus(zeta, kC, 0.0, 1.0), std::invalid_argument);
  }
}

TEST_CASE("relaxed self-energy phi") {
  const double p1 = psi(e1(), kC);
  CHECK(phi(Eigen::Vector2i(0, 0), kC).value == 0.0);
  CHECK(phi(Eigen::Vector2i(1, 0), kC).value == doctest::Approx(p1).epsilon(1e-12));
  CHECK(phi(Eigen::Vector2i(2, 0), kC).value == doctest::Approx(2 * p1).epsilon(1e-12));
  // e1 + nu has length sqrt3; two unit steps are cheaper than one.
  const auto r = phi(Eigen::Vector2i(1, 1), kC);
  CHECK(r.value == doctest::Approx(2 * p1).epsilon(1e-12));
  int steps = 0;
  Eigen::Vector2i sum = Eigen::Vector2i::Zero();
  for (const auto& s : r.certificate) {
    steps += std::abs(s.multiplicity);
    sum += s.multiplicity * s.burgers;
  }
  CHECK(steps == 2);
  CHECK(sum == Eigen::Vector2i(1, 1));
  CHECK_THROWS_AS(phi(Eigen::Vector2i(4, 0), kC, 1), BoundTooSmallError);
}

TEST_CASE("phi is subadditive and below psi") {
  const Mat2 form = psi_quadratic_form(kC);
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      for (int c = -2; c <= 2; ++c)
        for (int d = -2; d <= 2; ++d) {
          const Eigen::Vector2i x(a, b), y(c, d);
          const double px = phi(x, form).value, py = phi(y, form).value, pxy = phi(Eigen::Vector2i(x + y), form).value;
          CHECK(pxy <= px + py + 1e-12);
          const Vec2 v = lattice_vector<double>(a, b);
          CHECK(px <= v.dot(form * v) + 1e-12);
        }
}

TEST_CASE("phi agrees with a shortest-path search") {
  // An anisotropic form makes the minimizing steps nontrivial.
  Mat2 form;
  form << 1.0, 0.35, 0.35, 0.6;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      CHECK(phi(Eigen::Vector2i(a, b), form).value ==
            doctest::Approx(dijkstra_phi(Eigen::Vector2i(a, b), form)).epsilon(1e-12));
}

}  // TEST_SUITE
