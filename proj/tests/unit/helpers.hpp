#pragma once

#include "dislo/harness.hpp"

#include <random>

namespace testing {

using namespace dislo;

inline DomainPtr hexagon(double eps, double radius = 1.0) { return make_domain({eps, regular_polygon(6, radius)}); }

inline Mat2 random_matrix(std::mt19937& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Mat2 m;
  m << u(rng), u(rng), u(rng), u(rng);
  return m;
}

inline DiscreteStrain random_strain(DomainPtr dom, std::mt19937& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::Matrix2Xd v(2, dom->num_bonds());
  for (int b = 0; b < v.cols(); ++b) v.col(b) = Vec2(u(rng), u(rng));
  return DiscreteStrain(std::move(dom), std::move(v));
}

inline Dislocation dislocation(Vec2 x, int b1, int b2, double theta = 0.0) {
  Dislocation d;
  d.position = x;
  d.burgers = Eigen::Vector2i(b1, b2);
  d.theta = theta;
  return d;
}

inline DislocationMeasure measure(std::vector<Dislocation> entries, double eps, double gamma = 0.5) {
  DislocationMeasure mu;
  mu.entries = std::move(entries);
  mu.epsilon = eps;
  mu.gamma = gamma;
  return mu;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
