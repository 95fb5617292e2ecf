#include "dislo/recovery.hpp"

#include <map>

namespace dislo {

FarField FarField::uniform_field(const Mat2& m) {
  FarField f;
  f.uniform = true;
  f.matrix = m;
  return f;
}

FarField FarField::custom(std::function<Vec2(const Vec2&)> potential, std::function<Mat2(const Vec2&)> gradient) {
  if (!potential || !gradient) throw std::invalid_argument("far field needs both a potential and its gradient");
  FarField f;
  f.uniform = false;
  f.potential = std::move(potential);
  f.gradient = std::move(gradient);
  return f;
}

DislocationMeasure snap_positions(const DislocationMeasure& mu, const LatticeDomain& dom) {
  DislocationMeasure out = mu;
  out.epsilon = dom.epsilon();
  for (std::size_t k = 0; k < out.entries.size(); ++k) {
    const auto t = nearest_triangle(dom, out.entries[k].position);
    if (!t) throw SeparationViolation("dislocation " + std::to_string(k) + " has no lattice triangle nearby");
    out.entries[k].position = dom.barycenter(*t);
  }
  out.validate(dom.spec().domain);
  return out;
}

SlipField build_slip(const DislocationMeasure& snapped, const LatticeDomain& dom) {
  const double eps = dom.epsilon();
  SlipField slip = SlipField::Zero(2, dom.num_bonds());
  for (const auto& d : snapped.entries) {
    const Vec2 xk = d.position;
    const Vec2 xi = d.xi();
    for (int b = 0; b < dom.num_bonds(); ++b) {
      const Vec2 pi = dom.position(dom.bond(b).first), pj = dom.position(dom.bond(b).second);
      const double yi = pi.y() - xk.y(), yj = pj.y() - xk.y();
      if (std::abs(yi) < 1e-9 * eps || std::abs(yj) < 1e-9 * eps) {
        const double xn = std::abs(yi) < 1e-9 * eps ? pi.x() : pj.x();
        if (xn >= xk.x()) throw std::logic_error("cut of a dislocation passes through a lattice node");
        continue;
      }
      if ((yi < 0.0) == (yj < 0.0)) continue;
      const double s = yi / (yi - yj);
      if (pi.x() + s * (pj.x() - pi.x()) < xk.x()) continue;
      slip.col(b) += yi < 0.0 ? Vec2(-xi) : xi;
    }
  }
  return slip;
}

double cutoff(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double t = s - 1.0;
  return 1.0 - 3.0 * t * t + 2.0 * t * t * t;
}

DiscreteStrain strain_from_displacement(DomainPtr dom, double angle, const Eigen::Matrix2Xd& u, const SlipField& slip) {
  const auto& d = *dom;
  if (u.cols() != d.num_nodes() || slip.cols() != d.num_bonds())
    throw std::invalid_argument("displacement or slip size does not match the domain");
  const Mat2 r = rotation(angle);
  const double eps = d.epsilon();
  Eigen::Matrix2Xd v(2, d.num_bonds());
  for (int b = 0; b < d.num_bonds(); ++b) {
    const auto& bd = d.bond(b);
    v.col(b) = r * d.bond_vector(b) + eps * (u.col(bd.second) - u.col(bd.first) - slip.col(b));
  }
  return DiscreteStrain(std::move(dom), std::move(v));
}

Recovery build_recovery(const RecoveryInput& input, DomainPtr dom) {
  const auto& d = *dom;
  const double eps = d.epsilon();
  const double gamma = input.mu.gamma;
  DislocationMeasure mu = input.mu;
  mu.epsilon = eps;

  const double r_in = std::pow(eps, gamma) + eps;
  DislocationMeasure snapped = snap_positions(mu, d);
  const auto& verts = d.spec().domain.vertices;
  for (std::size_t k = 0; k < snapped.entries.size(); ++k) {
    const Dislocation& a = snapped.entries[k];
    const double turns = (a.theta - input.frame_angle) / (kPi / 3.0);
    if (std::abs(turns - std::round(turns)) > 1e-9)
      throw PreconditionViolation("dislocation " + std::to_string(k) + " frame is not in R I(T)");
    double wall = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < verts.size(); ++v)
      wall = std::min(wall, distance_to_segment(a.position, verts[v], verts[(v + 1) % verts.size()]));
    if (wall < 2.0 * r_in)
      throw PreconditionViolation("blending annulus of dislocation " + std::to_string(k) + " leaves the domain");
    for (std::size_t m = 0; m < k; ++m)
      if ((a.position - snapped.entries[m].position).norm() < 4.0 * r_in)
        throw PreconditionViolation("blending annuli of dislocations " + std::to_string(m) + " and " +
                                    std::to_string(k) + " overlap");
  }

  const Mat2 r = rotation(input.frame_angle);
  const ElasticityTensor tensor = ElasticityTensor::isotropic(linearized_tensor(input.potentials));
  std::vector<AngularProfile> profiles;
  for (const auto& a : snapped.entries)
    profiles.push_back(minimize_angular_profile(r.transpose() * a.xi(), tensor, input.profile_order));

  const double amp = std::sqrt(std::abs(std::log(eps)));
  Eigen::Matrix2Xd u(2, d.num_nodes());
  for (int i = 0; i < d.num_nodes(); ++i) {
    const Vec2 x = d.position(i);
    Vec2 ui = Vec2::Zero();
    int nearest = -1;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < snapped.entries.size(); ++k) {
      const Vec2 rel = x - snapped.entries[k].position;
      ui += r * profiles[k].displacement(rel);
      if (rel.norm() < dist) {
        dist = rel.norm();
        nearest = static_cast<int>(k);
      }
    }
    if (!input.far_field.is_zero()) {
      const double phi = nearest < 0 ? 0.0 : cutoff(dist / r_in);
      Vec2 cf = input.far_field.u(x);
      if (phi > 0.0) cf = phi * input.far_field.u(snapped.entries[nearest].position) + (1.0 - phi) * cf;
      ui += amp * cf;
    }
    u.col(i) = ui;
  }

  SlipField slip = build_slip(snapped, d);
  DiscreteStrain beta = strain_from_displacement(dom, input.frame_angle, u, slip);
  return Recovery{std::move(beta), std::move(snapped), std::move(u), std::move(slip), r_in};
}

}  // namespace dislo
