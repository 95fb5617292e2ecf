#include "dislo/minimizer.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <deque>

namespace dislo {

namespace {

Mat2 rotation_derivative(double angle) {
  Mat2 d;
  d << -std::sin(angle), -std::cos(angle), std::cos(angle), -std::sin(angle);
  return d;
}

int default_pin(const LatticeDomain& dom) {
  const Vec2 c = dom.spec().domain.centroid();
  Eigen::Index best = 0;
  (dom.positions().colwise() - c).colwise().squaredNorm().minCoeff(&best);
  return static_cast<int>(best);
}

/// Scalar graph Laplacian, pinned row replaced by the identity; applied
/// componentwise it approximates the Hessian of the bond energy.
class Preconditioner {
 public:
  Preconditioner(const LatticeDomain& dom, double weight, int pinned, double angle_weight)
      : angle_weight_(angle_weight) {
    const int n = dom.num_nodes();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(4 * static_cast<std::size_t>(dom.num_bonds()) + n);
    for (int b = 0; b < dom.num_bonds(); ++b) {
      const int i = dom.bond(b).first, j = dom.bond(b).second;
      if (i != pinned) trip.emplace_back(i, i, weight);
      if (j != pinned) trip.emplace_back(j, j, weight);
      if (i != pinned && j != pinned) {
        trip.emplace_back(i, j, -weight);
        trip.emplace_back(j, i, -weight);
      }
    }
    trip.emplace_back(pinned, pinned, 1.0);
    Eigen::SparseMatrix<double> l(n, n);
    l.setFromTriplets(trip.begin(), trip.end());
    solver_.compute(l);
    if (solver_.info() != Eigen::Success) throw NumericError("preconditioner factorization failed");
  }

  /// P^{-1} v for v laid out as (u as 2 x n column-major, angle?).
  Eigen::VectorXd solve(const Eigen::VectorXd& v, int n) const {
    Eigen::VectorXd out(v.size());
    Eigen::Map<const Eigen::Matrix<double, 2, Eigen::Dynamic>> vu(v.data(), 2, n);
    const Eigen::MatrixXd rhs = vu.transpose();
    const Eigen::MatrixXd x = solver_.solve(rhs);
    Eigen::Map<Eigen::Matrix<double, 2, Eigen::Dynamic>>(out.data(), 2, n) = x.transpose();
    if (v.size() > 2 * n) out(2 * n) = v(2 * n) / angle_weight_;
    return out;
  }

 private:
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
  double angle_weight_;
};

}  // namespace

EnergyGradient energy_and_gradient(const MinimizeProblem& p, const Eigen::Matrix2Xd& u, double angle) {
  const auto& dom = *p.dom;
  const double eps = dom.epsilon();
  const Mat2 r = rotation(angle);
  Eigen::Matrix2Xd v(2, dom.num_bonds());
  for (int b = 0; b < dom.num_bonds(); ++b) {
    const auto& bd = dom.bond(b);
    v.col(b) = r * dom.bond_vector(b) + eps * (u.col(bd.second) - u.col(bd.first) - p.slip.col(b));
  }
  Eigen::Matrix2Xd g;
  EnergyGradient out;
  out.energy = energy_and_strain_gradient(dom, v, p.potentials, &g);
  out.grad_u = Eigen::Matrix2Xd::Zero(2, dom.num_nodes());
  const Mat2 dr = rotation_derivative(angle);
  double ga = 0.0;
  for (int b = 0; b < dom.num_bonds(); ++b) {
    const auto& bd = dom.bond(b);
    out.grad_u.col(bd.second) += eps * g.col(b);
    out.grad_u.col(bd.first) -= eps * g.col(b);
    ga += g.col(b).dot(dr * dom.bond_vector(b));
  }
  out.grad_angle = ga;
  return out;
}

DiscreteStrain problem_strain(const MinimizeProblem& p, const Eigen::Matrix2Xd& u, double angle) {
  return strain_from_displacement(p.dom, angle, u, p.slip);
}

MinimizeProblem mode(MinimizeProblem problem, bool fixed_frame) {
  problem.fixed_frame = fixed_frame;
  return problem;
}

MinimizeProblem problem_from_recovery(const Recovery& rec, const RecoveryInput& input) {
  MinimizeProblem p;
  p.dom = rec.beta.domain_ptr();
  p.potentials = input.potentials;
  p.slip = rec.slip;
  p.frame_angle = input.frame_angle;
  p.u0 = rec.displacement;
  p.measure = rec.snapped;
  return p;
}

MinimizeResult minimize(const MinimizeProblem& p) {
  if (!p.dom) throw std::invalid_argument("minimize: problem has no domain");
  const auto& dom = *p.dom;
  const int n = dom.num_nodes();
  if (p.slip.cols() != dom.num_bonds()) throw std::invalid_argument("minimize: slip size does not match the bonds");
  if (p.u0.size() != 0 && p.u0.cols() != n) throw std::invalid_argument("minimize: u0 size does not match the nodes");
  if (p.u0.size() != 0 && !p.u0.allFinite()) throw std::invalid_argument("minimize: u0 is not finite");
  if (p.memory < 1) throw std::invalid_argument("minimize: memory must be positive");
  p.potentials.validate();

  const double eps = dom.epsilon();
  const double tol = p.grad_tol < 0.0 ? 1e-8 * eps : p.grad_tol;
  const int pin = p.pinned_node >= 0 ? p.pinned_node : default_pin(dom);
  if (pin >= n) throw std::invalid_argument("minimize: pinned node out of range");
  const bool free_frame = !p.fixed_frame;
  const int dim = 2 * n + (free_frame ? 1 : 0);

  Eigen::VectorXd x(dim);
  {
    Eigen::Matrix2Xd u = p.u0.size() ? p.u0 : Eigen::Matrix2Xd::Zero(2, n);
    Eigen::Map<Eigen::Matrix2Xd>(x.data(), 2, n) = u;
    if (free_frame) x(2 * n) = p.frame_angle;
  }

  const auto evaluate = [&](const Eigen::VectorXd& z, Eigen::VectorXd& grad) {
    Eigen::Map<const Eigen::Matrix2Xd> u(z.data(), 2, n);
    const double angle = free_frame ? z(2 * n) : p.frame_angle;
    EnergyGradient eg = energy_and_gradient(p, u, angle);
    eg.grad_u.col(pin).setZero();
    grad.resize(dim);
    Eigen::Map<Eigen::Matrix2Xd>(grad.data(), 2, n) = eg.grad_u;
    if (free_frame) grad(2 * n) = eg.grad_angle;
    return eg.energy;
  };

  const double w = 0.5 * eps * eps * (p.potentials.alpha1 + 2.0 * p.potentials.alpha2);
  const Preconditioner prec(dom, w, pin, w * dom.num_bonds());

  std::vector<BurgersAtom> atoms0;
  if (p.burgers_check_every > 0) atoms0 = burgers_measure(problem_strain(p, p.u0.size() ? p.u0 : Eigen::Matrix2Xd::Zero(2, n), p.frame_angle));

  MinimizeResult res;
  Eigen::VectorXd g;
  double f = evaluate(x, g);
  double gnorm = g.lpNorm<Eigen::Infinity>();
  res.history.push_back({0, f, gnorm});

  std::deque<Eigen::VectorXd> ss, ys;
  std::deque<double> rhos;
  Eigen::VectorXd gnew, xnew;
  int it = 0;
  res.stop_reason = "max_iter";
  while (true) {
    if (gnorm <= tol) {
      res.converged = true;
      res.stop_reason = "grad_tol";
      break;
    }
    if (it >= p.max_iter) break;

    bool fresh = false;
    for (int attempt = 0; attempt < 2; ++attempt) {
      // Two-loop recursion with H0 = gamma P^{-1}.
      Eigen::VectorXd q = g;
      std::vector<double> alpha(ss.size());
      for (int k = static_cast<int>(ss.size()) - 1; k >= 0; --k) {
        alpha[k] = rhos[k] * ss[k].dot(q);
        q -= alpha[k] * ys[k];
      }
      Eigen::VectorXd r = prec.solve(q, n);
      if (!ss.empty()) {
        const Eigen::VectorXd py = prec.solve(ys.back(), n);
        r *= ss.back().dot(ys.back()) / ys.back().dot(py);
      }
      for (std::size_t k = 0; k < ss.size(); ++k) {
        const double beta = rhos[k] * ys[k].dot(r);
        r += ss[k] * (alpha[k] - beta);
      }
      Eigen::VectorXd d = -r;
      double slope = g.dot(d);
      if (!(slope < 0.0)) {
        ss.clear();
        ys.clear();
        rhos.clear();
        d = -prec.solve(g, n);
        slope = g.dot(d);
      }
      double t = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        xnew = x + t * d;
        const double fnew = evaluate(xnew, gnew);
        if (std::isfinite(fnew) && fnew <= f + 1e-4 * t * slope) {
          const Eigen::VectorXd s = xnew - x;
          const Eigen::VectorXd y = gnew - g;
          const double sy = s.dot(y);
          if (sy > 1e-16 * s.norm() * y.norm()) {
            ss.push_back(s);
            ys.push_back(y);
            rhos.push_back(1.0 / sy);
            if (static_cast<int>(ss.size()) > p.memory) {
              ss.pop_front();
              ys.pop_front();
              rhos.pop_front();
            }
          }
          x.swap(xnew);
          g.swap(gnew);
          f = fnew;
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (accepted) {
        fresh = true;
        break;
      }
      if (ss.empty()) break;
      ss.clear();
      ys.clear();
      rhos.clear();
    }
    if (!fresh) {
      res.stop_reason = "line_search";
      break;
    }
    ++it;
    gnorm = g.lpNorm<Eigen::Infinity>();
    res.history.push_back({it, f, gnorm});
    if (p.burgers_check_every > 0 && it % p.burgers_check_every == 0) {
      Eigen::Map<const Eigen::Matrix2Xd> u(x.data(), 2, n);
      const auto atoms = burgers_measure(problem_strain(p, u, free_frame ? x(2 * n) : p.frame_angle));
      bool same = atoms.size() == atoms0.size();
      for (std::size_t k = 0; same && k < atoms.size(); ++k)
        same = atoms[k].triangle == atoms0[k].triangle && (atoms[k].weight - atoms0[k].weight).norm() <= 1e-10 * eps;
      if (!same) throw std::logic_error("Burgers measure changed during minimization");
    }
  }

  res.u_star = Eigen::Map<const Eigen::Matrix2Xd>(x.data(), 2, n);
  res.angle = free_frame ? x(2 * n) : p.frame_angle;
  res.energy = f;
  res.grad_norm = gnorm;
  res.iterations = it;
  if (!p.measure.entries.empty())
    res.admissibility = check_admissible(problem_strain(p, res.u_star, res.angle), p.measure);
  return res;
}

}  // namespace dislo
