#include "dislo/elasticity.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <limits>

namespace dislo {

ElasticityTensor ElasticityTensor::isotropic(const IsotropicTensor& iso) {
  ElasticityTensor t;
  auto& c = t.c;
  c(0, 0) = c(3, 3) = iso.lambda + 2.0 * iso.mu;
  c(0, 3) = c(3, 0) = iso.lambda;
  c(1, 1) = c(1, 2) = c(2, 1) = c(2, 2) = iso.mu;
  return t;
}

void ElasticityTensor::validate() const {
  const double scale = std::max(c.norm(), 1e-300);
  if ((c - c.transpose()).norm() > 1e-12 * scale) throw std::invalid_argument("elasticity tensor is not symmetric");
  if ((c * Eigen::Vector4d(0.0, 1.0, -1.0, 0.0)).norm() > 1e-12 * scale)
    throw std::invalid_argument("elasticity tensor does not vanish on skew matrices");
  Eigen::Matrix<double, 4, 3> basis = Eigen::Matrix<double, 4, 3>::Zero();
  basis(0, 0) = 1.0;
  basis(1, 1) = basis(2, 1) = std::sqrt(0.5);
  basis(3, 2) = 1.0;
  const Eigen::Matrix3d sym = basis.transpose() * c * basis;
  if (Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(sym).eigenvalues().minCoeff() <= 1e-14 * scale)
    throw std::invalid_argument("elasticity tensor is not positive definite on symmetric matrices");
}

namespace {

Vec2 unit_n(double th) { return {std::cos(th), std::sin(th)}; }
Vec2 unit_t(double th) { return {-std::sin(th), std::cos(th)}; }

}  // namespace

Mat2 isotropic_edge_strain(const Vec2& zeta, const IsotropicTensor& tensor, const Vec2& x) {
  const double r2 = x.squaredNorm();
  if (r2 == 0.0) throw SingularityError("edge-dislocation strain is singular at the origin");
  const double b = zeta.norm();
  if (b == 0.0) return Mat2::Zero();
  const Mat2 q = rotation(std::atan2(zeta.y(), zeta.x()));
  const Vec2 y = q.transpose() * x;
  const double l = tensor.lambda, m = tensor.mu;
  const double kappa = (l + m) / (l + 2.0 * m);
  const double c = 1.0 / (2.0 * kPi * r2);
  const double anis = kappa * (y.x() * y.x() - y.y() * y.y()) / r2;
  Mat2 f;
  f(0, 0) = -c * y.y() * (1.0 + anis);
  f(0, 1) = c * y.x() * (1.0 + anis);
  f(1, 0) = c * y.x() * (anis - 1.0);
  f(1, 1) = c * y.y() * (l / (l + 2.0 * m) + anis);
  return b * q * f * q.transpose();
}

Vec2 AngularProfile::f(double theta) const {
  Vec2 v = zeta / (2.0 * kPi);
  for (int k = 1; k <= order(); ++k) v += a.col(k - 1) * std::cos(k * theta) + b.col(k - 1) * std::sin(k * theta);
  return v;
}

Mat2 AngularProfile::gamma(double theta) const {
  return f(theta) * unit_t(theta).transpose() + g * unit_n(theta).transpose();
}

Mat2 AngularProfile::strain(const Vec2& x) const {
  const double rho = x.norm();
  if (rho == 0.0) throw SingularityError("profile strain is singular at the origin");
  return gamma(std::atan2(x.y(), x.x())) / rho;
}

Vec2 AngularProfile::displacement(const Vec2& x) const {
  const double rho = x.norm();
  if (rho == 0.0) throw SingularityError("profile displacement is singular at the origin");
  double th = std::atan2(x.y(), x.x());
  if (th < 0.0) th += 2.0 * kPi;
  Vec2 u = zeta * th / (2.0 * kPi) + g * std::log(rho);
  for (int k = 1; k <= order(); ++k)
    u += (a.col(k - 1) * std::sin(k * th) - b.col(k - 1) * (std::cos(k * th) - 1.0)) / k;
  return u;
}

double AngularProfile::energy(const ElasticityTensor& tensor) const {
  const int m = 4 * (order() + 2);
  double sum = 0.0;
  for (int j = 0; j < m; ++j) sum += tensor.contract(gamma(2.0 * kPi * j / m));
  return 0.5 * sum * 2.0 * kPi / m;
}

AngularProfile minimize_angular_profile(const Vec2& zeta, const ElasticityTensor& tensor, int order) {
  if (order < 2) throw std::invalid_argument("profile order must be at least 2");
  tensor.validate();
  const int nvar = 2 + 4 * order;
  const int m = 4 * (order + 2);
  const double w = 2.0 * kPi / m;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nvar, nvar);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nvar);
  std::vector<Mat2> phi(nvar);
  for (int j = 0; j < m; ++j) {
    const double th = 2.0 * kPi * j / m;
    const Vec2 n = unit_n(th), t = unit_t(th);
    const Mat2 g0 = zeta / (2.0 * kPi) * t.transpose();
    for (int c = 0; c < 2; ++c) {
      const Vec2 ec = Vec2::Unit(c);
      phi[c] = ec * n.transpose();
      for (int k = 1; k <= order; ++k) {
        phi[2 + 4 * (k - 1) + c] = std::cos(k * th) * ec * t.transpose();
        phi[4 + 4 * (k - 1) + c] = std::sin(k * th) * ec * t.transpose();
      }
    }
    for (int p = 0; p < nvar; ++p) {
      const Mat2 cp = tensor.apply(phi[p]);
      rhs(p) += w * (cp.array() * g0.array()).sum();
      for (int q = p; q < nvar; ++q) a(p, q) += w * (cp.array() * phi[q].array()).sum();
    }
  }
  a.triangularView<Eigen::StrictlyLower>() = a.transpose().triangularView<Eigen::StrictlyLower>();
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 0.0)
    throw NumericError("angular profile system is not positive definite");
  const Eigen::VectorXd x = ldlt.solve(-rhs);
  AngularProfile prof;
  prof.zeta = zeta;
  prof.g = x.head<2>();
  prof.a.resize(2, order);
  prof.b.resize(2, order);
  for (int k = 1; k <= order; ++k) {
    prof.a.col(k - 1) = x.segment<2>(2 + 4 * (k - 1));
    prof.b.col(k - 1) = x.segment<2>(4 + 4 * (k - 1));
  }
  return prof;
}

double psi(const Vec2& zeta, const ElasticityTensor& tensor, int order) {
  if (zeta.isZero(0.0)) return 0.0;
  return minimize_angular_profile(zeta, tensor, order).energy(tensor);
}

Mat2 psi_quadratic_form(const ElasticityTensor& tensor, int order) {
  const double pxx = psi(Vec2(1.0, 0.0), tensor, order);
  const double pyy = psi(Vec2(0.0, 1.0), tensor, order);
  const double pxy = 0.5 * (psi(Vec2(1.0, 1.0), tensor, order) - pxx - pyy);
  Mat2 p;
  p << pxx, pxy, pxy, pyy;
  return p;
}

double isotropic_self_energy_coefficient(const IsotropicTensor& t) {
  t.validate();
  return t.mu * (t.lambda + t.mu) / (2.0 * kPi * (t.lambda + 2.0 * t.mu));
}

double isotropic_field_energy(const Vec2& zeta, const IsotropicTensor& tensor, int points) {
  double sum = 0.0;
  for (int j = 0; j < points; ++j) {
    const double th = 2.0 * kPi * j / points;
    sum += tensor.contract(isotropic_edge_strain(zeta, tensor, unit_n(th)));
  }
  return 0.5 * sum * 2.0 * kPi / points;
}

double psi_annulus(const Vec2& zeta, const ElasticityTensor& tensor, double r1, double r2, const AnnulusOptions& opt) {
  if (!(r1 > 0.0 && r1 < r2)) throw std::invalid_argument("psi_annulus requires 0 < r1 < r2");
  if (opt.points_per_decade < 2 || opt.modes < 1) throw std::invalid_argument("psi_annulus resolution too small");
  tensor.validate();
  const double len = std::log(r2 / r1);
  const int kmax = opt.modes;
  const int nmode = 2 * kmax + 1;
  const int na = 2 * nmode;

  // Angular Gram blocks; trapezoid rule exact for the trigonometric degrees involved.
  const int mq = 4 * kmax + 8;
  const double wq = 2.0 * kPi / mq;
  Eigen::MatrixXd pm = Eigen::MatrixXd::Zero(na, na), qm = pm, sm = pm;
  Eigen::VectorXd ra = Eigen::VectorXd::Zero(na), rb = ra;
  double c0 = 0.0;
  std::vector<Mat2> am(na), bm(na);
  for (int j = 0; j < mq; ++j) {
    const double th = 2.0 * kPi * j / mq;
    const Vec2 n = unit_n(th), t = unit_t(th);
    const Mat2 b0 = zeta / (2.0 * kPi) * t.transpose();
    for (int md = 0; md < nmode; ++md) {
      const int k = (md + 1) / 2;
      const bool is_sin = md > 0 && md % 2 == 0;
      const double val = is_sin ? std::sin(k * th) : std::cos(k * th);
      const double der = is_sin ? k * std::cos(k * th) : -k * std::sin(k * th);
      for (int c = 0; c < 2; ++c) {
        am[2 * md + c] = val * Vec2::Unit(c) * n.transpose();
        bm[2 * md + c] = der * Vec2::Unit(c) * t.transpose();
      }
    }
    const Mat2 cb0 = tensor.apply(b0);
    c0 += wq * (cb0.array() * b0.array()).sum();
    for (int p = 0; p < na; ++p) {
      const Mat2 ca = tensor.apply(am[p]), cbp = tensor.apply(bm[p]);
      ra(p) += wq * (ca.array() * b0.array()).sum();
      rb(p) += wq * (cbp.array() * b0.array()).sum();
      for (int q = 0; q < na; ++q) {
        pm(p, q) += wq * (ca.array() * am[q].array()).sum();
        qm(p, q) += wq * (ca.array() * bm[q].array()).sum();
        sm(p, q) += wq * (cbp.array() * bm[q].array()).sum();
      }
    }
  }

  // P2 elements in s = log(rho / r1), nodes equally spaced.
  const int nel = std::max(1, static_cast<int>(std::ceil(len / std::log(10.0) * opt.points_per_decade / 2.0)));
  const int nn = 2 * nel + 1;
  const double h = len / nel;
  const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double m1[3][3] = {}, m2[3][3] = {}, m3[3][3] = {}, d0[3] = {}, d1[3] = {};
  for (int g = 0; g < 3; ++g) {
    const double xi = 0.5 * (gx[g] + 1.0);  // in [0, 1]
    const double w = 0.5 * gw[g] * h;
    const double ph[3] = {2.0 * (xi - 0.5) * (xi - 1.0), -4.0 * xi * (xi - 1.0), 2.0 * xi * (xi - 0.5)};
    const double dph[3] = {(4.0 * xi - 3.0) / h, (-8.0 * xi + 4.0) / h, (4.0 * xi - 1.0) / h};
    for (int i = 0; i < 3; ++i) {
      d0[i] += w * ph[i];
      d1[i] += w * dph[i];
      for (int j = 0; j < 3; ++j) {
        m1[i][j] += w * dph[i] * dph[j];
        m2[i][j] += w * dph[i] * ph[j];
        m3[i][j] += w * ph[i] * ph[j];
      }
    }
  }

  // Pin the constant mode at the inner radius (translations).
  const int ndof = nn * na;
  std::vector<int> red(ndof);
  int nred = 0;
  for (int d = 0; d < ndof; ++d) red[d] = d < 2 ? -1 : nred++;

  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(nred);
  trip.reserve(static_cast<std::size_t>(nel) * 9 * na * na);
  for (int e = 0; e < nel; ++e) {
    for (int i = 0; i < 3; ++i) {
      const int ni = 2 * e + i;
      for (int p = 0; p < na; ++p) {
        const int ri = red[ni * na + p];
        if (ri < 0) continue;
        f(ri) += d1[i] * ra(p) + d0[i] * rb(p);
        for (int j = 0; j < 3; ++j) {
          const int nj = 2 * e + j;
          for (int q = 0; q < na; ++q) {
            const int rj = red[nj * na + q];
            if (rj < 0) continue;
            const double v =
                m1[i][j] * pm(p, q) + m2[i][j] * qm(p, q) + m2[j][i] * qm(q, p) + m3[i][j] * sm(p, q);
            if (v != 0.0) trip.emplace_back(ri, rj, v);
          }
        }
      }
    }
  }
  Eigen::SparseMatrix<double> k(nred, nred);
  k.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(k);
  if (solver.info() != Eigen::Success) throw NumericError("annulus system factorization failed");
  const Eigen::VectorXd x = solver.solve(-f);
  if (solver.info() != Eigen::Success) throw NumericError("annulus system solve failed");
  const double jmin = c0 * len + f.dot(x);
  return 0.5 * jmin / len;
}

namespace {

struct PhiSearch {
  std::vector<Eigen::Vector2i> cand;  // signed steps, ascending cost
  std::vector<double> cost;
  std::vector<int> opposite;
  double psi_min = 0.0, kappa = 0.0, max_len = 0.0;
  int bound = 0;
  double best = 0.0;
  std::vector<int> best_steps, steps;
  std::vector<int> used;
  long long visited = 0;

  double lower_bound(const Eigen::Vector2i& w) const {
    if (w.isZero()) return 0.0;
    const double len = lattice_vector<double>(w.x(), w.y()).norm();
    return std::max(psi_min * std::ceil(len / max_len - 1e-12), kappa * len);
  }

  void search(int start, const Eigen::Vector2i& w, double acc) {
    ++visited;
    if (w.isZero()) {
      if (acc < best * (1.0 - 1e-12)) {
        best = acc;
        best_steps = steps;
      }
      return;
    }
    if (static_cast<int>(steps.size()) >= bound) return;
    for (int c = start; c < static_cast<int>(cand.size()); ++c) {
      if (used[opposite[c]] > 0) continue;
      const Eigen::Vector2i rest = w - cand[c];
      const double next = acc + cost[c];
      if (next + lower_bound(rest) >= best * (1.0 - 1e-12)) continue;
      steps.push_back(c);
      ++used[c];
      search(c, rest, next);
      --used[c];
      steps.pop_back();
    }
  }
};

}  // namespace

PhiResult phi(const Eigen::Vector2i& b, const Mat2& form, int search_bound) {
  PhiResult res;
  if (b.isZero()) return res;
  const auto psi_of = [&](const Eigen::Vector2i& v) {
    const Vec2 x = lattice_vector<double>(v.x(), v.y());
    return x.dot(form * x);
  };
  const double lmin = Eigen::SelfAdjointEigenSolver<Mat2>(form).eigenvalues().minCoeff();
  if (!(lmin > 0.0)) throw std::invalid_argument("self-energy form must be positive definite");
  const double psib = psi_of(b);
  const double rmax = std::sqrt(psib / lmin) * (1.0 + 1e-12);

  PhiSearch s;
  const int span = static_cast<int>(std::ceil(2.0 * rmax / kSqrt3)) + 1;
  std::vector<std::pair<double, Eigen::Vector2i>> list;
  for (int q = -span; q <= span; ++q)
    for (int p = -2 * span; p <= 2 * span; ++p) {
      const Eigen::Vector2i v(p, q);
      if (v.isZero()) continue;
      const double c = psi_of(v);
      if (c <= psib * (1.0 + 1e-12)) list.emplace_back(c, v);
    }
  std::sort(list.begin(), list.end(), [](const auto& l, const auto& r) {
    if (l.first != r.first) return l.first < r.first;
    return std::make_pair(l.second.x(), l.second.y()) > std::make_pair(r.second.x(), r.second.y());
  });
  s.psi_min = std::numeric_limits<double>::infinity();
  s.kappa = std::numeric_limits<double>::infinity();
  for (const auto& [c, v] : list) {
    s.cand.push_back(v);
    s.cost.push_back(c);
    const double len = lattice_vector<double>(v.x(), v.y()).norm();
    s.psi_min = std::min(s.psi_min, c);
    s.kappa = std::min(s.kappa, c / len);
    s.max_len = std::max(s.max_len, len);
  }
  s.opposite.resize(s.cand.size());
  for (std::size_t i = 0; i < s.cand.size(); ++i)
    for (std::size_t j = 0; j < s.cand.size(); ++j)
      if (s.cand[j] == -s.cand[i]) s.opposite[i] = static_cast<int>(j);

  const int needed = static_cast<int>(std::ceil(psib / s.psi_min - 1e-12));
  s.bound = search_bound > 0 ? search_bound : needed;
  s.used.assign(s.cand.size(), 0);
  // Trivial decomposition b = 1 * b is the incumbent; it uses one step.
  s.best = psib * (1.0 + 2e-12);
  s.best_steps.clear();
  s.search(0, b, 0.0);
  if (s.best_steps.empty()) {
    for (std::size_t c = 0; c < s.cand.size(); ++c)
      if (s.cand[c] == b) s.best_steps = {static_cast<int>(c)};
    s.best = psib;
  }
  // Any decomposition with more than `bound` steps costs at least (bound+1) psi_min.
  if ((s.bound + 1) * s.psi_min < s.best * (1.0 - 1e-12))
    throw BoundTooSmallError("phi search bound " + std::to_string(s.bound) + " cannot certify the minimum; need " +
                             std::to_string(needed));
  res.value = s.best;
  res.search_bound = s.bound;
  res.nodes_visited = s.visited;
  std::vector<int> count(s.cand.size(), 0);
  for (int c : s.best_steps) ++count[c];
  for (std::size_t c = 0; c < s.cand.size(); ++c)
    if (count[c] > 0) res.certificate.push_back({s.cand[c], count[c]});
  return res;
}

PhiResult phi(const Eigen::Vector2i& b, const ElasticityTensor& tensor, int search_bound, int order) {
  return phi(b, psi_quadratic_form(tensor, order), search_bound);
}

}  // namespace dislo
