#include "dislo/strain.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace dislo {

DiscreteStrain::DiscreteStrain(DomainPtr dom) : dom_(std::move(dom)) {
  if (!dom_) throw std::invalid_argument("DiscreteStrain needs a domain");
  values_ = Eigen::Matrix2Xd::Zero(2, dom_->num_bonds());
}

DiscreteStrain::DiscreteStrain(DomainPtr dom, Eigen::Matrix2Xd values) : dom_(std::move(dom)), values_(std::move(values)) {
  if (!dom_) throw std::invalid_argument("DiscreteStrain needs a domain");
  if (values_.cols() != dom_->num_bonds())
    throw std::invalid_argument("strain has " + std::to_string(values_.cols()) + " values for " +
                                std::to_string(dom_->num_bonds()) + " bonds");
}

DiscreteStrain DiscreteStrain::from_matrix(DomainPtr dom, const Mat2& m) {
  DiscreteStrain beta(std::move(dom));
  const auto& d = beta.domain();
  for (int b = 0; b < d.num_bonds(); ++b) beta.values_.col(b) = m * d.bond_vector(b);
  return beta;
}

Vec2 DiscreteStrain::operator()(int i, int j) const {
  const auto ob = dom_->find_bond(i, j);
  if (!ob) throw std::out_of_range("(" + std::to_string(i) + "," + std::to_string(j) + ") is not a bond");
  return ob->sign * values_.col(ob->index);
}

Vec2 circulation(const DiscreteStrain& beta, int t) {
  const auto& dom = beta.domain();
  const auto& b = dom.triangle_bonds(t);
  const auto& s = dom.triangle_signs(t);
  return s[0] * beta.value(b[0]) + s[1] * beta.value(b[1]) + s[2] * beta.value(b[2]);
}

Vec2 circulation(const DiscreteStrain& beta, TriangleId t) {
  const auto idx = beta.domain().find_triangle(t);
  if (!idx) throw std::out_of_range("triangle not in domain");
  return circulation(beta, *idx);
}

void DislocationMeasure::validate(const Polygon& domain) const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("measure epsilon must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
  const double rg = std::pow(epsilon, gamma);
  const auto& v = domain.vertices;
  for (std::size_t n = 0; n < entries.size(); ++n) {
    const Vec2& x = entries[n].position;
    if (!polygon_contains(v, x, 0.0))
      throw SeparationViolation("dislocation " + std::to_string(n) + " lies outside the domain");
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < v.size(); ++k) d = std::min(d, distance_to_segment(x, v[k], v[(k + 1) % v.size()]));
    if (d < 2.0 * rg)
      throw SeparationViolation("dislocation " + std::to_string(n) + " is " + std::to_string(d) +
                                " from the boundary, below 2 eps^gamma = " + std::to_string(2.0 * rg));
    for (std::size_t m = 0; m < n; ++m) {
      const double s = (x - entries[m].position).norm();
      if (s < 4.0 * rg)
        throw SeparationViolation("dislocations " + std::to_string(m) + " and " + std::to_string(n) + " are " +
                                  std::to_string(s) + " apart, below 4 eps^gamma = " + std::to_string(4.0 * rg));
    }
  }
}

std::vector<BurgersAtom> burgers_measure(const DiscreteStrain& beta, const BurgersOptions& opt) {
  const auto& dom = beta.domain();
  const double eps = dom.epsilon();
  std::vector<BurgersAtom> atoms;
  for (int t = 0; t < dom.num_triangles(); ++t) {
    const Vec2 w = circulation(beta, t);
    if (w.norm() <= opt.tol_circ * eps) continue;
    BurgersAtom a;
    a.triangle = t;
    a.position = dom.barycenter(t);
    a.weight = w;
    const Vec2 c = lattice_coordinates(w / eps);
    const Eigen::Vector2i z(static_cast<int>(std::lround(c.x())), static_cast<int>(std::lround(c.y())));
    const Vec2 snapped = eps * lattice_vector<double>(z.x(), z.y());
    if ((snapped - w).norm() <= opt.tol_snap * eps) {
      a.snapped = true;
      a.lattice = z;
      a.weight = snapped;
    }
    atoms.push_back(a);
  }
  return atoms;
}

MeasureComparison compare_measure(const std::vector<BurgersAtom>& atoms, const DislocationMeasure& mu,
                                  const LatticeDomain& dom, double tol) {
  MeasureComparison out;
  const double eps = dom.epsilon();
  std::map<int, Vec2> expected;
  for (const auto& d : mu.entries) {
    const auto t = nearest_triangle(dom, d.position);
    if (!t) {
      ++out.missing;
      continue;
    }
    auto [it, fresh] = expected.try_emplace(*t, Vec2::Zero());
    it->second += eps * d.xi();
  }
  std::map<int, Vec2> found;
  for (const auto& a : atoms) found.try_emplace(a.triangle, Vec2::Zero()).first->second += a.weight;
  for (const auto& [t, w] : expected) {
    const auto it = found.find(t);
    const Vec2 got = it == found.end() ? Vec2::Zero() : it->second;
    out.max_weight_error = std::max(out.max_weight_error, (got - w).norm());
    if (it == found.end() && w.norm() > tol) ++out.missing;
  }
  for (const auto& [t, w] : found)
    if (!expected.count(t)) {
      ++out.spurious;
      out.max_weight_error = std::max(out.max_weight_error, w.norm());
    }
  out.matches = out.missing == 0 && out.spurious == 0 && out.max_weight_error <= tol;
  return out;
}

Mat2 triangle_matrix(const DiscreteStrain& beta, int t, double tol_circ) {
  const auto& dom = beta.domain();
  const double eps = dom.epsilon();
  const Vec2 c = circulation(beta, t);
  if (c.norm() > tol_circ * eps) {
    const auto id = dom.triangle(t);
    std::ostringstream msg;
    msg << "triangle " << t << " (base " << id.base.p << "," << id.base.q << ", "
        << (id.orientation == Orientation::Up ? "up" : "down") << ") has circulation " << c.norm();
    throw NotCompatibleError(msg.str());
  }
  const auto& n = dom.triangle_nodes(t);
  Mat2 edges, values;
  edges << dom.position(n[1]) - dom.position(n[0]), dom.position(n[2]) - dom.position(n[0]);
  values << beta(n[0], n[1]), beta(n[0], n[2]);
  return values * edges.inverse();
}

PiecewiseField::PiecewiseField(DomainPtr dom, std::vector<Mat2> matrices, std::vector<Core> cores)
    : dom_(std::move(dom)), matrices_(std::move(matrices)), cores_(std::move(cores)) {
  if (static_cast<int>(matrices_.size()) != dom_->num_triangles())
    throw std::invalid_argument("one matrix per triangle required");
}

namespace {

std::array<Vec2, 3> corners(const LatticeDomain& dom, int t) {
  const auto& n = dom.triangle_nodes(t);
  return {dom.position(n[0]), dom.position(n[1]), dom.position(n[2])};
}

constexpr int kCoreSides = 4096;

}  // namespace

double PiecewiseField::core_overlap(int t, const Vec2& center, double r, double R) const {
  const double rt = dom_->epsilon() / kSqrt3;
  const Vec2 bt = dom_->barycenter(t);
  double area = 0.0;
  for (const auto& core : cores_) {
    const double d = (bt - core.center).norm();
    if (d >= core.radius + rt) continue;
    const double dc = (core.center - center).norm();
    if (dc + core.radius <= r || dc - core.radius >= R) continue;
    const auto c = corners(*dom_, t);
    const auto piece = clip_convex(equal_area_disk(core.center, core.radius, kCoreSides), c);
    if (piece.size() >= 3) area += annulus_intersection_area(piece, center, r, R);
  }
  return area;
}

std::pair<Mat2, double> PiecewiseField::integrate_annulus(const Vec2& center, double r, double R) const {
  const double rt = dom_->epsilon() / kSqrt3;
  const double full = dom_->triangle_area();
  Mat2 sum = Mat2::Zero();
  double area = 0.0;
  for (int t = 0; t < dom_->num_triangles(); ++t) {
    const double d = (dom_->barycenter(t) - center).norm();
    if (d - rt >= R || d + rt <= r) continue;
    double a;
    if (d - rt >= r && d + rt <= R) {
      a = full;
    } else {
      const auto c = corners(*dom_, t);
      a = annulus_intersection_area(c, center, r, R);
    }
    if (!cores_.empty()) a -= core_overlap(t, center, r, R);
    if (a <= 0.0) continue;
    sum += a * matrices_[t];
    area += a;
  }
  return {sum, area};
}

std::pair<Mat2, double> PiecewiseField::integrate_polygon(const Polygon& region) const {
  Vec2 lo = region.vertices.front(), hi = lo;
  for (const auto& p : region.vertices) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double rt = dom_->epsilon() / kSqrt3;
  Mat2 sum = Mat2::Zero();
  double area = 0.0;
  for (int t = 0; t < dom_->num_triangles(); ++t) {
    const Vec2 b = dom_->barycenter(t);
    if ((b.array() + rt < lo.array()).any() || (b.array() - rt > hi.array()).any()) continue;
    const auto c = corners(*dom_, t);
    const auto piece = clip_convex(region.vertices, c);
    if (piece.size() < 3) continue;
    double a = std::abs(signed_area(piece));
    for (const auto& core : cores_) {
      if ((b - core.center).norm() >= core.radius + rt) continue;
      const auto disk = clip_convex(equal_area_disk(core.center, core.radius, kCoreSides), c);
      if (disk.size() < 3) continue;
      const auto cut = clip_convex(region.vertices, disk);
      if (cut.size() >= 3) a -= std::abs(signed_area(cut));
    }
    if (a <= 0.0) continue;
    sum += a * matrices_[t];
    area += a;
  }
  return {sum, area};
}

PiecewiseField piecewise_field(const DiscreteStrain& beta, const DislocationMeasure& mu, double tol_circ) {
  const auto& dom = beta.domain();
  const double eps = dom.epsilon();
  std::vector<Core> cores;
  for (const auto& d : mu.entries) cores.push_back(Core{d.position, eps});
  std::vector<Mat2> m(static_cast<std::size_t>(dom.num_triangles()), Mat2::Zero());
  for (int t = 0; t < dom.num_triangles(); ++t) {
    if (circulation(beta, t).norm() > tol_circ * eps) {
      const bool in_core = std::any_of(cores.begin(), cores.end(), [&](const Core& c) {
        return (dom.barycenter(t) - c.center).norm() < c.radius;
      });
      if (in_core) continue;
    }
    m[t] = triangle_matrix(beta, t, tol_circ);
  }
  return PiecewiseField(beta.domain_ptr(), std::move(m), std::move(cores));
}

Mat2 annulus_average(const PiecewiseField& field, const Vec2& center, double r, double R) {
  if (!(r >= 0.0 && r < R)) throw std::invalid_argument("annulus_average requires 0 <= r < R");
  const auto [sum, area] = field.integrate_annulus(center, r, R);
  if (!(area > 0.0)) throw std::invalid_argument("annulus does not intersect the field's support");
  return sum / area;
}

double distance_to_frame_group(const Mat2& m, double theta) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 6; ++k) best = std::min(best, (m - rotation(theta + k * kPi / 3.0)).norm());
  return best;
}

double default_admissibility_delta(double eps, double gamma) {
  return std::pow(eps, 1.0 - gamma) * std::abs(std::log(eps));
}

AdmissibilityReport check_admissible(const DiscreteStrain& beta, const DislocationMeasure& mu, double delta) {
  const auto& dom = beta.domain();
  const double eps = dom.epsilon();
  AdmissibilityReport rep;
  rep.delta = delta < 0.0 ? default_admissibility_delta(eps, mu.gamma) : delta;
  rep.measure = compare_measure(burgers_measure(beta), mu, dom, 1e-10 * eps);
  bool ok = rep.measure.matches;
  // Incompatible triangles outside the cores mean the measure is wrong; the
  // field is then unusable and (b) is skipped.
  std::optional<PiecewiseField> field;
  try {
    field.emplace(piecewise_field(beta, mu));
  } catch (const NotCompatibleError&) {
    ok = false;
  }
  const double outer = std::pow(eps, mu.gamma);
  for (const auto& d : mu.entries) {
    if (!field) {
      rep.averages.push_back(Mat2::Constant(std::numeric_limits<double>::quiet_NaN()));
      rep.distances.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    const Mat2 avg = annulus_average(*field, d.position, eps, outer);
    rep.averages.push_back(avg);
    const double dist = distance_to_frame_group(avg, d.theta);
    rep.distances.push_back(dist);
    ok = ok && dist <= rep.delta;
  }
  rep.pass = ok;
  return rep;
}

void write_strain_csv(const DiscreteStrain& beta, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path.string());
  std::fputs("p1,q1,p2,q2,bx,by\n", f);
  const auto& dom = beta.domain();
  for (int b = 0; b < dom.num_bonds(); ++b) {
    const auto n1 = dom.node(dom.bond(b).first), n2 = dom.node(dom.bond(b).second);
    std::fprintf(f, "%d,%d,%d,%d,%.17g,%.17g\n", n1.p, n1.q, n2.p, n2.q, beta.value(b).x(), beta.value(b).y());
  }
  if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path.string());
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double to_double(const std::string& s, const std::filesystem::path& path, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0) throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

DiscreteStrain read_strain_csv(DomainPtr dom, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  DiscreteStrain beta(dom);
  std::vector<char> seen(static_cast<std::size_t>(dom->num_bonds()), 0);
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (ln == 1 || line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != 6) throw std::runtime_error(path.string() + ":" + std::to_string(ln) + ": expected 6 columns");
    int v[4];
    for (int k = 0; k < 4; ++k) v[k] = static_cast<int>(to_double(c[k], path, ln));
    const auto i = dom->find_node({v[0], v[1]}), j = dom->find_node({v[2], v[3]});
    const auto ob = i && j ? dom->find_bond(*i, *j) : std::nullopt;
    if (!ob) throw std::runtime_error(path.string() + ":" + std::to_string(ln) + ": not a bond of the domain");
    beta.values().col(ob->index) = ob->sign * Vec2(to_double(c[4], path, ln), to_double(c[5], path, ln));
    seen[ob->index] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw std::runtime_error(path.string() + ": some domain bonds have no value");
  return beta;
}

void write_measure_csv(const DislocationMeasure& mu, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path.string());
  std::fputs("x,y,b1,b2,theta\n", f);
  for (const auto& d : mu.entries)
    std::fprintf(f, "%.17g,%.17g,%d,%d,%.17g\n", d.position.x(), d.position.y(), d.burgers.x(), d.burgers.y(),
                 d.theta);
  if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path.string());
}

DislocationMeasure read_measure_csv(const std::filesystem::path& path, double epsilon, double gamma) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  DislocationMeasure mu;
  mu.epsilon = epsilon;
  mu.gamma = gamma;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (ln == 1 || line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != 5) throw std::runtime_error(path.string() + ":" + std::to_string(ln) + ": expected 5 columns");
    Dislocation d;
    d.position = Vec2(to_double(c[0], path, ln), to_double(c[1], path, ln));
    d.burgers = Eigen::Vector2i(static_cast<int>(to_double(c[2], path, ln)), static_cast<int>(to_double(c[3], path, ln)));
    d.theta = to_double(c[4], path, ln);
    mu.entries.push_back(d);
  }
  return mu;
}

namespace detail {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace detail

}  // namespace dislo
