#include "dislo/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <thread>

namespace dislo {

namespace {

std::string format_eps(double eps) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "eps=%.17g: ", eps);
  return buf;
}

// Ear clipping of a simple counter-clockwise polygon.
std::vector<std::array<Vec2, 3>> triangulate(const Polygon& poly) {
  std::vector<Vec2> v = poly.vertices;
  if (signed_area(v) < 0.0) std::reverse(v.begin(), v.end());
  std::vector<std::array<Vec2, 3>> out;
  while (v.size() > 3) {
    bool clipped = false;
    for (std::size_t i = 0; i < v.size() && !clipped; ++i) {
      const Vec2& a = v[(i + v.size() - 1) % v.size()];
      const Vec2& b = v[i];
      const Vec2& c = v[(i + 1) % v.size()];
      if (wedge(b - a, c - b) <= 0.0) continue;
      bool empty = true;
      for (const Vec2& p : v) {
        if (p == a || p == b || p == c) continue;
        if (wedge(b - a, p - a) >= 0.0 && wedge(c - b, p - b) >= 0.0 && wedge(a - c, p - c) >= 0.0) {
          empty = false;
          break;
        }
      }
      if (!empty) continue;
      out.push_back({a, b, c});
      v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
    }
    if (!clipped) throw std::invalid_argument("polygon could not be triangulated");
  }
  out.push_back({v[0], v[1], v[2]});
  return out;
}

// Edge-midpoint rule on a 4^levels refinement of the triangle.
template <typename F>
double integrate_triangle(const std::array<Vec2, 3>& t, const F& f, int levels) {
  if (levels == 0) {
    const double area = 0.5 * std::abs(wedge(t[1] - t[0], t[2] - t[0]));
    return area / 3.0 * (f(0.5 * (t[0] + t[1])) + f(0.5 * (t[1] + t[2])) + f(0.5 * (t[2] + t[0])));
  }
  const Vec2 m01 = 0.5 * (t[0] + t[1]), m12 = 0.5 * (t[1] + t[2]), m20 = 0.5 * (t[2] + t[0]);
  return integrate_triangle<F>({t[0], m01, m20}, f, levels - 1) + integrate_triangle<F>({m01, t[1], m12}, f, levels - 1) +
         integrate_triangle<F>({m20, m12, t[2]}, f, levels - 1) + integrate_triangle<F>({m01, m12, m20}, f, levels - 1);
}

Eigen::Vector2i frame_burgers(const Dislocation& d, double frame_angle) {
  const Vec2 v = rotation(-frame_angle) * d.xi();
  const Vec2 c = lattice_coordinates(v);
  const Eigen::Vector2i b(static_cast<int>(std::lround(c.x())), static_cast<int>(std::lround(c.y())));
  if ((c - b.cast<double>()).norm() > 1e-9)
    throw PreconditionViolation("dislocation frame is not in R I(T)");
  return b;
}

}  // namespace

StudyError::StudyError(double eps, const std::string& what) : std::runtime_error(format_eps(eps) + what), eps_(eps) {}

GammaLimitReference gamma_limit_reference(const ScalingStudy& study) {
  const ElasticityTensor c = ElasticityTensor::isotropic(linearized_tensor(study.potentials));
  const Mat2 form = psi_quadratic_form(c, study.profile_order);
  GammaLimitReference ref;
  for (const auto& d : study.dislocations) {
    ref.phis.push_back(phi(frame_burgers(d, study.frame_angle), form));
    ref.self_energy += ref.phis.back().value;
  }
  const Mat2 rt = rotation(-study.frame_angle);
  if (study.far_field.uniform) {
    const Mat2 m = rt * study.far_field.matrix;
    ref.far_field = 0.5 * c.contract(m) * study.domain.area();
  } else {
    const auto density = [&](const Vec2& x) {
      const Mat2 m = rt * study.far_field.grad(x);
      return 0.5 * c.contract(m);
    };
    for (const auto& t : triangulate(study.domain)) ref.far_field += integrate_triangle(t, density, 5);
  }
  return ref;
}

StudyRow run_scaling_row(const ScalingStudy& study, double eps, const GammaLimitReference& ref) {
  const auto t0 = std::chrono::steady_clock::now();
  auto dom = make_domain({eps, study.domain});
  RecoveryInput in;
  in.mu.entries = study.dislocations;
  in.mu.epsilon = eps;
  in.mu.gamma = study.gamma;
  in.frame_angle = study.frame_angle;
  in.far_field = study.far_field;
  in.potentials = study.potentials;
  in.profile_order = study.profile_order;
  const Recovery rec = build_recovery(in, dom);

  MinimizeProblem p = problem_from_recovery(rec, in);
  p.grad_tol = study.grad_tol;
  p.max_iter = study.max_iter;
  const MinimizeResult res = minimize(p);

  const double norm = eps * eps * std::abs(std::log(eps));
  StudyRow row;
  row.epsilon = eps;
  row.nodes = dom->num_nodes();
  row.recovery_energy = total_energy(rec.beta, study.potentials);
  row.minimized_energy = res.energy;
  row.normalized_recovery = row.recovery_energy / norm;
  row.normalized_minimized = row.minimized_energy / norm;
  row.gamma_limit = ref.total();
  if (res.admissibility)
    for (double d : res.admissibility->distances) row.max_annulus_distance = std::max(row.max_annulus_distance, d);
  row.iterations = res.iterations;
  row.converged = res.converged;
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

std::vector<StudyRow> run_scaling(const ScalingStudy& study) {
  if (study.epsilons.empty()) throw std::invalid_argument("scaling study needs at least one eps");
  const GammaLimitReference ref = gamma_limit_reference(study);
  const std::size_t n = study.epsilons.size();
  std::vector<StudyRow> rows(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        rows[k] = run_scaling_row(study, study.epsilons[k], ref);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(study.threads, 1, static_cast<int>(n));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t k = 0; k < n; ++k) {
    if (!errors[k]) continue;
    try {
      std::rethrow_exception(errors[k]);
    } catch (const SeparationViolation& e) {
      // Layout problems keep their type so callers can report them as input errors.
      throw SeparationViolation(format_eps(study.epsilons[k]) + e.what());
    } catch (const PreconditionViolation& e) {
      throw PreconditionViolation(format_eps(study.epsilons[k]) + e.what());
    } catch (const std::exception& e) {
      throw StudyError(study.epsilons[k], e.what());
    }
  }
  return rows;
}

int nonincreasing_steps(const std::vector<double>& values) {
  int count = 0;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] <= values[k - 1]) ++count;
  return count;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope needs two or more points");
  Eigen::MatrixX2d a(x.size(), 2);
  Eigen::VectorXd rhs(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0 && y[k] > 0.0)) throw std::invalid_argument("loglog_slope needs positive data");
    a(k, 0) = std::log(x[k]);
    a(k, 1) = 1.0;
    rhs(k) = std::log(y[k]);
  }
  return a.colPivHouseholderQr().solve(rhs)(0);
}

Mat2 thin_annulus_gradient(const Vec2& x, double eps, double m) {
  const double r = x.norm();
  double t = 0.0, dt = 0.0;
  if (r >= 2.0 * m * eps) {
    t = 1.0;
  } else if (r >= m * eps) {
    t = r / (m * eps) - 1.0;
    dt = 1.0 / (m * eps);
  }
  // R(t) = [[cos t, sin t], [-sin t, cos t]]
  Mat2 rt, drt;
  rt << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
  drt << -std::sin(t), std::cos(t), -std::cos(t), -std::sin(t);
  if (r == 0.0) return rt;
  return rt + dt * (drt * x) * x.transpose() / r;
}

ThinAnnulusResult thin_annulus_demo(double m, const std::vector<double>& epsilons, double gamma) {
  if (!(m > 1.0)) throw std::invalid_argument("thin annulus demo needs M > 1");
  if (epsilons.size() < 2) throw std::invalid_argument("thin annulus demo needs two or more eps");
  ThinAnnulusResult out;
  out.m = m;
  out.gamma = gamma;
  std::vector<double> gx, gw;
  detail::gauss_legendre(48, gx, gw);
  constexpr int n_angular = 256;
  Mat2 r1;
  r1 << std::cos(1.0), std::sin(1.0), -std::sin(1.0), std::cos(1.0);

  for (double eps : epsilons) {
    if (!(eps > 0.0 && 2.0 * m * eps < 1.0)) throw std::invalid_argument("thin annulus demo needs 0 < 2 M eps < 1");
    const auto field = [&](const Vec2& x) { return thin_annulus_gradient(x, eps, m); };
    // Integrate piecewise so the kinks of the ramp fall on panel ends.
    const double breaks[] = {eps, m * eps, 2.0 * m * eps, 1.0};
    double energy = 0.0, l2 = 0.0;
    for (int s = 0; s < 3; ++s) {
      const double a = breaks[s], b = breaks[s + 1];
      for (std::size_t q = 0; q < gx.size(); ++q) {
        const double rho = 0.5 * (a + b) + 0.5 * (b - a) * gx[q];
        const double w = 0.5 * (b - a) * gw[q] * rho * 2.0 * kPi / n_angular;
        for (int k = 0; k < n_angular; ++k) {
          const double th = 2.0 * kPi * k / n_angular;
          const Mat2 f = field(Vec2(rho * std::cos(th), rho * std::sin(th)));
          const double d = dist_so2(f);
          energy += w * d * d;
          l2 += w * (f - r1).squaredNorm();
        }
      }
    }
    ThinAnnulusRow row;
    row.epsilon = eps;
    row.energy = energy;
    row.l2_to_r1 = std::sqrt(l2);
    row.thin_average_error = (annulus_average(field, Vec2::Zero(), eps, m * eps) - Mat2::Identity()).norm();
    row.thick_average_error =
        (annulus_average(field, Vec2::Zero(), eps, std::pow(eps, gamma), 256) - Mat2::Identity()).norm();
    out.rows.push_back(row);
  }
  std::vector<double> xs, ys;
  for (const auto& r : out.rows) {
    xs.push_back(r.epsilon);
    ys.push_back(r.energy);
  }
  out.exponent = loglog_slope(xs, ys);
  return out;
}

std::vector<PsiConvergenceRow> psi_convergence_study(const Vec2& zeta, const ElasticityTensor& tensor,
                                                     const std::vector<double>& ratios, const AnnulusOptions& opt) {
  for (std::size_t k = 0; k < ratios.size(); ++k)
    if (!(ratios[k] > 1.0) || (k > 0 && !(ratios[k] > ratios[k - 1])))
      throw std::invalid_argument("psi_convergence_study needs increasing ratios above 1");
  const double ref = psi(zeta, tensor);
  std::vector<PsiConvergenceRow> rows;
  for (double r : ratios) {
    PsiConvergenceRow row;
    row.ratio = r;
    row.psi_annulus = psi_annulus(zeta, tensor, 1.0, r, opt);
    row.psi_reference = ref;
    row.residual = row.psi_annulus - ref;
    row.residual_times_log = row.residual * std::log(r);
    rows.push_back(row);
  }
  return rows;
}

void write_scaling_svg(const std::vector<StudyRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw std::invalid_argument("no rows to plot");
  constexpr double width = 640, height = 420, left = 70, right = 20, top = 20, bottom = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& r : rows) {
    xmin = std::min(xmin, std::log10(r.epsilon));
    xmax = std::max(xmax, std::log10(r.epsilon));
    for (double v : {r.normalized_recovery, r.normalized_minimized, r.gamma_limit}) {
      if (v <= 0.0) continue;
      ymin = std::min(ymin, std::log10(v));
      ymax = std::max(ymax, std::log10(v));
    }
  }
  if (xmax - xmin < 1e-12) xmin -= 0.5, xmax += 0.5;
  if (!(ymax > ymin)) ymin -= 0.5, ymax += 0.5;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  const auto px = [&](double lx) { return left + (lx - xmin) / (xmax - xmin) * (width - left - right); };
  const auto py = [&](double ly) { return height - bottom - (ly - ymin) / (ymax - ymin) * (height - top - bottom); };

  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  char buf[256];
  const auto put = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    os << buf;
  };
  put("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" font-family=\"sans-serif\" font-size=\"12\">\n",
      width, height);
  put("<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n", left, top,
      width - left - right, height - top - bottom);
  for (const auto& r : rows) {
    const double x = px(std::log10(r.epsilon));
    put("<text x=\"%.2f\" y=\"%g\" text-anchor=\"middle\">%.4g</text>\n", x, height - bottom + 18, r.epsilon);
  }
  for (int k = 0; k <= 4; ++k) {
    const double ly = ymin + (ymax - ymin) * k / 4.0;
    put("<text x=\"%g\" y=\"%.2f\" text-anchor=\"end\">%.3g</text>\n", left - 6, py(ly) + 4, std::pow(10.0, ly));
  }
  put("<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">eps</text>\n", (left + width - right) / 2, height - 10);
  put("<text x=\"16\" y=\"%g\" transform=\"rotate(-90 16 %g)\" text-anchor=\"middle\">E / (eps^2 |log eps|)</text>\n",
      (top + height - bottom) / 2, (top + height - bottom) / 2);

  const auto series = [&](double StudyRow::*field, const char* color, const char* label, int slot) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& r : rows) put("%.2f,%.2f ", px(std::log10(r.epsilon)), py(std::log10(r.*field)));
    os << "\"/>\n";
    for (const auto& r : rows)
      put("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", px(std::log10(r.epsilon)), py(std::log10(r.*field)),
          color);
    put("<text x=\"%g\" y=\"%g\" fill=\"%s\">%s</text>\n", left + 10, top + 16.0 * slot, color, label);
  };
  series(&StudyRow::normalized_recovery, "#d62728", "recovery", 1);
  series(&StudyRow::normalized_minimized, "#1f77b4", "minimized", 2);
  if (rows.front().gamma_limit > 0.0) {
    const double y = py(std::log10(rows.front().gamma_limit));
    put("<line x1=\"%g\" y1=\"%.2f\" x2=\"%g\" y2=\"%.2f\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n", left, y,
        width - right, y);
    put("<text x=\"%g\" y=\"%g\" fill=\"gray\">limit</text>\n", left + 10, top + 48.0);
  }
  os << "</svg>\n";
}

}  // namespace dislo
