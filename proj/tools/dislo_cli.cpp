#include "dislo/config.hpp"
#include "dislo/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>

using namespace dislo;

namespace {

constexpr int kExitOther = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNotConverged = 3;

struct Globals {
  std::string config_path;
  std::string out_dir;
  int threads = 1;
  unsigned long long seed = 0;
  std::string svg_path;
};

class Run {
 public:
  Run(const Globals& g, std::string subcommand) : g_(g), t0_(std::chrono::steady_clock::now()) {
    cfg_ = g.config_path.empty() ? RunConfig{} : parse_config(g.config_path);
    out_ = g.out_dir.empty() ? std::filesystem::path(cfg_.output_dir) : std::filesystem::path(g.out_dir);
    std::filesystem::create_directories(out_);
    manifest_.subcommand = std::move(subcommand);
    manifest_.config_path = g.config_path;
    manifest_.config_text = cfg_.source_text;
    manifest_.threads = g.threads;
    manifest_.seed = g.seed;
  }

  const RunConfig& config() const { return cfg_; }

  std::filesystem::path output(const std::string& name) {
    manifest_.outputs.push_back(name);
    return out_ / name;
  }
  void csv(const CsvTable& table, const std::string& name) { emit_csv(table, output(name)); }
  void time(const std::string& stage, std::chrono::steady_clock::time_point since) {
    manifest_.timings[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
  }
  void note(const std::string& key, const std::string& value) { manifest_.notes[key] = value; }

  void finish() {
    time("total", t0_);
    write_manifest(manifest_, out_ / (manifest_.subcommand + "_manifest.json"));
  }

 private:
  Globals g_;
  RunConfig cfg_;
  std::filesystem::path out_;
  Manifest manifest_;
  std::chrono::steady_clock::time_point t0_;
};

using Clock = std::chrono::steady_clock;

int cmd_selfenergy(const Globals& g) {
  Run run(g, "selfenergy");
  const auto& c = run.config();
  const IsotropicTensor iso = linearized_tensor(c.potentials);
  const ElasticityTensor tensor = ElasticityTensor::isotropic(iso);
  const auto t = Clock::now();
  const double value = psi(c.zeta, tensor, c.profile_order);
  const double closed = isotropic_self_energy_coefficient(iso) * c.zeta.squaredNorm();
  const auto rows = psi_convergence_study(c.zeta, tensor, c.ratios);
  run.time("psi", t);
  run.csv(psi_table(rows), "psi_convergence.csv");
  std::printf("lambda = %s\nmu = %s\npsi(zeta) profile = %s\npsi(zeta) closed form = %s\n",
              format_double(iso.lambda).c_str(), format_double(iso.mu).c_str(), format_double(value).c_str(),
              format_double(closed).c_str());
  for (const auto& r : rows)
    std::printf("r2/r1 = %g: psi_annulus = %s residual = %s\n", r.ratio, format_double(r.psi_annulus).c_str(),
                format_double(r.residual).c_str());
  run.finish();
  return 0;
}

int cmd_phi(const Globals& g) {
  Run run(g, "phi");
  const auto& c = run.config();
  const ElasticityTensor tensor = ElasticityTensor::isotropic(linearized_tensor(c.potentials));
  const Mat2 form = psi_quadratic_form(tensor, c.profile_order);
  const auto t = Clock::now();
  const PhiResult r = phi(c.burgers, form, c.search_bound);
  run.time("phi", t);
  CsvTable table;
  table.header = {"b1", "b2", "multiplicity", "psi"};
  for (const auto& s : r.certificate) {
    const Vec2 v = lattice_vector<double>(s.burgers.x(), s.burgers.y());
    table.add(s.burgers.x(), s.burgers.y(), s.multiplicity, v.dot(form * v));
  }
  run.csv(table, "phi_certificate.csv");
  std::printf("phi(%d, %d) = %s (bound %d, %lld nodes)\n", c.burgers.x(), c.burgers.y(), format_double(r.value).c_str(),
              r.search_bound, r.nodes_visited);
  run.finish();
  return 0;
}

RecoveryInput recovery_input(const RunConfig& c) {
  RecoveryInput in;
  in.mu = c.measure();
  in.frame_angle = c.frame_angle;
  in.far_field = FarField::uniform_field(c.far_field);
  in.potentials = c.potentials;
  in.profile_order = c.profile_order;
  return in;
}

CsvTable displacement_table(const LatticeDomain& dom, const Eigen::Matrix2Xd& u) {
  CsvTable t;
  t.header = {"p", "q", "x", "y", "ux", "uy"};
  for (int i = 0; i < dom.num_nodes(); ++i)
    t.add(dom.node(i).p, dom.node(i).q, dom.position(i).x(), dom.position(i).y(), u(0, i), u(1, i));
  return t;
}

CsvTable admissibility_table(const AdmissibilityReport& rep, const DislocationMeasure& mu) {
  CsvTable t;
  t.header = {"x", "y", "a11", "a12", "a21", "a22", "distance", "delta"};
  for (std::size_t k = 0; k < rep.averages.size(); ++k) {
    const Mat2& a = rep.averages[k];
    t.add(mu.entries[k].position.x(), mu.entries[k].position.y(), a(0, 0), a(0, 1), a(1, 0), a(1, 1), rep.distances[k],
          rep.delta);
  }
  return t;
}

int cmd_recover(const Globals& g) {
  Run run(g, "recover");
  const auto& c = run.config();
  auto t = Clock::now();
  auto dom = make_domain({c.epsilon, c.domain});
  run.time("lattice", t);
  t = Clock::now();
  const RecoveryInput in = recovery_input(c);
  const Recovery rec = build_recovery(in, dom);
  const double energy = total_energy(rec.beta, c.potentials);
  const AdmissibilityReport rep = check_admissible(rec.beta, rec.snapped);
  run.time("recovery", t);
  write_strain_csv(rec.beta, run.output("strain.csv"));
  write_measure_csv(rec.snapped, run.output("measure.csv"));
  run.csv(displacement_table(*dom, rec.displacement), "displacement.csv");
  run.csv(admissibility_table(rep, rec.snapped), "admissibility.csv");
  const double norm = c.epsilon * c.epsilon * std::abs(std::log(c.epsilon));
  std::printf("nodes = %d\nenergy = %s\nnormalized energy = %s\nmeasure matches = %d missing = %d spurious = %d\n"
              "admissible = %s\n",
              dom->num_nodes(), format_double(energy).c_str(), format_double(energy / norm).c_str(), rep.measure.matches,
              rep.measure.missing, rep.measure.spurious, rep.pass ? "yes" : "no");
  run.finish();
  return 0;
}

int cmd_minimize(const Globals& g) {
  Run run(g, "minimize");
  const auto& c = run.config();
  auto t = Clock::now();
  auto dom = make_domain({c.epsilon, c.domain});
  const RecoveryInput in = recovery_input(c);
  const Recovery rec = build_recovery(in, dom);
  run.time("recovery", t);
  MinimizeProblem p = problem_from_recovery(rec, in);
  p.grad_tol = c.grad_tol;
  p.max_iter = c.max_iter;
  p.memory = c.memory;
  p = mode(p, c.fixed_frame);
  t = Clock::now();
  const MinimizeResult res = minimize(p);
  run.time("minimize", t);

  CsvTable hist;
  hist.header = {"iter", "energy", "grad_norm"};
  for (const auto& h : res.history) hist.add(h.iter, h.energy, h.grad_norm);
  run.csv(hist, "history.csv");
  run.csv(displacement_table(*dom, res.u_star), "state.csv");
  write_strain_csv(problem_strain(p, res.u_star, res.angle), run.output("strain.csv"));
  if (res.admissibility) run.csv(admissibility_table(*res.admissibility, rec.snapped), "admissibility.csv");
  run.note("stop_reason", res.stop_reason);
  run.note("converged", res.converged ? "true" : "false");

  const double norm = c.epsilon * c.epsilon * std::abs(std::log(c.epsilon));
  std::printf("nodes = %d\nrecovery energy = %s\nminimized energy = %s\nnormalized = %s\nangle = %s\n"
              "iterations = %d\ngrad_norm = %s\nconverged = %s (%s)\n",
              dom->num_nodes(), format_double(total_energy(rec.beta, c.potentials)).c_str(),
              format_double(res.energy).c_str(), format_double(res.energy / norm).c_str(),
              format_double(res.angle).c_str(), res.iterations, format_double(res.grad_norm).c_str(),
              res.converged ? "yes" : "no", res.stop_reason.c_str());
  run.finish();
  return res.converged ? 0 : kExitNotConverged;
}

int cmd_scaling(const Globals& g) {
  Run run(g, "scaling");
  const auto& c = run.config();
  const ScalingStudy study = c.scaling_study(g.threads);
  const auto t = Clock::now();
  const auto rows = run_scaling(study);
  run.time("study", t);
  run.csv(scaling_table(rows), "scaling.csv");
  if (!g.svg_path.empty()) write_scaling_svg(rows, g.svg_path);
  else if (c.write_svg) write_scaling_svg(rows, run.output("scaling.svg"));
  bool all = true;
  for (const auto& r : rows) {
    std::printf("eps = %-12g nodes = %-8d recovery = %-10.6g minimized = %-10.6g limit = %-10.6g iters = %d%s\n",
                r.epsilon, r.nodes, r.normalized_recovery, r.normalized_minimized, r.gamma_limit, r.iterations,
                r.converged ? "" : " (not converged)");
    all = all && r.converged;
  }
  run.finish();
  return all ? 0 : kExitNotConverged;
}

int cmd_thin(const Globals& g) {
  Run run(g, "demo-thin-annulus");
  const auto& c = run.config();
  const auto t = Clock::now();
  const ThinAnnulusResult res = thin_annulus_demo(c.thin_m, c.thin_ladder, c.gamma);
  run.time("demo", t);
  run.csv(thin_annulus_table(res), "thin_annulus.csv");
  for (const auto& r : res.rows)
    std::printf("eps = %-10g energy = %-12.6g thin avg err = %-10.3g L2 to R(1) = %-10.4g thick avg err = %.4g\n",
                r.epsilon, r.energy, r.thin_average_error, r.l2_to_r1, r.thick_average_error);
  std::printf("energy exponent = %.6f\n", res.exponent);
  run.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete dislocation energies on the triangular lattice"};
  Globals g;
  app.add_option("--config", g.config_path, "configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out_dir, "output directory (overrides [output] dir)");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "seed for randomized utilities");
  app.require_subcommand(1);
  app.fallthrough();

  int code = 0;
  const auto wrap = [&](int (*fn)(const Globals&)) { return [&, fn] { code = fn(g); }; };
  app.add_subcommand("selfenergy", "self-energy of one Burgers vector")->callback(wrap(cmd_selfenergy));
  app.add_subcommand("phi", "relaxed self-energy with decomposition certificate")->callback(wrap(cmd_phi));
  app.add_subcommand("recover", "recovery strain for the configured layout")->callback(wrap(cmd_recover));
  app.add_subcommand("minimize", "relax the recovery strain at fixed slip")->callback(wrap(cmd_minimize));
  auto* scaling = app.add_subcommand("scaling", "recovery and minimization over an eps ladder");
  scaling->add_option("--svg", g.svg_path, "log-log plot path");
  scaling->callback(wrap(cmd_scaling));
  app.add_subcommand("demo-thin-annulus", "rotating ramp field")->callback(wrap(cmd_thin));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitValidation;
  } catch (const SeparationViolation& e) {
    std::cerr << "separation violation: " << e.what() << '\n';
    return kExitValidation;
  } catch (const PreconditionViolation& e) {
    std::cerr << "precondition violation: " << e.what() << '\n';
    return kExitValidation;
  } catch (const StudyError& e) {
    std::cerr << e.what() << '\n';
    return kExitOther;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return code;
}
