#pragma once

#include "dislo/minimizer.hpp"

#include <filesystem>

namespace dislo {

/// Recovery + minimization across an eps ladder for a fixed continuum layout.
struct ScalingStudy {
  Polygon domain = regular_polygon(6, 1.0);
  std::vector<Dislocation> dislocations;
  double frame_angle = 0.0;
  FarField far_field = FarField::zero();
  std::vector<double> epsilons = {1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512};
  double gamma = 0.5;
  PotentialPair potentials = PotentialPair::quadratic();
  double grad_tol = -1.0;
  int max_iter = 20000;
  int threads = 1;
  int profile_order = 8;
};

struct GammaLimitReference {
  double self_energy = 0.0;  // sum_k phi(R^T xi^k)
  double far_field = 0.0;    // int_Omega 1/2 C R^T beta^cf : R^T beta^cf
  double total() const { return self_energy + far_field; }
  std::vector<PhiResult> phis;
};

GammaLimitReference gamma_limit_reference(const ScalingStudy& study);

struct StudyRow {
  double epsilon = 0.0;
  int nodes = 0;
  double recovery_energy = 0.0;
  double minimized_energy = 0.0;
  double normalized_recovery = 0.0;   // / (eps^2 |log eps|)
  double normalized_minimized = 0.0;
  double gamma_limit = 0.0;
  double max_annulus_distance = 0.0;  // after minimization
  int iterations = 0;
  bool converged = false;
  double seconds = 0.0;
};

/// Error from one rung of the ladder, tagged with its eps.
class StudyError : public std::runtime_error {
 public:
  StudyError(double eps, const std::string& what);
  double epsilon() const { return eps_; }

 private:
  double eps_;
};

/// Rows are independent and may run on up to study.threads workers; the result
/// is always in ladder order.
std::vector<StudyRow> run_scaling(const ScalingStudy& study);

/// Single rung; throws the underlying error unchanged.
StudyRow run_scaling_row(const ScalingStudy& study, double eps, const GammaLimitReference& ref);

/// Number of successive pairs with values[k+1] <= values[k].
int nonincreasing_steps(const std::vector<double>& values);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ThinAnnulusRow {
  double epsilon = 0.0;
  double energy = 0.0;              // int_{A_{eps,1}} dist^2(grad u, SO(2))
  double thin_average_error = 0.0;  // |avg_{A_{eps,M eps}} grad u - Id|
  double l2_to_r1 = 0.0;            // ||grad u - R(1)||_{L^2(A_{eps,1})}
  double thick_average_error = 0.0; // |avg_{A_{eps,eps^gamma}} grad u - Id|
};

struct ThinAnnulusResult {
  double m = 0.0;
  double gamma = 0.5;
  std::vector<ThinAnnulusRow> rows;
  double exponent = 0.0;  // slope of log energy against log eps
};

/// Ramp R(t(|x|)) x with t = 0 below M eps, 1 above 2 M eps, linear between.
Mat2 thin_annulus_gradient(const Vec2& x, double eps, double m);

/// Throws std::invalid_argument unless M > 1 and 2 M eps < 1 for every eps.
ThinAnnulusResult thin_annulus_demo(double m, const std::vector<double>& epsilons, double gamma = 0.5);

struct PsiConvergenceRow {
  double ratio = 0.0;
  double psi_annulus = 0.0;
  double psi_reference = 0.0;
  double residual = 0.0;           // psi_annulus - psi_reference
  double residual_times_log = 0.0;
};

/// Throws std::invalid_argument unless the ratios are increasing and > 1.
std::vector<PsiConvergenceRow> psi_convergence_study(const Vec2& zeta, const ElasticityTensor& tensor,
                                                     const std::vector<double>& ratios,
                                                     const AnnulusOptions& opt = {});

/// Log-log plot of the normalized energies against eps with the reference level.
void write_scaling_svg(const std::vector<StudyRow>& rows, const std::filesystem::path& path);

}  // namespace dislo
