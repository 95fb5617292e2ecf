#pragma once

#include "dislo/recovery.hpp"

#include <optional>

namespace dislo {

/// Energy of beta(u) = R(angle)(x_j - x_i) + eps (u_j - u_i - slip) over node
/// displacements u (and optionally the frame angle), slip held fixed.
struct MinimizeProblem {
  DomainPtr dom;
  PotentialPair potentials = PotentialPair::quadratic();
  SlipField slip;
  double frame_angle = 0.0;
  Eigen::Matrix2Xd u0;
  bool fixed_frame = true;
  double grad_tol = -1.0;  // negative: 1e-8 * eps
  int max_iter = 20000;
  int memory = 10;
  int pinned_node = -1;  // negative: the node nearest the domain centroid
  /// Recheck the Burgers measure every this many iterations (0 = never).
  int burgers_check_every = 0;
  /// Measure used for the a-posteriori admissibility report (may be empty).
  DislocationMeasure measure;
};

struct EnergyGradient {
  double energy = 0.0;
  Eigen::Matrix2Xd grad_u;
  double grad_angle = 0.0;
};

/// Analytic gradient by the chain rule through the bond values; the energy is
/// the same sum total_energy evaluates.
EnergyGradient energy_and_gradient(const MinimizeProblem& problem, const Eigen::Matrix2Xd& u, double angle);

struct IterationRecord {
  int iter;
  double energy;
  double grad_norm;
};

struct MinimizeResult {
  Eigen::Matrix2Xd u_star;
  double angle = 0.0;
  double energy = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<IterationRecord> history;
  std::optional<AdmissibilityReport> admissibility;
};

/// Preconditioned limited-memory BFGS with Armijo backtracking. One node is
/// pinned (its displacement kept at the initial value) to remove translations.
/// Stops when max |grad| <= grad_tol; otherwise returns the last iterate with
/// converged = false.
MinimizeResult minimize(const MinimizeProblem& problem);

/// Copy of the problem with fixed_frame set.
MinimizeProblem mode(MinimizeProblem problem, bool fixed_frame);

/// The strain of a displacement/angle state of the problem.
DiscreteStrain problem_strain(const MinimizeProblem& problem, const Eigen::Matrix2Xd& u, double angle);

/// Problem initialized from a recovery construction.
MinimizeProblem problem_from_recovery(const Recovery& rec, const RecoveryInput& input);

}  // namespace dislo
