#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace psc {

/// maximize  L(a) = -1/2 a^T G a + 1^T a
/// s.t.      y^T a = 0,  0 <= a_i <= upper_i
struct BoxQP {
  Eigen::MatrixXd g;
  Eigen::VectorXd y;     // +1 / -1
  Eigen::VectorXd upper; // per-sample caps, all > 0
};

/// Throws std::invalid_argument on non-square or asymmetric G (beyond 1e-10
/// relative), labels other than +1/-1, or non-positive caps.
void validate(const BoxQP& problem);

struct SmoOptions {
  double tol = 1e-6;
  std::int64_t max_iter = 10'000'000;
  bool record_objective = false;
};

struct DualSolution {
  Eigen::VectorXd alpha;
  double objective = 0.0;
  double kkt_residual = 0.0;
  std::int64_t iterations = 0;
  bool converged = false;
  /// L(a) after every pair update; filled only with SmoOptions::record_objective.
  std::vector<double> objective_trace;
};

double dual_objective(const BoxQP& problem, const Eigen::VectorXd& alpha);

/// Maximal-violating-pair score: max over I_up of -y_t grad_t minus min over
/// I_low of the same, where grad is the gradient of 1/2 a^T G a - 1^T a.
/// Zero (never negative) at an optimum.
double kkt_violation(const BoxQP& problem, const Eigen::VectorXd& alpha);

/// Two-coordinate ascent from a = 0. Each step takes the maximal violating
/// pair (lowest index on ties), solves the pair subproblem in closed form and
/// clips to the box; a flat pair moves to the nearer wall. Stops once the
/// violation is <= tol or after max_iter pair updates.
DualSolution solve_smo(const BoxQP& problem, const SmoOptions& options = {});

/// Exhaustive search for n <= 4: the first n-1 coordinates run over
/// grid_points evenly spaced values in [0, upper_i], the last is solved from
/// the equality and discarded if it leaves its box.
DualSolution brute_force_small(const BoxQP& problem, int grid_points);

} // namespace psc
