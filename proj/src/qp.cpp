#include "psc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace psc {
namespace {

constexpr double kFlatCurvature = 1e-12;

struct ViolatingPair {
  Eigen::Index up = -1;  // argmax over I_up of -y grad
  Eigen::Index low = -1; // argmin over I_low of -y grad
  double gap = 0.0;
};

bool in_up(double y, double a, double cap) { return y > 0 ? a < cap : a > 0.0; }
bool in_low(double y, double a, double cap) { return y > 0 ? a > 0.0 : a < cap; }

ViolatingPair select_pair(const BoxQP& p, const Eigen::VectorXd& alpha,
                          const Eigen::VectorXd& grad) {
  ViolatingPair pair;
  double best_up = -std::numeric_limits<double>::infinity();
  double best_low = std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < alpha.size(); ++t) {
    const double score = -p.y[t] * grad[t];
    if (in_up(p.y[t], alpha[t], p.upper[t]) && score > best_up) {
      best_up = score;
      pair.up = t;
    }
    if (in_low(p.y[t], alpha[t], p.upper[t]) && score < best_low) {
      best_low = score;
      pair.low = t;
    }
  }
  if (pair.up >= 0 && pair.low >= 0) {
    pair.gap = best_up - best_low;
  }
  return pair;
}

} // namespace

void validate(const BoxQP& p) {
  const auto n = p.g.rows();
  if (p.g.cols() != n || p.y.size() != n || p.upper.size() != n) {
    throw std::invalid_argument("BoxQP: inconsistent sizes");
  }
  if (n == 0) {
    throw std::invalid_argument("BoxQP: empty problem");
  }
  const double scale = std::max(1.0, p.g.cwiseAbs().maxCoeff());
  if ((p.g - p.g.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("BoxQP: G is not symmetric");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p.y[i] != 1.0 && p.y[i] != -1.0) {
      throw std::invalid_argument("BoxQP: labels must be +1 or -1");
    }
    if (!(p.upper[i] > 0.0) || !std::isfinite(p.upper[i])) {
      throw std::invalid_argument("BoxQP: caps must be positive and finite");
    }
  }
}

double dual_objective(const BoxQP& p, const Eigen::VectorXd& alpha) {
  return alpha.sum() - 0.5 * alpha.dot(p.g * alpha);
}

double kkt_violation(const BoxQP& p, const Eigen::VectorXd& alpha) {
  const Eigen::VectorXd grad = p.g * alpha - Eigen::VectorXd::Ones(alpha.size());
  return std::max(0.0, select_pair(p, alpha, grad).gap);
}

DualSolution solve_smo(const BoxQP& p, const SmoOptions& options) {
  validate(p);
  if (!(options.tol > 0.0)) {
    throw std::invalid_argument("solve_smo: tol must be positive");
  }
  const auto n = p.g.rows();
  DualSolution sol;
  sol.alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad = -Eigen::VectorXd::Ones(n);

  const auto objective = [&] {
    // a^T G a = a^T (grad + 1)
    return sol.alpha.sum() - 0.5 * sol.alpha.dot(grad + Eigen::VectorXd::Ones(n));
  };

  ViolatingPair pair = select_pair(p, sol.alpha, grad);
  while (pair.gap > options.tol && sol.iterations < options.max_iter) {
    const Eigen::Index i = pair.up;
    const Eigen::Index j = pair.low;
    const double yi = p.y[i];
    const double yj = p.y[j];

    // Move a_i += yi*t, a_j -= yj*t; the equality is preserved for any t.
    const double room_i = yi > 0 ? p.upper[i] - sol.alpha[i] : sol.alpha[i];
    const double room_j = yj > 0 ? sol.alpha[j] : p.upper[j] - sol.alpha[j];
    const double room = std::min(room_i, room_j);
    const double curvature = p.g(i, i) + p.g(j, j) - 2.0 * yi * yj * p.g(i, j);
    double step = room;
    if (curvature > kFlatCurvature) {
      step = std::min(pair.gap / curvature, room);
    }

    const double old_i = sol.alpha[i];
    const double old_j = sol.alpha[j];
    if (step == room_i) {
      sol.alpha[i] = yi > 0 ? p.upper[i] : 0.0;
    } else {
      sol.alpha[i] = std::clamp(old_i + yi * step, 0.0, p.upper[i]);
    }
    if (step == room_j) {
      sol.alpha[j] = yj > 0 ? 0.0 : p.upper[j];
    } else {
      sol.alpha[j] = std::clamp(old_j - yj * step, 0.0, p.upper[j]);
    }

    grad += p.g.col(i) * (sol.alpha[i] - old_i) + p.g.col(j) * (sol.alpha[j] - old_j);
    ++sol.iterations;
    if (options.record_objective) {
      sol.objective_trace.push_back(objective());
    }
    pair = select_pair(p, sol.alpha, grad);
  }

  sol.kkt_residual = std::max(0.0, pair.gap);
  sol.converged = sol.kkt_residual <= options.tol;
  sol.objective = dual_objective(p, sol.alpha);
  return sol;
}

DualSolution brute_force_small(const BoxQP& p, int grid_points) {
  validate(p);
  const auto n = p.g.rows();
  if (n > 4) {
    throw std::invalid_argument("brute_force_small supports n <= 4");
  }
  if (grid_points < 2 || grid_points > 401) {
    throw std::invalid_argument("brute_force_small needs 2 <= grid_points <= 401");
  }
  const Eigen::Index last = n - 1;
  const auto steps = static_cast<double>(grid_points - 1);

  DualSolution best;
  best.objective = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  std::vector<int> index(static_cast<std::size_t>(last), 0);

  while (true) {
    double balance = 0.0;
    for (Eigen::Index t = 0; t < last; ++t) {
      alpha[t] = p.upper[t] * (index[static_cast<std::size_t>(t)] / steps);
      balance += p.y[t] * alpha[t];
    }
    const double a_last = -p.y[last] * balance;
    const double slack = 1e-12 * std::max(1.0, p.upper[last]);
    if (a_last >= -slack && a_last <= p.upper[last] + slack) {
      alpha[last] = std::clamp(a_last, 0.0, p.upper[last]);
      const double value = dual_objective(p, alpha);
      if (value > best.objective) {
        best.objective = value;
        best.alpha = alpha;
      }
    }

    // Odometer increment over the free coordinates.
    std::size_t t = 0;
    while (t < index.size() && ++index[t] == grid_points) {
      index[t++] = 0;
    }
    if (t == index.size()) {
      break;
    }
  }
  if (best.alpha.size() == 0) {
    throw std::runtime_error("brute_force_small: no feasible grid point");
  }
  best.iterations = 1;
  for (Eigen::Index t = 0; t < last; ++t) {
    best.iterations *= grid_points;
  }
  best.kkt_residual = kkt_violation(p, best.alpha);
  best.converged = true;
  return best;
}

} // namespace psc
