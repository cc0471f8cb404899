#pragma once

#include "psc/dataset.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace psc {

/// Weight on the between-class scatter: m^(-1/4) with m = max(n1,n2)/min(n1,n2).
/// Equal classes give 1; the weight falls toward 0 as the imbalance grows.
double imbalance_beta(std::size_t n1, std::size_t n2);

/// Low-rank factor of beta*S_B + S_W.
///
/// Rows 0..n1-1 of `d` are the class +1 samples minus u1, rows n1..n-1 the
/// class -1 samples minus u2, and the last row is (u1 - u2)^T. With
/// ltau = (1/n1, ..., 1/n2, ..., beta) the scatter sum is d^T diag(ltau) d.
struct PopulationFactor {
  Eigen::MatrixXd d;
  Eigen::VectorXd ltau;
  double beta = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  /// order[r] is the input row that produced factor row r (r < n).
  std::vector<std::size_t> order;

  Eigen::Index dim() const { return d.cols(); }
  Eigen::Index rank_bound() const { return d.rows(); }
};

PopulationFactor build_factor(const LabeledMatrix& data, const ClassStats& stats);

/// Explicit d x d beta*S_B + S_W. Test oracle; intended for d <= 200.
Eigen::MatrixXd dense_scatter(const LabeledMatrix& data, const ClassStats& stats);

} // namespace psc
