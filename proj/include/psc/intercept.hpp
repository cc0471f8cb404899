#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace psc {

/// Training projections w^T x split by class.
///
/// n_pos / n_neg are the class sizes that drive the gap split; they default to
/// the vector lengths but can be set independently.
struct Projections {
  std::vector<double> pos;
  std::vector<double> neg;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;

  Projections() = default;
  Projections(std::vector<double> pos_values, std::vector<double> neg_values);
  Projections(std::vector<double> pos_values, std::vector<double> neg_values,
              std::size_t pos_count, std::size_t neg_count);
};

Projections project(const Eigen::MatrixXd& samples, const std::vector<int>& labels,
                    const Eigen::VectorXd& w);

/// min(pos) > max(neg), strictly.
bool is_separable(const Projections& p);

/// Asymmetric split of the gap g = min(pos) - max(neg) = b_plus + b_minus.
///
/// With r = b_minus / b_plus:
///   n_neg >= n_pos:  r = exp(-ln(n_neg/n_pos) / 2R)
///   n_neg <  n_pos:  r = exp(+ln(n_pos/n_neg) / 2R)
/// so b_plus = g / (1 + r), the smaller class keeps the larger share, and the
/// intercept is b = b_plus - min(pos).
double gap_intercept(const Projections& p, double r_scale);

/// Intercept minimizing J(b) = sum_i sgn(-y_i (proj_i + b)) with sgn(0) = +1,
/// i.e. the misclassification count with on-boundary points counted wrong.
///
/// Candidate thresholds are the midpoints between consecutive distinct sorted
/// projections plus one point beyond each end (half the widest gap out, or 1/2
/// if all projections coincide). Ties in J go to the widest enclosing gap (the
/// two outer candidates count as unbounded), then to the higher recall of the
/// smaller class (skipped when sizes are equal), then to the smaller |b|.
double min_misclass_intercept(const Projections& p);

/// gap_intercept when separable, min_misclass_intercept otherwise.
double choose_intercept(const Projections& p, double r_scale);

} // namespace psc
